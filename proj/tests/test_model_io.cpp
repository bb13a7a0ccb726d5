#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "deun/engine.hpp"
#include "deun/model_io.hpp"
#include "support/random_models.hpp"

using namespace deun;

namespace {

const std::string kFood = DEUN_MODELS_DIR "/food_security.json";

bool has_issue(const ValidationReport& r, IssueKind kind) {
  for (const auto& i : r.issues) {
    if (i.kind == kind) return true;
  }
  return false;
}

const char* kTiny = R"({
  "attributes": [
    {"index": 1, "name": "a", "domain": [0, 1]},
    {"index": 2, "name": "b", "domain": [0, 1]}
  ],
  "prob_edges": [[1, 2]],
  "util_edges": [[1, 2]],
  "decisions": ["go"],
  "cpds": {
    "go": {
      "a": {"type": "linear_gaussian", "intercept": 0.5, "coeffs": {}, "sigma": 0.1},
      "b": {"type": "linear_gaussian", "intercept": 0.2, "coeffs": {"a": 0.5}, "sigma": 0.1}
    }
  },
  "utilities": {
    "a": {"": {"form": "exp_increasing", "delta": 1}},
    "b": {"0": {"form": "exp_increasing", "delta": 1}, "*": {"form": "exp_increasing", "delta": 2}}
  },
  "corner_weights": {"00": 0, "0*": 0.4, "*0": 0.5, "**": 1}
})";

}  // namespace

TEST(ModelIo, ReferenceValuesDefaultToDerived) {
  const DecisionModel m = parse_model_text(kTiny);
  EXPECT_EQ(m.attribute(1).ref_star, 1.0);
  EXPECT_EQ(m.attribute(2).ref_zero, 0.0);
  EXPECT_EQ(m.deun.util_parents(2), std::vector<int>{1});
  EXPECT_EQ(std::get<ExpIncreasing>(m.utility(2, 1)).delta, 2.0);
}

TEST(ModelIo, MalformedJsonReportsLine) {
  try {
    parse_model_text("{\n  \"attributes\": [\n    oops\n]}", "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_NE(std::string(e.what()).find("bad.json:3:"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, WrongKeyLengthIsReported) {
  std::string text = kTiny;
  text.replace(text.find("\"*\": {\"form\""), 3, "\"**\"");
  const auto parsed = read_model_document(text);
  EXPECT_FALSE(parsed.report.clean());
  EXPECT_TRUE(has_issue(parsed.report, IssueKind::KeyLengthMismatch));
  EXPECT_THROW(parse_model_text(text), ModelValidationError);
}

TEST(ModelIo, UnknownTopLevelKeysWarn) {
  std::string text = kTiny;
  text.insert(1, "\"comment\": \"hi\",");
  const auto parsed = read_model_document(text);
  EXPECT_TRUE(parsed.report.clean());
  EXPECT_EQ(parsed.report.warning_count(), 1u);
}

TEST(ModelIo, UnknownAttributeNames) {
  std::string text = kTiny;
  text.replace(text.find("{\"a\": 0.5}"), 10, "{\"zz\": 0.5}");
  EXPECT_TRUE(has_issue(read_model_document(text).report, IssueKind::UnknownName));
}

TEST(ModelIo, MissingFileIsIo) {
  try {
    parse_model("/nonexistent/model.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(ModelIo, SharedDistributionsAreFactored) {
  const DecisionModel m = parse_model(kFood);
  const auto j = model_to_json(m);
  EXPECT_TRUE(j["cpds"]["*"].contains("social_cohesion"));
  EXPECT_FALSE(j["cpds"]["d0"].contains("social_cohesion"));
  EXPECT_TRUE(j["cpds"]["d0"].contains("health"));
}

TEST(ModelIo, CanonicalTextIsAFixedPoint) {
  for (const char* name : {"food_security.json", "food_security_calibrated.json", "five_attribute.json"}) {
    const DecisionModel m = parse_model(std::string(DEUN_MODELS_DIR "/") + name);
    const std::string once = serialize_model(m);
    const DecisionModel again = parse_model_text(once);
    EXPECT_EQ(again, m) << name;
    EXPECT_EQ(serialize_model(again), once) << name;
  }
}

TEST(ModelIo, RandomModelsRoundTrip) {
  gen::Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const Deun s = gen::random_structure(rng, n);
    const DecisionModel m = trial % 2 ? gen::random_gaussian_model(rng, s)
                                      : gen::random_tabular_model(rng, s);
    ASSERT_TRUE(validate_model(m).clean()) << "trial " << trial;
    const std::string text = serialize_model(m);
    const DecisionModel back = parse_model_text(text);
    EXPECT_EQ(back, m) << "trial " << trial;
    EXPECT_EQ(serialize_model(back), text);
  }
}

TEST(ModelIo, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "deun_io_roundtrip.json";
  const DecisionModel m = parse_model(kFood);
  write_text_file(path, serialize_model(m));
  EXPECT_EQ(parse_model(path), m);
  std::filesystem::remove(path);
}

TEST(ModelIo, CanonicalDumpLayout) {
  nlohmann::json j = {{"b", {1, 2}}, {"a", 0.1}};
  EXPECT_EQ(canonical_dump(j), "{\n  \"a\": 0.10000000000000001,\n  \"b\": [1, 2]\n}\n");
  EXPECT_THROW(format_real(std::nan("")), Error);
}
