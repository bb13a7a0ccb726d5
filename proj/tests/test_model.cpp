#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "deun/model.hpp"
#include "deun/model_io.hpp"

using namespace deun;

namespace {

DecisionModel food() { return parse_model(DEUN_MODELS_DIR "/food_security.json"); }

bool has_issue(const ValidationReport& r, IssueKind kind, Issue::Severity sev = Issue::Severity::Error) {
  for (const auto& i : r.issues) {
    if (i.kind == kind && i.severity == sev) return true;
  }
  return false;
}

}  // namespace

TEST(NormalizedUtility, ExponentialFormsMatchClosedForms) {
  const Interval dom{-3.0, 5.0};
  const double d = 0.4;
  const NormalizedUtility inc(ExpIncreasing{d}, dom);
  const NormalizedUtility dec(ExpDecreasing{d}, dom);
  const NormalizedUtility ome(OneMinusExp{d}, dom);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(dom.lo, dom.hi);
  for (int k = 0; k < 20; ++k) {
    const double y = u(rng);
    const double a = dom.lo, b = dom.hi;
    EXPECT_NEAR(inc(y), (std::exp(d * y) - std::exp(d * a)) / (std::exp(d * b) - std::exp(d * a)), 1e-14);
    EXPECT_NEAR(dec(y), (std::exp(-d * y) - std::exp(-d * b)) / (std::exp(-d * a) - std::exp(-d * b)), 1e-14);
    EXPECT_NEAR(ome(y), (std::exp(d * b) - std::exp(d * y)) / (std::exp(d * b) - std::exp(d * a)), 1e-14);
    const std::vector<double> pt = {0.0, y};
    EXPECT_NEAR(inc.as_expr(2).evaluate(pt), inc(y), 1e-13);
    EXPECT_NEAR(dec.as_expr(2).evaluate(pt), dec(y), 1e-13);
    EXPECT_NEAR(ome.as_expr(2).evaluate(pt), ome(y), 1e-13);
  }
  EXPECT_EQ(inc.argmax(), dom.hi);
  EXPECT_EQ(dec.argmax(), dom.lo);
  EXPECT_EQ(ome.argmin(), dom.hi);
  EXPECT_NEAR(inc(dom.hi), 1.0, 1e-15);
  EXPECT_NEAR(dec(dom.hi), 0.0, 1e-15);
}

TEST(NormalizedUtility, MonotoneFormsExtrapolate) {
  const NormalizedUtility inc(ExpIncreasing{0.5}, {0.0, 1.0});
  EXPECT_GT(inc(2.0), 1.0);
  EXPECT_LT(inc(-1.0), 0.0);
}

TEST(NormalizedUtility, FlatFormsAreDegenerate) {
  try {
    normalize_utility(ExpIncreasing{0.0}, {0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateUtility);
  }
  EXPECT_THROW(normalize_utility(TabularUtility{{0.3, 0.3}}, {0.0, 1.0}, {0.0, 1.0}), Error);
  EXPECT_THROW(normalize_utility(ExpIncreasing{1e3}, {0.0, 1e3}), Error);
}

TEST(NormalizedUtility, TabularNeedsSupportPoints) {
  const NormalizedUtility t(TabularUtility{{0.2, 0.6, 1.0}}, {0.0, 10.0}, {1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(t(1.0), 0.0);
  EXPECT_DOUBLE_EQ(t(2.0), 0.5);
  EXPECT_DOUBLE_EQ(t(3.0), 1.0);
  EXPECT_EQ(t.argmax(), 3.0);
  try {
    (void)t(2.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfDomain);
  }
  EXPECT_THROW((void)t.as_expr(1), Error);
}

TEST(Model, FoodModelShape) {
  const DecisionModel m = food();
  EXPECT_EQ(m.size(), 4);
  EXPECT_EQ(m.decisions, (std::vector<std::string>{"d0", "d1", "d2"}));
  EXPECT_EQ(m.decision_index("d2"), 2);
  EXPECT_THROW((void)m.decision_index("d9"), Error);
  EXPECT_EQ(m.utilities[3].size(), 4u);
  EXPECT_EQ(m.corner_weights.size(), 16u);
  // shared social cohesion distribution
  EXPECT_EQ(m.cpd(0, 3), m.cpd(2, 3));
  EXPECT_TRUE(validate_model(m).clean());
}

TEST(Model, UtilityAndDisutilitySumToOne) {
  const DecisionModel m = food();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 1; i <= m.size(); ++i) {
    const LabeledTable t = conditional_utility_vector(m, i);
    auto scope = m.deun.util_parents(i);
    scope.push_back(i);
    std::sort(scope.begin(), scope.end());
    ASSERT_EQ(t.scope(), scope);
    const std::vector<double> y = {u(rng), u(rng), u(rng), u(rng)};
    for (std::uint64_t k = 0; k < t.size(); ++k) {
      const CornerConfig c = t.config(k);
      if (c.is_star(i)) continue;
      const std::uint64_t star = k | (std::uint64_t{1} << (scope.size() - 1 -
                                      (std::find(scope.begin(), scope.end(), i) - scope.begin())));
      ASSERT_TRUE(t.config(star).is_star(i));
      EXPECT_NEAR(t[k].evaluate(y) + t[star].evaluate(y), 1.0, 1e-12);
    }
  }
}

TEST(Model, StarEntryIsTheConditionalUtility) {
  const DecisionModel m = food();
  const LabeledTable t = conditional_utility_vector(m, 2);
  const std::vector<double> y = {0.0, 30.0};
  const NormalizedUtility given_zero = m.normalized_utility(2, 0);
  const NormalizedUtility given_star = m.normalized_utility(2, 1);
  EXPECT_NEAR(t.at(CornerConfig::from_key({1, 2}, "0*")).evaluate(y), given_zero(30.0), 1e-14);
  EXPECT_NEAR(t.at(CornerConfig::from_key({1, 2}, "**")).evaluate(y), given_star(30.0), 1e-14);
  EXPECT_NEAR(t.at(CornerConfig::from_key({1, 2}, "*0")).evaluate(y), 1.0 - given_star(30.0), 1e-14);
}

TEST(Validation, MonotonicityViolationNamesBothConfigs) {
  DecisionModel m = food();
  m.corner_weights[key_to_index("**00")] = 0.1;
  const auto r = validate_model(m);
  EXPECT_FALSE(r.clean());
  bool found = false;
  for (const auto& i : r.issues) {
    if (i.kind != IssueKind::MonotonicityViolation) continue;
    if (i.message.find("'**00'") != std::string::npos &&
        i.message.find("'*000'") != std::string::npos) {
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Validation, TiesAreWarnings) {
  DecisionModel m = food();
  m.corner_weights[key_to_index("000*")] = 0.0;
  const auto r = validate_model(m);
  EXPECT_TRUE(r.clean());
  EXPECT_TRUE(has_issue(r, IssueKind::StrictnessTie, Issue::Severity::Warning));
  EXPECT_EQ(r.error_count(), 0u);
}

TEST(Validation, ReportsEveryProblem) {
  DecisionModel m = food();
  m.cpds[1][0].reset();
  m.utilities[3][2].reset();
  m.attributes[0].ref_star = 50.0;
  std::get<LinearGaussian>(*m.cpds[0][1]).sigma = -1.0;
  const auto r = validate_model(m);
  EXPECT_TRUE(has_issue(r, IssueKind::CompletenessViolation));
  EXPECT_TRUE(has_issue(r, IssueKind::ReferenceMismatch));
  EXPECT_TRUE(has_issue(r, IssueKind::InvalidCpd));
  EXPECT_GE(r.error_count(), 4u);
  EXPECT_THROW(require_valid(m), ModelValidationError);
}

TEST(Validation, GaussianParentsMustMatchEdges) {
  DecisionModel m = food();
  std::get<LinearGaussian>(*m.cpds[0][3]).coefficients[2] = 1.0;  // cost has no parents
  EXPECT_TRUE(has_issue(validate_model(m), IssueKind::ParentMismatch));
}

TEST(Validation, ReferenceValuesAreDerivable) {
  DecisionModel m = food();
  for (auto& a : m.attributes) std::swap(a.ref_zero, a.ref_star);
  EXPECT_FALSE(validate_model(m).clean());
  derive_reference_values(m);
  EXPECT_TRUE(validate_model(m).clean());
  EXPECT_EQ(m.attribute(4).ref_star, -100.0);
}

TEST(Model, DecomposeAddsZeroCoefficients) {
  const DecisionModel m = food();
  const DecisionModel d = decompose_model(m);
  EXPECT_TRUE(is_decomposable(d.deun).decomposable);
  EXPECT_EQ(d.deun.prob_edges(), (EdgeSet{{1, 2}, {1, 3}, {1, 4}, {2, 4}}));
  const auto& cost = std::get<LinearGaussian>(d.cpd(1, 4));
  EXPECT_EQ(cost.coefficients.at(1), 0.0);
  EXPECT_EQ(cost.coefficients.at(2), 0.0);
  EXPECT_EQ(cost.intercept, std::get<LinearGaussian>(m.cpd(1, 4)).intercept);
  EXPECT_TRUE(validate_model(d).clean());
}

TEST(Model, RelabelMovesEveryTable) {
  const DecisionModel m = food();
  const DecisionModel r = relabel_model(m, {1, 2, 4, 3});
  EXPECT_EQ(r.attribute(3).name, "cost");
  EXPECT_EQ(r.attribute(4).name, "social_cohesion");
  EXPECT_EQ(r.deun.util_parents(3), (std::vector<int>{1, 2}));
  EXPECT_EQ(*r.corner_weights[key_to_index("000*")], *m.corner_weights[key_to_index("00*0")]);
  EXPECT_EQ(*r.corner_weights[key_to_index("0**0")], *m.corner_weights[key_to_index("0*0*")]);
  EXPECT_EQ(r.cpd(1, 4), m.cpd(1, 3));
  EXPECT_EQ(r.utility(3, 1), m.utility(4, 1));
  EXPECT_TRUE(validate_model(r).clean());
}

TEST(Model, RelabelRejectsReversedEdges) {
  EXPECT_THROW(relabel_model(food(), {2, 1, 3, 4}), Error);
  EXPECT_THROW(relabel_model(food(), {1, 1, 3, 4}), Error);
}
