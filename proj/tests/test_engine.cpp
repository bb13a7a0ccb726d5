#include <gtest/gtest.h>

#include <cmath>

#include "deun/engine.hpp"
#include "deun/model_io.hpp"
#include "deun/oracle.hpp"
#include "support/random_models.hpp"

using namespace deun;

namespace {

DecisionModel food() { return parse_model(DEUN_MODELS_DIR "/food_security.json"); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;  // nothing thrown; never expected by the callers
}

}  // namespace

TEST(Engine, FoodWalkthroughOrderMatchesDefault) {
  const DecisionModel m = food();
  for (int d = 0; d < 3; ++d) {
    const double def = theorem1_eu(m, d);
    EXPECT_NEAR(theorem1_eu(m, d, std::vector<int>{2, 3, 1, 4}), def, 1e-12);
    EXPECT_NEAR(theorem1_eu(m, d, std::vector<int>{4, 3, 2, 1}), def, 1e-12);
  }
}

TEST(Engine, EducationStepIsTheGaussianMgf) {
  const DecisionModel m = food();
  Theorem1Trace trace;
  theorem1_eu(m, 1, std::vector<int>{2, 3, 1, 4}, &trace);
  ASSERT_EQ(trace.tables.size(), 4u);
  const LabeledTable& ue = trace.tables[0];
  EXPECT_EQ(ue.scope(), (std::vector<int>{1, 2}));

  const auto& g = std::get<LinearGaussian>(m.cpd(1, 2));
  const Interval dom = m.attribute(2).domain;
  const double y1 = 12.5;
  const std::vector<double> y = {y1};
  for (const char* key : {"00", "0*", "*0", "**"}) {
    const bool parent_star = key[0] == '*';
    const double delta = std::get<ExpIncreasing>(m.utility(2, parent_star ? 1 : 0)).delta;
    // E[(e^{dY} - e^{da}) / (e^{db} - e^{da})] with Y ~ N(t0 + t1 y1, s^2)
    const double mgf = std::exp(delta * (g.intercept + g.coefficients.at(1) * y1) +
                                0.5 * delta * delta * g.sigma * g.sigma);
    const double lo = std::exp(delta * dom.lo), hi = std::exp(delta * dom.hi);
    const double eu = (mgf - lo) / (hi - lo);
    const double expected = key[1] == '*' ? eu : 1.0 - eu;
    EXPECT_NEAR(ue.at(CornerConfig::from_key({1, 2}, key)).evaluate(y), expected, 1e-12) << key;
  }
  EXPECT_EQ(trace.tables.back().scope(), (std::vector<int>{1, 2, 3, 4}));
  for (const auto& e : trace.tables.back().entries()) EXPECT_TRUE(e.is_constant());
}

TEST(Engine, IntegrationOrderMustRespectProbabilisticEdges) {
  const DecisionModel m = food();
  EXPECT_EQ(kind_of([&] { theorem1_eu(m, 0, std::vector<int>{1, 2, 3, 4}); }),
            ErrorKind::OrderingViolated);
  EXPECT_EQ(kind_of([&] { theorem1_eu(m, 0, std::vector<int>{2, 3, 1}); }),
            ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { theorem1_eu(m, 0, std::vector<int>{2, 2, 1, 4}); }),
            ErrorKind::InvalidArgument);
  // cost only has utility parents, so it may come last
  EXPECT_NO_THROW(check_integration_order(m.deun, {3, 2, 1, 4}));
}

TEST(Engine, JunctionTreeNeedsDecomposableStructure) {
  const DecisionModel m = food();
  EXPECT_EQ(default_method(m), Method::Theorem1);
  EXPECT_EQ(kind_of([&] { jtree_eu(m, 0); }), ErrorKind::NotDecomposable);
}

TEST(Engine, DecompositionPreservesExpectedUtility) {
  const DecisionModel m = food();
  const DecisionModel d = decompose_model(m);
  EXPECT_EQ(default_method(d), Method::JunctionTree);
  for (int k = 0; k < 3; ++k) {
    JtreeStats stats;
    const double jt = jtree_eu(d, k, &stats);
    EXPECT_NEAR(jt, theorem1_eu(m, k), 1e-12);
    EXPECT_NEAR(theorem1_eu(d, k), jt, 1e-12);
    EXPECT_EQ(stats.cliques, 2);
    EXPECT_EQ(stats.absorption_order.size(), 2u);
  }
}

TEST(Engine, FoodRanking) {
  const auto ranked = rank_decisions(food(), Method::Theorem1);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].decision, "d0");
  EXPECT_EQ(ranked[1].decision, "d2");
  EXPECT_EQ(ranked[2].decision, "d1");
  EXPECT_GT(ranked[0].eu, ranked[1].eu);
}

TEST(Engine, SingleAttributeClosedForm) {
  const Deun s = validate_deun(1, {}, {});
  DecisionModel m = make_empty_model(s, {{1, "x", {-2.0, 3.0}, -2.0, 3.0}}, {"only"});
  m.cpds[0][0] = LinearGaussian{0.4, {}, 0.7};
  m.utilities[0][0] = ExpIncreasing{0.6};
  m.corner_weights = {0.2, 0.9};
  const double lo = std::exp(0.6 * -2.0), hi = std::exp(0.6 * 3.0);
  const double eu = (std::exp(0.6 * 0.4 + 0.5 * 0.36 * 0.49) - lo) / (hi - lo);
  const double expected = 0.2 * (1.0 - eu) + 0.9 * eu;
  EXPECT_NEAR(theorem1_eu(m, 0), expected, 1e-14);
  EXPECT_NEAR(jtree_eu(m, 0), expected, 1e-14);
}

TEST(Engine, FlatCornerWeightsGiveThatWeight) {
  DecisionModel m = food();
  for (auto& w : m.corner_weights) w = 0.37;
  for (int d = 0; d < 3; ++d) EXPECT_NEAR(theorem1_eu(m, d), 0.37, 1e-12);
}

TEST(Engine, GaussianWithTabularUtilityIsUnsupported) {
  gen::Rng rng(31);
  const Deun s = validate_deun(2, {{1, 2}}, {});
  DecisionModel m = gen::random_tabular_model(rng, s, 3, 1);
  m.cpds[0][1] = LinearGaussian{0.0, {{1, 0.5}}, 1.0};
  EXPECT_EQ(kind_of([&] { theorem1_eu(m, 0); }), ErrorKind::UnsupportedCombination);
}

TEST(Engine, DiscreteModelsMatchEnumeration) {
  gen::Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const DecisionModel m = gen::random_tabular_model(rng, gen::random_structure(rng, n), 3, 1);
    const double exact = exact_discrete_eu(m, 0);
    EXPECT_NEAR(theorem1_eu(m, 0), exact, 1e-12) << "trial " << trial;
    const DecisionModel d = decompose_model(m);
    EXPECT_NEAR(jtree_eu(d, 0), exact, 1e-12) << "trial " << trial;
  }
}

TEST(EngineProperty, AlgorithmsAgreeOnRandomModels) {
  gen::Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const DecisionModel m =
        gen::random_gaussian_model(rng, gen::random_structure(rng, n, {0.4, 0.4, true}));
    for (int d = 0; d < 2; ++d) {
      EXPECT_NEAR(theorem1_eu(m, d), jtree_eu(m, d), 1e-9) << "trial " << trial;
    }
  }
}

TEST(EngineProperty, ExpectedUtilityWithinCornerWeightRange) {
  gen::Rng rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const DecisionModel m = gen::random_gaussian_model(rng, gen::random_structure(rng, n));
    double lo = 1.0, hi = 0.0;
    for (const auto& w : m.corner_weights) {
      lo = std::min(lo, *w);
      hi = std::max(hi, *w);
    }
    const double eu = theorem1_eu(m, 0);
    EXPECT_GE(eu, lo - 1e-9);
    EXPECT_LE(eu, hi + 1e-9);
  }
}

TEST(EngineProperty, RaisingACornerWeightNeverLowersExpectedUtility) {
  gen::Rng rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    DecisionModel m = gen::random_gaussian_model(rng, gen::random_structure(rng, n));
    const double before = theorem1_eu(m, 0);
    const std::uint64_t c = rng() % m.corner_weights.size();
    *m.corner_weights[c] += 0.05;
    EXPECT_GE(theorem1_eu(m, 0), before - 1e-12);
  }
}

TEST(EngineProperty, RelabelingLeavesExpectedUtilityUnchanged) {
  // 2 and 3 are unrelated in both edge sets, so they can swap labels
  gen::Rng rng(36);
  const Deun s = validate_deun(4, {{1, 2}, {1, 3}, {2, 4}}, {{1, 3}, {2, 4}});
  for (int trial = 0; trial < 10; ++trial) {
    const DecisionModel m = gen::random_gaussian_model(rng, s);
    const DecisionModel r = relabel_model(m, {1, 3, 2, 4});
    for (int d = 0; d < 2; ++d) {
      EXPECT_NEAR(theorem1_eu(r, d), theorem1_eu(m, d), 1e-12);
      EXPECT_NEAR(jtree_eu(r, d), jtree_eu(m, d), 1e-12);
    }
  }
}

TEST(UtilityEvaluator, StrictModeRejectsPointsOutsideTheDomain) {
  const DecisionModel m = food();
  const std::vector<double> inside = {10.0, -20.0, 0.0, 50.0};
  const std::vector<double> outside = {10.0, -200.0, 0.0, 50.0};
  EXPECT_NO_THROW(evaluate_utility_pointwise(m, inside));
  EXPECT_EQ(kind_of([&] { evaluate_utility_pointwise(m, outside); }), ErrorKind::OutOfDomain);
  const UtilityEvaluator clamp(m, UtilityEvaluator::Domain::Clamp);
  const std::vector<double> edge = {10.0, -100.0, 0.0, 50.0};
  EXPECT_DOUBLE_EQ(clamp(outside), evaluate_utility_pointwise(m, edge));
}

TEST(UtilityEvaluator, CornerValuesReproduceWeights) {
  const DecisionModel m = food();
  for (std::uint64_t c = 0; c < 16; ++c) {
    const CornerConfig cfg(m.all_attributes(), c);
    std::vector<double> y;
    for (int i = 1; i <= 4; ++i) {
      y.push_back(cfg.is_star(i) ? m.attribute(i).ref_star : m.attribute(i).ref_zero);
    }
    EXPECT_NEAR(evaluate_utility_pointwise(m, y), m.corner_weight(c), 1e-12) << cfg.key();
  }
}
