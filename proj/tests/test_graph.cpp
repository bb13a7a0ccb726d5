#include <gtest/gtest.h>

#include <algorithm>

#include "deun/corner.hpp"
#include "deun/graph.hpp"
#include "support/random_models.hpp"

using namespace deun;

namespace {

const EdgeSet kFiveVertexProb = {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {1, 5}};
const EdgeSet kDiagramUtil = {{1, 5}, {1, 2}, {1, 3}, {1, 4}, {2, 4}};

Deun five_vertex() { return validate_deun(5, kFiveVertexProb, kDiagramUtil); }

}  // namespace

TEST(Graph, ParentsAndChildren) {
  const Deun g = five_vertex();
  EXPECT_EQ(g.prob_parents(3), (std::vector<int>{1, 2}));
  EXPECT_EQ(g.prob_parents(1), std::vector<int>{});
  EXPECT_EQ(g.prob_children(2), (std::vector<int>{3, 4}));
  EXPECT_EQ(g.util_parents(4), (std::vector<int>{1, 2}));
  EXPECT_TRUE(g.has_prob_path(1, 4));
  EXPECT_FALSE(g.has_prob_path(3, 4));
  EXPECT_TRUE(g.prob_adjacent(5, 1));
}

TEST(Graph, ValidationCollectsEveryViolation) {
  try {
    validate_deun(4, {{2, 2}, {3, 1}}, {{4, 2}});
    FAIL() << "expected DeunValidationError";
  } catch (const DeunValidationError& e) {
    ASSERT_EQ(e.violations().size(), 3u);
    EXPECT_EQ(e.violations()[0].kind, ErrorKind::SelfLoop);
    EXPECT_EQ(e.violations()[1].kind, ErrorKind::OrderingViolated);
    EXPECT_EQ(e.violations()[2].edge_kind, EdgeKind::Utility);
  }
}

TEST(Graph, ReversedUtilityEdgeIsRejected) {
  // a utility edge pointing from a later to an earlier attribute
  EXPECT_THROW(validate_deun(4, {{1, 2}, {1, 3}}, {{1, 2}, {4, 1}}), DeunValidationError);
}

TEST(Graph, FiveVertexCliquesAndSeparators) {
  const CliqueSet cs = enumerate_cliques(five_vertex());
  ASSERT_EQ(cs.size(), 3);
  EXPECT_EQ(cs.cliques[0], (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(cs.cliques[1], (std::vector<int>{2, 4}));
  EXPECT_EQ(cs.cliques[2], (std::vector<int>{1, 5}));
  EXPECT_TRUE(cs.separators[0].empty());
  EXPECT_EQ(cs.separators[1], std::vector<int>{2});
  EXPECT_EQ(cs.separators[2], std::vector<int>{1});
  EXPECT_FALSE(cs.rip_parent[0].has_value());
  EXPECT_EQ(cs.rip_parent[1], 0);
  EXPECT_EQ(cs.rip_parent[2], 0);
}

TEST(Graph, FiveVertexJunctionTree) {
  const JunctionTree jt = build_junction_tree(five_vertex());
  std::vector<std::pair<int, int>> edges = jt.edges;
  std::sort(edges.begin(), edges.end());
  EXPECT_EQ(edges, (std::vector<std::pair<int, int>>{{0, 1}, {0, 2}}));
  EXPECT_EQ(jt.roots(), std::vector<int>{0});
  EXPECT_EQ(jt.family_assignment, (std::vector<int>{0, 0, 0, 1, 2}));
  EXPECT_EQ(jt.assigned_vertices(0), (std::vector<int>{1, 2, 3}));
}

TEST(Graph, FiveVertexIsDecomposable) { EXPECT_TRUE(is_decomposable(five_vertex()).decomposable); }

TEST(Graph, ExtraUtilityEdgeNeedsOneProbabilisticEdge) {
  EdgeSet util = kDiagramUtil;
  util.insert({2, 5});
  const Deun g = validate_deun(5, kFiveVertexProb, util);
  const auto r = is_decomposable(g);
  ASSERT_FALSE(r.decomposable);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->condition, DecomposabilityWitness::Condition::UtilityEdgeWithoutPath);
  EXPECT_EQ(r.witness->a, 2);
  EXPECT_EQ(r.witness->b, 5);

  const Deun fixed = make_decomposable(g);
  EdgeSet expected = kFiveVertexProb;
  expected.insert({2, 5});
  EXPECT_EQ(fixed.prob_edges(), expected);
  EXPECT_EQ(fixed.util_edges(), util);
  EXPECT_TRUE(is_decomposable(fixed).decomposable);
}

TEST(Graph, UnjoinedCoParentsAreWitnessed) {
  const Deun g = validate_deun(3, {{1, 3}, {2, 3}}, {});
  const auto r = is_decomposable(g);
  ASSERT_FALSE(r.decomposable);
  EXPECT_EQ(r.witness->condition, DecomposabilityWitness::Condition::UnjoinedCoParents);
  EXPECT_EQ(r.witness->child, 3);
  EXPECT_EQ(make_decomposable(g).prob_edges(), (EdgeSet{{1, 2}, {1, 3}, {2, 3}}));
}

TEST(Graph, FillReachesFixpoint) {
  // joining 2 and 3 under 4 creates a new v-structure at 3 with parent 1
  const Deun g = validate_deun(4, {{1, 3}, {2, 4}, {3, 4}}, {});
  const Deun fixed = make_decomposable(g);
  EXPECT_TRUE(is_decomposable(fixed).decomposable);
  EXPECT_TRUE(fixed.prob_adjacent(1, 2));
}

TEST(Graph, DisconnectedSkeletonGivesForest) {
  const Deun g = validate_deun(4, {{1, 2}, {3, 4}}, {});
  const JunctionTree jt = build_junction_tree(g);
  EXPECT_EQ(jt.clique_set.size(), 2);
  EXPECT_EQ(jt.roots(), (std::vector<int>{0, 1}));
  EXPECT_TRUE(jt.edges.empty());
}

TEST(Graph, IsolatedVerticesGetTheirOwnCliques) {
  const Deun g = validate_deun(3, {}, {});
  const CliqueSet cs = enumerate_cliques(g);
  EXPECT_EQ(cs.size(), 3);
}

TEST(GraphProperty, CliquesMatchBruteForce) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const Deun g = gen::random_structure(rng, n, {0.45, 0.3, true});
    auto got = enumerate_cliques(g).cliques;
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, gen::brute_force_cliques(g)) << "trial " << trial;
  }
}

TEST(GraphProperty, DecomposedStructuresSatisfyRunningIntersection) {
  gen::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const Deun raw = gen::random_structure(rng, n, {0.35, 0.35, false});
    const Deun g = make_decomposable(raw);
    ASSERT_TRUE(is_decomposable(g).decomposable);
    // original edges kept
    for (const auto& e : raw.prob_edges()) EXPECT_TRUE(g.prob_edges().count(e));
    EXPECT_EQ(make_decomposable(g), g);

    const CliqueSet cs = enumerate_cliques(g);
    for (int i = 1; i < cs.size(); ++i) {
      std::vector<int> earlier;
      for (int j = 0; j < i; ++j) earlier = scope_union(earlier, cs.cliques[j]);
      std::vector<int> sep;
      std::set_intersection(cs.cliques[i].begin(), cs.cliques[i].end(), earlier.begin(),
                            earlier.end(), std::back_inserter(sep));
      EXPECT_EQ(sep, cs.separators[i]);
      if (sep.empty()) {
        EXPECT_FALSE(cs.rip_parent[i].has_value());
      } else {
        ASSERT_TRUE(cs.rip_parent[i].has_value());
        const auto& parent = cs.cliques[*cs.rip_parent[i]];
        EXPECT_TRUE(std::includes(parent.begin(), parent.end(), sep.begin(), sep.end()));
      }
    }
    // every family inside its assigned clique
    const JunctionTree jt = build_junction_tree(g);
    for (int v = 1; v <= n; ++v) {
      auto fam = g.prob_parents(v);
      fam.push_back(v);
      std::sort(fam.begin(), fam.end());
      const auto& c = jt.clique_set.cliques[jt.family_assignment[v - 1]];
      EXPECT_TRUE(std::includes(c.begin(), c.end(), fam.begin(), fam.end()));
    }
  }
}
