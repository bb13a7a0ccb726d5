#pragma once

// Dual-edge DAGs over attributes 1..n: probabilistic edges and utility
// independence edges, decomposability, cliques and junction trees.

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "deun/errors.hpp"

namespace deun {

struct Edge {
  int from = 0;
  int to = 0;

  auto operator<=>(const Edge&) const = default;
};

using EdgeSet = std::set<Edge>;

enum class EdgeKind { Probabilistic, Utility };

std::string_view to_string(EdgeKind kind);

struct StructuralViolation {
  ErrorKind kind;          // SelfLoop, OrderingViolated or CycleDetected
  EdgeKind edge_kind;
  std::vector<int> vertices;  // the edge, or the cycle as a closed walk
  std::string message;
};

class DeunValidationError : public Error {
 public:
  explicit DeunValidationError(std::vector<StructuralViolation> violations);

  const std::vector<StructuralViolation>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<StructuralViolation> violations_;
};

/// Directed expected utility network skeleton: vertices 1..n carrying a
/// probabilistic edge set and a utility edge set.
class Deun {
 public:
  Deun() = default;

  /// No structural checks; pair with check_deun() or use validate_deun().
  static Deun from_edges_unchecked(int n, EdgeSet prob_edges, EdgeSet util_edges);

  int size() const noexcept { return n_; }
  const EdgeSet& prob_edges() const noexcept { return prob_; }
  const EdgeSet& util_edges() const noexcept { return util_; }

  /// Sorted ascending.
  std::vector<int> prob_parents(int v) const;
  std::vector<int> util_parents(int v) const;
  std::vector<int> prob_children(int v) const;

  /// Directed path i -> ... -> j along probabilistic edges (i != j).
  bool has_prob_path(int i, int j) const;

  /// Skeleton adjacency of the probabilistic edge set.
  bool prob_adjacent(int i, int j) const;

  bool operator==(const Deun&) const = default;

 private:
  int n_ = 0;
  EdgeSet prob_;
  EdgeSet util_;
};

/// All structural violations: self loops, edges with i >= j, directed cycles.
std::vector<StructuralViolation> check_deun(int n, const EdgeSet& prob_edges,
                                            const EdgeSet& util_edges);

/// Throws DeunValidationError listing every violation; n must be positive.
Deun validate_deun(int n, EdgeSet prob_edges, EdgeSet util_edges);

struct DecomposabilityWitness {
  enum class Condition {
    UnjoinedCoParents,       // parents a, b of child share no probabilistic edge
    UtilityEdgeWithoutPath,  // utility edge (a, b) has no probabilistic path a -> b
  };
  Condition condition;
  int a = 0;
  int b = 0;
  int child = 0;  // only for UnjoinedCoParents
};

struct DecomposabilityResult {
  bool decomposable = true;
  std::optional<DecomposabilityWitness> witness;

  explicit operator bool() const noexcept { return decomposable; }
};

DecomposabilityResult is_decomposable(const Deun& deun);

/// Adds unshadowed utility edges and co-parent fill edges to the
/// probabilistic edge set, iterated to a fixpoint. Utility edges are untouched.
Deun make_decomposable(const Deun& deun);

struct CliqueSet {
  std::vector<std::vector<int>> cliques;     // each sorted ascending
  std::vector<std::vector<int>> separators;  // separators[0] is empty
  // Index j < i with separators[i] inside cliques[j]; empty separator => new component.
  std::vector<std::optional<int>> rip_parent;

  int size() const noexcept { return static_cast<int>(cliques.size()); }
};

/// Maximal cliques of the probabilistic skeleton ordered by maximum
/// cardinality search (start at vertex 1, ties to the lowest index).
CliqueSet enumerate_cliques(const Deun& deun);

struct JunctionTree {
  CliqueSet clique_set;
  std::vector<std::pair<int, int>> edges;  // (parent clique, child clique), 0-based
  std::vector<int> family_assignment;      // vertex v -> clique index at [v - 1]

  std::vector<int> roots() const;
  std::vector<int> children(int clique) const;
  /// Vertices assigned to the clique, ascending.
  std::vector<int> assigned_vertices(int clique) const;
};

JunctionTree build_junction_tree(const Deun& deun);

}  // namespace deun
