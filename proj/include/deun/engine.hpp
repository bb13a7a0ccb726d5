#pragma once

// Expected utility of a decision: backward induction over attributes, and
// leaf absorption over the junction tree of a decomposable network.
//
// Linear-Gaussian distributions with exponential utility forms are
// integrated in closed form; tabular distributions with tabular utilities
// by finite sums. Any other mix is UnsupportedCombination.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deun/labeled_table.hpp"
#include "deun/model.hpp"

namespace deun {

enum class Method { Theorem1, JunctionTree };

std::string_view to_string(Method method);
/// "theorem1" or "jtree"; InvalidArgument otherwise.
Method parse_method(std::string_view name);
/// Junction tree when the structure is decomposable, backward induction otherwise.
Method default_method(const DecisionModel& model);

/// Throws unless order is a permutation of 1..n listing every probabilistic
/// child before its parents (OrderingViolated names the offending edge).
void check_integration_order(const Deun& deun, const std::vector<int>& order);

struct Theorem1Trace {
  std::vector<int> order;
  // Accumulated table after integrating order[k]; closed-form models only.
  std::vector<LabeledTable> tables;
};

/// Backward induction. The default order is n, n-1, ..., 1.
double theorem1_eu(const DecisionModel& model, int decision,
                   const std::optional<std::vector<int>>& order = std::nullopt,
                   Theorem1Trace* trace = nullptr);
double theorem1_eu(const DecisionModel& model, const std::string& decision,
                   const std::optional<std::vector<int>>& order = std::nullopt,
                   Theorem1Trace* trace = nullptr);

struct JtreeStats {
  int cliques = 0;
  std::vector<int> absorption_order;  // clique indices, leaves first
  std::size_t max_table_entries = 0;
  std::size_t max_entry_size = 0;  // terms per expression, or factor cells
};

/// Junction-tree absorption; NotDecomposable unless the structure is decomposable.
double jtree_eu(const DecisionModel& model, int decision, JtreeStats* stats = nullptr);
double jtree_eu(const DecisionModel& model, const std::string& decision,
                JtreeStats* stats = nullptr);

double expected_utility(const DecisionModel& model, int decision, Method method);

struct RankedDecision {
  std::string decision;
  double eu = 0.0;
};

/// Descending by expected utility; ties keep declaration order.
std::vector<RankedDecision> rank_decisions(const DecisionModel& model, Method method);

/// One factor of a monomial: u(y_i | parents) or its disutility 1 - u.
struct ExpansionFactor {
  int attribute = 0;
  bool disutility = false;
  CornerConfig parents;  // corner bits of the utility parents
};

struct Monomial {
  CornerConfig corner;  // over all attributes
  double weight = 0.0;  // corner weight of this configuration
  std::vector<ExpansionFactor> factors;  // ascending attribute order

  int indeterminates() const noexcept { return static_cast<int>(factors.size()) + 1; }
};

inline constexpr int kDefaultExpansionCap = 24;

/// All 2^n monomials in canonical corner order; ExpansionTooLarge beyond cap.
std::vector<Monomial> utility_expansion(const DecisionModel& model,
                                        int cap = kDefaultExpansionCap);

/// Pointwise u(y) as the weighted sum over corners of products of
/// conditional utilities and disutilities.
class UtilityEvaluator {
 public:
  enum class Domain {
    Strict,       // OutOfDomain for any y_i outside its domain
    Extrapolate,  // analytic forms evaluated as they are
    Clamp,        // y_i clamped into its domain first
  };

  explicit UtilityEvaluator(const DecisionModel& model, Domain mode = Domain::Strict);

  int size() const noexcept { return n_; }
  /// y[i - 1] is the value of attribute i.
  double operator()(std::span<const double> y) const;
  /// Products of the factors per corner, weights stripped, in canonical order.
  std::vector<double> corner_products(std::span<const double> y) const;

 private:
  void factor_values(std::span<const double> y, std::vector<std::vector<double>>& u) const;

  int n_ = 0;
  Domain mode_;
  std::vector<Interval> domains_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<NormalizedUtility>> forms_;  // [i - 1][parent config]
  std::vector<double> weights_;
};

double evaluate_utility_pointwise(const DecisionModel& model, std::span<const double> y);

}  // namespace deun
