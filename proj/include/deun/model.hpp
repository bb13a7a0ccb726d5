#pragma once

// The elicited decision model: attributes, per-decision conditional
// distributions, conditional utility forms per parent corner configuration,
// and the corner-weight table.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "deun/corner.hpp"
#include "deun/discrete_factor.hpp"
#include "deun/expr.hpp"
#include "deun/graph.hpp"
#include "deun/labeled_table.hpp"

namespace deun {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double y) const noexcept { return lo <= y && y <= hi; }
  double clamp(double y) const noexcept { return y < lo ? lo : (y > hi ? hi : y); }
  bool operator==(const Interval&) const = default;
};

struct Attribute {
  int index = 0;
  std::string name;
  Interval domain;
  double ref_zero = 0.0;
  double ref_star = 0.0;

  bool operator==(const Attribute&) const = default;
};

/// y_i ~ N(intercept + sum_j coefficients[j] * y_j, sigma^2)
struct LinearGaussian {
  double intercept = 0.0;
  std::map<int, double> coefficients;  // parent index -> coefficient
  double sigma = 1.0;

  LinForm mean() const;
  bool operator==(const LinearGaussian&) const = default;
};

/// Finite conditional table. Rows enumerate parent grid combinations with
/// parents in ascending index order and the last parent varying fastest.
struct TabularCpd {
  std::vector<double> support;
  std::map<int, std::vector<double>> parent_grids;
  std::vector<std::vector<double>> rows;

  std::vector<int> parents() const;
  bool operator==(const TabularCpd&) const = default;
};

using Cpd = std::variant<LinearGaussian, TabularCpd>;

struct ExpIncreasing {  // e^{delta y}
  double delta = 0.0;
  bool operator==(const ExpIncreasing&) const = default;
};
struct ExpDecreasing {  // e^{-delta y}
  double delta = 0.0;
  bool operator==(const ExpDecreasing&) const = default;
};
struct OneMinusExp {  // 1 - e^{delta y}
  double delta = 0.0;
  bool operator==(const OneMinusExp&) const = default;
};
struct TabularUtility {  // one value per support point of the attribute
  std::vector<double> values;
  bool operator==(const TabularUtility&) const = default;
};

using UtilityForm = std::variant<ExpIncreasing, ExpDecreasing, OneMinusExp, TabularUtility>;

std::string_view form_name(const UtilityForm& form);
bool is_tabular(const UtilityForm& form);
bool is_tabular(const Cpd& cpd);

/// A utility form rescaled to [0, 1] over its domain: u = (raw - m) / (M - m).
class NormalizedUtility {
 public:
  NormalizedUtility(UtilityForm form, Interval domain, std::vector<double> support = {});

  const UtilityForm& form() const noexcept { return form_; }
  double min_raw() const noexcept { return m_; }
  double max_raw() const noexcept { return M_; }

  /// Analytic value; monotone forms extrapolate beyond the domain.
  /// Tabular forms need y to be one of the support points (OutOfDomain otherwise).
  double operator()(double y) const;

  /// c0 + c1 * e^{s y_attribute}; InvalidArgument for tabular forms.
  ExpLinExpr as_expr(int attribute) const;

  /// Values at the given points.
  std::vector<double> values_at(const std::vector<double>& points) const;

  /// Domain endpoint (or support point) where the value is 1, and where it is 0.
  double argmax() const noexcept { return argmax_; }
  double argmin() const noexcept { return argmin_; }

 private:
  double raw(double y) const;

  UtilityForm form_;
  Interval domain_;
  std::vector<double> support_;
  double m_ = 0.0;
  double M_ = 1.0;
  double argmax_ = 0.0;
  double argmin_ = 0.0;
};

/// Throws DegenerateUtility when the form is flat over the domain.
NormalizedUtility normalize_utility(const UtilityForm& form, const Interval& domain,
                                    const std::vector<double>& support = {});

class DecisionModel {
 public:
  Deun deun;
  std::vector<Attribute> attributes;   // attributes[i - 1].index == i
  std::vector<std::string> decisions;
  // cpds[d][i - 1]; empty slots are reported by validate_model.
  std::vector<std::vector<std::optional<Cpd>>> cpds;
  // utilities[i - 1][config index over util_parents(i)]
  std::vector<std::vector<std::optional<UtilityForm>>> utilities;
  // corner_weights[config index over 1..n]
  std::vector<std::optional<double>> corner_weights;

  int size() const noexcept { return deun.size(); }
  /// InvalidArgument for an unknown label.
  int decision_index(const std::string& label) const;
  const Attribute& attribute(int i) const { return attributes.at(i - 1); }

  /// Throw ValidationError for missing entries.
  const Cpd& cpd(int decision, int i) const;
  const UtilityForm& utility(int i, std::uint64_t config) const;
  double corner_weight(std::uint64_t config) const;

  /// Support shared by every decision's tabular CPD of attribute i, if any.
  std::optional<std::vector<double>> support(int i) const;

  /// Normalized form for attribute i under a parent corner config.
  NormalizedUtility normalized_utility(int i, std::uint64_t config) const;

  std::vector<int> all_attributes() const;

  bool operator==(const DecisionModel&) const = default;
};

/// Sizes every table for n attributes and the given edges, all slots empty.
DecisionModel make_empty_model(const Deun& deun, std::vector<Attribute> attributes,
                               std::vector<std::string> decisions);

enum class IssueKind {
  Structural,
  CompletenessViolation,
  MonotonicityViolation,
  StrictnessTie,
  KeyLengthMismatch,
  ParentMismatch,
  InvalidAttribute,
  InvalidCpd,
  InvalidUtility,
  DegenerateUtility,
  ReferenceMismatch,
  UnknownName,
  Malformed,
};

std::string_view to_string(IssueKind kind);

struct Issue {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  IssueKind kind = IssueKind::Malformed;
  std::string path;     // key path inside the model document
  std::string message;

  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool clean() const;  // no errors; warnings allowed
  std::size_t error_count() const;
  std::size_t warning_count() const;
  void add(Issue::Severity severity, IssueKind kind, std::string path, std::string message);

  bool operator==(const ValidationReport&) const = default;
};

class ModelValidationError : public Error {
 public:
  explicit ModelValidationError(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Every violation, not just the first.
ValidationReport validate_model(const DecisionModel& model);

/// Throws ModelValidationError unless validate_model is clean.
void require_valid(const DecisionModel& model);

/// Sets each attribute's reference values to the endpoints its config-0
/// utility form maps to 1 (ref_star) and 0 (ref_zero).
void derive_reference_values(DecisionModel& model);

/// ū_i: scope {i} ∪ Π_i^u; star entries hold u(y_i | config), zero entries 1 - u.
LabeledTable conditional_utility_vector(const DecisionModel& model, int i);

/// Same table with entries as factors over the support of attribute i.
BasicLabeledTable<DiscreteFactor> conditional_utility_factors(const DecisionModel& model, int i);

/// make_decomposable on the structure; new Gaussian parents get coefficient 0
/// and tabular rows are replicated across each new parent's grid.
DecisionModel decompose_model(const DecisionModel& model);

/// Relabels attribute i as perm[i - 1] (a permutation of 1..n). Every edge
/// must still point from lower to higher index; InvalidArgument otherwise.
DecisionModel relabel_model(const DecisionModel& model, const std::vector<int>& perm);

}  // namespace deun
