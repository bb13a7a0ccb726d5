#include "deun/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace deun {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kReferenceTolerance = 1e-12;

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};

std::vector<int> decode(std::size_t idx, const std::vector<int>& cards) {
  std::vector<int> states(cards.size(), 0);
  for (int k = static_cast<int>(cards.size()) - 1; k >= 0; --k) {
    states[k] = static_cast<int>(idx % cards[k]);
    idx /= cards[k];
  }
  return states;
}

std::size_t encode(const std::vector<int>& states, const std::vector<int>& cards) {
  std::size_t idx = 0;
  for (size_t k = 0; k < cards.size(); ++k) idx = idx * cards[k] + states[k];
  return idx;
}

std::size_t grid_rows(const TabularCpd& t) {
  std::size_t rows = 1;
  for (const auto& [p, g] : t.parent_grids) rows *= g.size();
  return rows;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string attr_name(const DecisionModel& m, int i) {
  if (i >= 1 && i <= static_cast<int>(m.attributes.size()) && !m.attributes[i - 1].name.empty()) {
    return m.attributes[i - 1].name;
  }
  return "y" + std::to_string(i);
}

}  // namespace

LinForm LinearGaussian::mean() const {
  return LinForm(intercept, {coefficients.begin(), coefficients.end()});
}

std::vector<int> TabularCpd::parents() const {
  std::vector<int> out;
  for (const auto& [p, g] : parent_grids) out.push_back(p);
  return out;
}

std::string_view form_name(const UtilityForm& form) {
  return std::visit(overloaded{
                        [](const ExpIncreasing&) { return std::string_view("exp_increasing"); },
                        [](const ExpDecreasing&) { return std::string_view("exp_decreasing"); },
                        [](const OneMinusExp&) { return std::string_view("one_minus_exp"); },
                        [](const TabularUtility&) { return std::string_view("tabular"); },
                    },
                    form);
}

bool is_tabular(const UtilityForm& form) { return std::holds_alternative<TabularUtility>(form); }
bool is_tabular(const Cpd& cpd) { return std::holds_alternative<TabularCpd>(cpd); }

NormalizedUtility::NormalizedUtility(UtilityForm form, Interval domain, std::vector<double> support)
    : form_(std::move(form)), domain_(domain), support_(std::move(support)) {
  if (const auto* t = std::get_if<TabularUtility>(&form_)) {
    if (support_.empty() || t->values.size() != support_.size()) {
      throw Error(ErrorKind::InvalidArgument, "tabular utility needs one value per support point");
    }
    auto [lo, hi] = std::minmax_element(t->values.begin(), t->values.end());
    m_ = *lo;
    M_ = *hi;
    argmin_ = support_[lo - t->values.begin()];
    argmax_ = support_[hi - t->values.begin()];
  } else {
    const double a = raw(domain_.lo);
    const double b = raw(domain_.hi);
    m_ = std::min(a, b);
    M_ = std::max(a, b);
    argmax_ = a >= b ? domain_.lo : domain_.hi;
    argmin_ = a >= b ? domain_.hi : domain_.lo;
  }
  if (!std::isfinite(m_) || !std::isfinite(M_) || !(M_ > m_)) {
    throw Error(ErrorKind::DegenerateUtility,
                std::string(form_name(form_)) + " utility is flat or not finite over the domain");
  }
}

double NormalizedUtility::raw(double y) const {
  return std::visit(overloaded{
                        [&](const ExpIncreasing& f) { return std::exp(f.delta * y); },
                        [&](const ExpDecreasing& f) { return std::exp(-f.delta * y); },
                        [&](const OneMinusExp& f) { return 1.0 - std::exp(f.delta * y); },
                        [&](const TabularUtility& f) {
                          auto it = std::find(support_.begin(), support_.end(), y);
                          if (it == support_.end()) {
                            throw Error(ErrorKind::OutOfDomain,
                                        "value " + fmt(y) + " is not a support point");
                          }
                          return f.values[it - support_.begin()];
                        },
                    },
                    form_);
}

double NormalizedUtility::operator()(double y) const { return (raw(y) - m_) / (M_ - m_); }

std::vector<double> NormalizedUtility::values_at(const std::vector<double>& points) const {
  std::vector<double> out;
  out.reserve(points.size());
  for (double y : points) out.push_back((*this)(y));
  return out;
}

ExpLinExpr NormalizedUtility::as_expr(int attribute) const {
  const double scale = 1.0 / (M_ - m_);
  const double shift = -m_ * scale;
  return std::visit(
      overloaded{
          [&](const ExpIncreasing& f) {
            return ExpLinExpr({{shift, LinForm{}}, {scale, LinForm::variable(attribute, f.delta)}});
          },
          [&](const ExpDecreasing& f) {
            return ExpLinExpr(
                {{shift, LinForm{}}, {scale, LinForm::variable(attribute, -f.delta)}});
          },
          [&](const OneMinusExp& f) {
            return ExpLinExpr(
                {{shift + scale, LinForm{}}, {-scale, LinForm::variable(attribute, f.delta)}});
          },
          [&](const TabularUtility&) -> ExpLinExpr {
            throw Error(ErrorKind::InvalidArgument, "tabular utilities have no exponential form");
          },
      },
      form_);
}

NormalizedUtility normalize_utility(const UtilityForm& form, const Interval& domain,
                                    const std::vector<double>& support) {
  return NormalizedUtility(form, domain, support);
}

int DecisionModel::decision_index(const std::string& label) const {
  auto it = std::find(decisions.begin(), decisions.end(), label);
  if (it == decisions.end()) throw Error(ErrorKind::InvalidArgument, "unknown decision '" + label + "'");
  return static_cast<int>(it - decisions.begin());
}

const Cpd& DecisionModel::cpd(int decision, int i) const {
  const auto& slot = cpds.at(decision).at(i - 1);
  if (!slot) {
    throw Error(ErrorKind::ValidationError, "no distribution for " + attr_name(*this, i) +
                                                " under decision " + decisions.at(decision));
  }
  return *slot;
}

const UtilityForm& DecisionModel::utility(int i, std::uint64_t config) const {
  const auto& slot = utilities.at(i - 1).at(config);
  if (!slot) throw Error(ErrorKind::ValidationError, "missing utility for " + attr_name(*this, i));
  return *slot;
}

double DecisionModel::corner_weight(std::uint64_t config) const {
  const auto& slot = corner_weights.at(config);
  if (!slot) throw Error(ErrorKind::ValidationError, "missing corner weight");
  return *slot;
}

std::optional<std::vector<double>> DecisionModel::support(int i) const {
  std::optional<std::vector<double>> shared;
  for (const auto& per_decision : cpds) {
    const auto& slot = per_decision.at(i - 1);
    if (!slot || !is_tabular(*slot)) return std::nullopt;
    const auto& s = std::get<TabularCpd>(*slot).support;
    if (shared && *shared != s) return std::nullopt;
    shared = s;
  }
  return shared;
}

NormalizedUtility DecisionModel::normalized_utility(int i, std::uint64_t config) const {
  const auto& form = utility(i, config);
  std::vector<double> pts;
  if (is_tabular(form)) {
    auto s = support(i);
    if (!s) {
      throw Error(ErrorKind::UnsupportedCombination,
                  "tabular utility on " + attr_name(*this, i) + " without a shared finite support");
    }
    pts = std::move(*s);
  }
  return NormalizedUtility(form, attribute(i).domain, std::move(pts));
}

std::vector<int> DecisionModel::all_attributes() const {
  std::vector<int> v(size());
  std::iota(v.begin(), v.end(), 1);
  return v;
}

DecisionModel make_empty_model(const Deun& deun, std::vector<Attribute> attributes,
                               std::vector<std::string> decisions) {
  DecisionModel m;
  m.deun = deun;
  m.attributes = std::move(attributes);
  m.decisions = std::move(decisions);
  const int n = deun.size();
  m.cpds.assign(m.decisions.size(), std::vector<std::optional<Cpd>>(n));
  m.utilities.resize(n);
  for (int i = 1; i <= n; ++i) {
    m.utilities[i - 1].resize(config_count(static_cast<int>(deun.util_parents(i).size())));
  }
  m.corner_weights.resize(config_count(n));
  return m;
}

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::Structural: return "Structural";
    case IssueKind::CompletenessViolation: return "CompletenessViolation";
    case IssueKind::MonotonicityViolation: return "MonotonicityViolation";
    case IssueKind::StrictnessTie: return "StrictnessTie";
    case IssueKind::KeyLengthMismatch: return "KeyLengthMismatch";
    case IssueKind::ParentMismatch: return "ParentMismatch";
    case IssueKind::InvalidAttribute: return "InvalidAttribute";
    case IssueKind::InvalidCpd: return "InvalidCpd";
    case IssueKind::InvalidUtility: return "InvalidUtility";
    case IssueKind::DegenerateUtility: return "DegenerateUtility";
    case IssueKind::ReferenceMismatch: return "ReferenceMismatch";
    case IssueKind::UnknownName: return "UnknownName";
    case IssueKind::Malformed: return "Malformed";
  }
  return "?";
}

bool ValidationReport::clean() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const {
  return std::count_if(issues.begin(), issues.end(),
                       [](const Issue& i) { return i.severity == Issue::Severity::Error; });
}

std::size_t ValidationReport::warning_count() const { return issues.size() - error_count(); }

void ValidationReport::add(Issue::Severity severity, IssueKind kind, std::string path,
                           std::string message) {
  issues.push_back({severity, kind, std::move(path), std::move(message)});
}

ModelValidationError::ModelValidationError(ValidationReport report)
    : Error(ErrorKind::ValidationError,
            "model has " + std::to_string(report.error_count()) + " validation error(s)" +
                (report.issues.empty() ? "" : ": " + report.issues.front().path + ": " +
                                                  report.issues.front().message)),
      report_(std::move(report)) {}

namespace {

using Sev = Issue::Severity;

void check_attributes(const DecisionModel& m, ValidationReport& r) {
  const int n = m.size();
  if (static_cast<int>(m.attributes.size()) != n) {
    r.add(Sev::Error, IssueKind::InvalidAttribute, "attributes",
          "expected " + std::to_string(n) + " attributes, found " +
              std::to_string(m.attributes.size()));
  }
  std::set<std::string> names;
  for (size_t k = 0; k < m.attributes.size(); ++k) {
    const auto& a = m.attributes[k];
    const std::string path = "attributes[" + std::to_string(k) + "]";
    if (a.index != static_cast<int>(k) + 1) {
      r.add(Sev::Error, IssueKind::InvalidAttribute, path + ".index",
            "index " + std::to_string(a.index) + " out of sequence");
    }
    if (a.name.empty()) {
      r.add(Sev::Error, IssueKind::InvalidAttribute, path + ".name", "empty name");
    } else if (!names.insert(a.name).second) {
      r.add(Sev::Error, IssueKind::InvalidAttribute, path + ".name",
            "duplicate name '" + a.name + "'");
    }
    if (!std::isfinite(a.domain.lo) || !std::isfinite(a.domain.hi) || !(a.domain.lo < a.domain.hi)) {
      r.add(Sev::Error, IssueKind::InvalidAttribute, path + ".domain",
            "domain must be a finite interval with a < b");
      continue;
    }
    if (!a.domain.contains(a.ref_zero)) {
      r.add(Sev::Error, IssueKind::InvalidAttribute, path + ".ref_zero", "outside the domain");
    }
    if (!a.domain.contains(a.ref_star)) {
      r.add(Sev::Error, IssueKind::InvalidAttribute, path + ".ref_star", "outside the domain");
    }
    if (a.ref_zero == a.ref_star) {
      r.add(Sev::Error, IssueKind::InvalidAttribute, path, "ref_zero equals ref_star");
    }
  }
}

void check_cpd(const DecisionModel& m, int d, int i, ValidationReport& r) {
  const std::string path = "cpds." + m.decisions[d] + "." + attr_name(m, i);
  const auto& slot = m.cpds[d][i - 1];
  if (!slot) {
    r.add(Sev::Error, IssueKind::CompletenessViolation, path, "missing distribution");
    return;
  }
  const auto parents = m.deun.prob_parents(i);
  if (const auto* g = std::get_if<LinearGaussian>(&*slot)) {
    if (!(g->sigma > 0.0) || !std::isfinite(g->sigma)) {
      r.add(Sev::Error, IssueKind::InvalidCpd, path + ".sigma", "sigma must be positive");
    }
    if (!std::isfinite(g->intercept)) {
      r.add(Sev::Error, IssueKind::InvalidCpd, path + ".intercept", "not finite");
    }
    std::vector<int> keys;
    for (const auto& [p, c] : g->coefficients) {
      keys.push_back(p);
      if (!std::isfinite(c)) {
        r.add(Sev::Error, IssueKind::InvalidCpd, path + ".coeffs." + attr_name(m, p), "not finite");
      }
    }
    if (keys != parents) {
      r.add(Sev::Error, IssueKind::ParentMismatch, path + ".coeffs",
            "coefficient keys must equal the probabilistic parents of " + attr_name(m, i));
    }
    return;
  }
  const auto& t = std::get<TabularCpd>(*slot);
  if (t.parents() != parents) {
    r.add(Sev::Error, IssueKind::ParentMismatch, path + ".parents",
          "parent grids must cover exactly the probabilistic parents of " + attr_name(m, i));
  }
  if (t.support.empty()) {
    r.add(Sev::Error, IssueKind::InvalidCpd, path + ".support", "empty support");
  }
  std::set<double> distinct(t.support.begin(), t.support.end());
  if (distinct.size() != t.support.size()) {
    r.add(Sev::Error, IssueKind::InvalidCpd, path + ".support", "repeated support point");
  }
  if (i <= static_cast<int>(m.attributes.size())) {
    for (double y : t.support) {
      if (!m.attributes[i - 1].domain.contains(y)) {
        r.add(Sev::Error, IssueKind::InvalidCpd, path + ".support",
              "support point " + fmt(y) + " outside the domain");
      }
    }
  }
  for (const auto& [p, grid] : t.parent_grids) {
    if (p < 1 || p > m.size()) continue;
    const auto& ps = m.cpds[d][p - 1];
    if (!ps || !is_tabular(*ps) || std::get<TabularCpd>(*ps).support != grid) {
      r.add(Sev::Error, IssueKind::InvalidCpd, path + ".parents." + attr_name(m, p),
            "grid must equal the support of " + attr_name(m, p) + " under the same decision");
    }
  }
  if (t.rows.size() != grid_rows(t)) {
    r.add(Sev::Error, IssueKind::InvalidCpd, path + ".rows",
          "expected " + std::to_string(grid_rows(t)) + " rows, found " +
              std::to_string(t.rows.size()));
  }
  for (size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    const std::string rp = path + ".rows[" + std::to_string(k) + "]";
    if (row.size() != t.support.size()) {
      r.add(Sev::Error, IssueKind::InvalidCpd, rp, "row length differs from the support size");
      continue;
    }
    double sum = 0.0;
    bool negative = false;
    for (double p : row) {
      negative = negative || !(p >= 0.0);
      sum += p;
    }
    if (negative) r.add(Sev::Error, IssueKind::InvalidCpd, rp, "negative probability");
    if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
      r.add(Sev::Error, IssueKind::InvalidCpd, rp, "probabilities sum to " + fmt(sum));
    }
  }
}

void check_utilities(const DecisionModel& m, int i, ValidationReport& r) {
  const auto parents = m.deun.util_parents(i);
  const std::string path = "utilities." + attr_name(m, i);
  const auto& slots = m.utilities[i - 1];
  const auto expected = config_count(static_cast<int>(parents.size()));
  if (slots.size() != expected) {
    r.add(Sev::Error, IssueKind::CompletenessViolation, path,
          "expected " + std::to_string(expected) + " parent configurations");
    return;
  }
  const bool attr_ok = i <= static_cast<int>(m.attributes.size()) &&
                       m.attributes[i - 1].domain.lo < m.attributes[i - 1].domain.hi;
  for (std::uint64_t c = 0; c < expected; ++c) {
    const std::string key = index_to_key(c, static_cast<int>(parents.size()));
    const std::string kp = path + "." + (key.empty() ? "\"\"" : key);
    const auto& slot = slots[c];
    if (!slot) {
      r.add(Sev::Error, IssueKind::CompletenessViolation, kp,
            "missing utility for parent configuration '" + key + "'");
      continue;
    }
    std::vector<double> support;
    if (const auto* t = std::get_if<TabularUtility>(&*slot)) {
      auto s = m.support(i);
      if (!s) {
        r.add(Sev::Error, IssueKind::InvalidUtility, kp,
              "tabular utility needs tabular distributions sharing one support in every decision");
        continue;
      }
      if (t->values.size() != s->size()) {
        r.add(Sev::Error, IssueKind::InvalidUtility, kp + ".values",
              "expected one value per support point");
        continue;
      }
      for (double v : t->values) {
        if (!(v >= 0.0 && v <= 1.0)) {
          r.add(Sev::Error, IssueKind::InvalidUtility, kp + ".values", "values must lie in [0, 1]");
          break;
        }
      }
      support = std::move(*s);
    } else {
      const double delta = std::visit(
          overloaded{[](const TabularUtility&) { return 0.0; },
                     [](const auto& f) { return f.delta; }},
          *slot);
      if (!(delta > 0.0) || !std::isfinite(delta)) {
        r.add(Sev::Error, IssueKind::InvalidUtility, kp + ".delta", "delta must be positive");
        continue;
      }
    }
    if (!attr_ok) continue;
    const auto& a = m.attributes[i - 1];
    try {
      NormalizedUtility u(*slot, a.domain, support);
      auto at = [&](double y) -> std::optional<double> {
        try {
          return u(y);
        } catch (const Error&) {
          return std::nullopt;
        }
      };
      auto star = at(a.ref_star);
      auto zero = at(a.ref_zero);
      if (!star || std::abs(*star - 1.0) > kReferenceTolerance) {
        r.add(Sev::Error, IssueKind::ReferenceMismatch, kp,
              "normalized utility is not 1 at ref_star = " + fmt(a.ref_star) + " (attains 1 at " +
                  fmt(u.argmax()) + ")");
      }
      if (!zero || std::abs(*zero) > kReferenceTolerance) {
        r.add(Sev::Error, IssueKind::ReferenceMismatch, kp,
              "normalized utility is not 0 at ref_zero = " + fmt(a.ref_zero) + " (attains 0 at " +
                  fmt(u.argmin()) + ")");
      }
    } catch (const Error& e) {
      r.add(Sev::Error, IssueKind::DegenerateUtility, kp, e.what());
    }
  }
}

void check_corner_weights(const DecisionModel& m, ValidationReport& r) {
  const int n = m.size();
  const auto expected = config_count(n);
  if (m.corner_weights.size() != expected) {
    r.add(Sev::Error, IssueKind::CompletenessViolation, "corner_weights",
          "expected " + std::to_string(expected) + " corner configurations");
    return;
  }
  for (std::uint64_t c = 0; c < expected; ++c) {
    const auto& w = m.corner_weights[c];
    const std::string key = index_to_key(c, n);
    if (!w) {
      r.add(Sev::Error, IssueKind::CompletenessViolation, "corner_weights." + key,
            "missing corner configuration '" + key + "'");
    } else if (!(*w >= 0.0 && *w <= 1.0)) {
      r.add(Sev::Error, IssueKind::InvalidUtility, "corner_weights." + key,
            "weight " + fmt(*w) + " outside [0, 1]");
    }
  }
  for (std::uint64_t c = 0; c < expected; ++c) {
    if (!m.corner_weights[c]) continue;
    for (int bit = 0; bit < n; ++bit) {
      const std::uint64_t mask = std::uint64_t{1} << bit;
      if (c & mask) continue;
      const auto& hi = m.corner_weights[c | mask];
      if (!hi) continue;
      const std::string lo_key = index_to_key(c, n);
      const std::string hi_key = index_to_key(c | mask, n);
      if (*hi < *m.corner_weights[c]) {
        r.add(Sev::Error, IssueKind::MonotonicityViolation, "corner_weights." + hi_key,
              "weight " + fmt(*hi) + " at '" + hi_key + "' is below " +
                  fmt(*m.corner_weights[c]) + " at '" + lo_key + "'");
      } else if (*hi == *m.corner_weights[c]) {
        r.add(Sev::Warning, IssueKind::StrictnessTie, "corner_weights." + hi_key,
              "weight at '" + hi_key + "' ties '" + lo_key + "'");
      }
    }
  }
}

}  // namespace

ValidationReport validate_model(const DecisionModel& model) {
  ValidationReport r;
  const int n = model.size();
  if (n <= 0) {
    r.add(Sev::Error, IssueKind::Structural, "attributes", "a model needs at least one attribute");
    return r;
  }
  for (const auto& v : check_deun(n, model.deun.prob_edges(), model.deun.util_edges())) {
    r.add(Sev::Error, IssueKind::Structural,
          v.edge_kind == EdgeKind::Probabilistic ? "prob_edges" : "util_edges",
          std::string(to_string(v.kind)) + ": " + v.message);
  }
  check_attributes(model, r);
  if (model.decisions.empty()) {
    r.add(Sev::Error, IssueKind::CompletenessViolation, "decisions", "no decisions declared");
  }
  std::set<std::string> labels;
  for (const auto& d : model.decisions) {
    if (d.empty() || d == "*") {
      r.add(Sev::Error, IssueKind::Malformed, "decisions", "invalid decision label '" + d + "'");
    } else if (!labels.insert(d).second) {
      r.add(Sev::Error, IssueKind::Malformed, "decisions", "duplicate decision '" + d + "'");
    }
  }
  if (model.cpds.size() != model.decisions.size()) {
    r.add(Sev::Error, IssueKind::CompletenessViolation, "cpds",
          "one distribution set per decision is required");
  } else {
    for (size_t d = 0; d < model.cpds.size(); ++d) {
      if (static_cast<int>(model.cpds[d].size()) != n) {
        r.add(Sev::Error, IssueKind::CompletenessViolation, "cpds." + model.decisions[d],
              "one distribution per attribute is required");
        continue;
      }
      for (int i = 1; i <= n; ++i) check_cpd(model, static_cast<int>(d), i, r);
    }
  }
  if (static_cast<int>(model.utilities.size()) != n) {
    r.add(Sev::Error, IssueKind::CompletenessViolation, "utilities",
          "one utility specification per attribute is required");
  } else {
    for (int i = 1; i <= n; ++i) check_utilities(model, i, r);
  }
  check_corner_weights(model, r);
  return r;
}

void require_valid(const DecisionModel& model) {
  auto report = validate_model(model);
  if (!report.clean()) throw ModelValidationError(std::move(report));
}

void derive_reference_values(DecisionModel& model) {
  for (int i = 1; i <= model.size() && i <= static_cast<int>(model.attributes.size()); ++i) {
    if (model.utilities.size() < static_cast<size_t>(i) || model.utilities[i - 1].empty() ||
        !model.utilities[i - 1][0]) {
      continue;
    }
    try {
      auto u = model.normalized_utility(i, 0);
      model.attributes[i - 1].ref_star = u.argmax();
      model.attributes[i - 1].ref_zero = u.argmin();
    } catch (const Error&) {
      // left for validate_model to report
    }
  }
}

namespace {

template <class Entry, class MakeU>
BasicLabeledTable<Entry> utility_table(const DecisionModel& model, int i, MakeU make) {
  const auto parents = model.deun.util_parents(i);
  auto scope = scope_union(parents, {i});
  const std::uint64_t total = config_count(static_cast<int>(scope.size()));
  std::vector<Entry> entries;
  entries.reserve(total);
  std::vector<std::optional<std::pair<Entry, Entry>>> cache(
      config_count(static_cast<int>(parents.size())));
  for (std::uint64_t k = 0; k < total; ++k) {
    CornerConfig cfg(scope, k);
    const auto pc = cfg.restrict_to(parents).index();
    if (!cache[pc]) cache[pc] = make(model.normalized_utility(i, pc));
    entries.push_back(cfg.is_star(i) ? cache[pc]->first : cache[pc]->second);
  }
  return BasicLabeledTable<Entry>(std::move(scope), std::move(entries));
}

}  // namespace

LabeledTable conditional_utility_vector(const DecisionModel& model, int i) {
  return utility_table<ExpLinExpr>(model, i, [i](const NormalizedUtility& u) {
    auto e = u.as_expr(i);
    return std::make_pair(e, ExpLinExpr::constant(1.0) - e);
  });
}

BasicLabeledTable<DiscreteFactor> conditional_utility_factors(const DecisionModel& model, int i) {
  auto support = model.support(i);
  if (!support) {
    throw Error(ErrorKind::UnsupportedCombination,
                "attribute " + attr_name(model, i) + " has no shared finite support");
  }
  const int card = static_cast<int>(support->size());
  return utility_table<DiscreteFactor>(model, i, [&](const NormalizedUtility& u) {
    auto vals = u.values_at(*support);
    std::vector<double> dis(vals.size());
    std::transform(vals.begin(), vals.end(), dis.begin(), [](double v) { return 1.0 - v; });
    return std::make_pair(DiscreteFactor({i}, {card}, std::move(vals)),
                          DiscreteFactor({i}, {card}, std::move(dis)));
  });
}

namespace {

// Rows of t re-laid over new_parents (given in the old labels, in the new
// row order), taking each row from the projection onto t's own parents.
std::vector<std::vector<double>> relayout_rows(const TabularCpd& t,
                                               const std::vector<int>& new_parents,
                                               const std::map<int, std::vector<double>>& grids) {
  const auto old_parents = t.parents();
  std::vector<int> old_cards, new_cards;
  for (int p : old_parents) old_cards.push_back(static_cast<int>(t.parent_grids.at(p).size()));
  for (int p : new_parents) new_cards.push_back(static_cast<int>(grids.at(p).size()));
  std::size_t total = 1;
  for (int c : new_cards) total *= c;
  std::vector<std::vector<double>> rows(total);
  for (std::size_t r = 0; r < total; ++r) {
    const auto states = decode(r, new_cards);
    std::vector<int> old_states(old_parents.size());
    for (size_t k = 0; k < old_parents.size(); ++k) {
      const auto pos = std::find(new_parents.begin(), new_parents.end(), old_parents[k]) -
                       new_parents.begin();
      old_states[k] = states[pos];
    }
    rows[r] = t.rows.at(encode(old_states, old_cards));
  }
  return rows;
}

}  // namespace

DecisionModel decompose_model(const DecisionModel& model) {
  DecisionModel out = model;
  out.deun = make_decomposable(model.deun);
  for (size_t d = 0; d < out.cpds.size(); ++d) {
    for (int i = 1; i <= out.size(); ++i) {
      auto& slot = out.cpds[d][i - 1];
      if (!slot) continue;
      const auto parents = out.deun.prob_parents(i);
      if (auto* g = std::get_if<LinearGaussian>(&*slot)) {
        for (int p : parents) g->coefficients.try_emplace(p, 0.0);
        continue;
      }
      auto& t = std::get<TabularCpd>(*slot);
      if (t.parents() == parents) continue;
      auto grids = t.parent_grids;
      for (int p : parents) {
        if (grids.count(p)) continue;
        const auto& ps = model.cpds[d][p - 1];
        if (!ps || !is_tabular(*ps)) {
          throw Error(ErrorKind::UnsupportedCombination,
                      "cannot add continuous parent " + attr_name(model, p) +
                          " to the tabular distribution of " + attr_name(model, i));
        }
        grids[p] = std::get<TabularCpd>(*ps).support;
      }
      t.rows = relayout_rows(t, parents, grids);
      t.parent_grids = std::move(grids);
    }
  }
  return out;
}

DecisionModel relabel_model(const DecisionModel& model, const std::vector<int>& perm) {
  const int n = model.size();
  if (static_cast<int>(perm.size()) != n) {
    throw Error(ErrorKind::InvalidArgument, "permutation size differs from the attribute count");
  }
  std::vector<int> inverse(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    const int j = perm[i - 1];
    if (j < 1 || j > n || inverse[j] != 0) {
      throw Error(ErrorKind::InvalidArgument, "not a permutation of 1..n");
    }
    inverse[j] = i;
  }
  auto map_edges = [&](const EdgeSet& es) {
    EdgeSet out;
    for (const auto& e : es) {
      Edge m{perm[e.from - 1], perm[e.to - 1]};
      if (m.from >= m.to) {
        throw Error(ErrorKind::InvalidArgument, "relabeling reverses edge (" +
                                                    std::to_string(e.from) + "," +
                                                    std::to_string(e.to) + ")");
      }
      out.insert(m);
    }
    return out;
  };
  auto deun =
      Deun::from_edges_unchecked(n, map_edges(model.deun.prob_edges()), map_edges(model.deun.util_edges()));

  std::vector<Attribute> attrs(n);
  for (int j = 1; j <= n; ++j) {
    attrs[j - 1] = model.attributes.at(inverse[j] - 1);
    attrs[j - 1].index = j;
  }
  DecisionModel out = make_empty_model(deun, std::move(attrs), model.decisions);

  // New config over new_scope (new labels) -> index over the old scope.
  auto old_config = [&](const std::vector<int>& new_scope, std::uint64_t idx) {
    CornerConfig cfg(new_scope, idx);
    std::vector<int> old_scope;
    for (int a : new_scope) old_scope.push_back(inverse[a]);
    std::sort(old_scope.begin(), old_scope.end());
    std::string key;
    for (int p : old_scope) key += cfg.is_star(perm[p - 1]) ? '*' : '0';
    return key_to_index(key);
  };

  for (size_t d = 0; d < model.cpds.size(); ++d) {
    for (int j = 1; j <= n; ++j) {
      const auto& slot = model.cpds[d].at(inverse[j] - 1);
      if (!slot) continue;
      if (const auto* g = std::get_if<LinearGaussian>(&*slot)) {
        LinearGaussian ng{g->intercept, {}, g->sigma};
        for (const auto& [p, c] : g->coefficients) ng.coefficients[perm[p - 1]] = c;
        out.cpds[d][j - 1] = ng;
        continue;
      }
      const auto& t = std::get<TabularCpd>(*slot);
      std::vector<int> new_parents;  // new labels, ascending
      for (const auto& [p, g] : t.parent_grids) new_parents.push_back(perm[p - 1]);
      std::sort(new_parents.begin(), new_parents.end());
      std::vector<int> order_old;  // same order in old labels
      for (int q : new_parents) order_old.push_back(inverse[q]);
      TabularCpd nt;
      nt.support = t.support;
      nt.rows = relayout_rows(t, order_old, t.parent_grids);
      for (const auto& [p, g] : t.parent_grids) nt.parent_grids[perm[p - 1]] = g;
      out.cpds[d][j - 1] = std::move(nt);
    }
  }
  for (int j = 1; j <= n; ++j) {
    const auto new_parents = deun.util_parents(j);
    auto& slots = out.utilities[j - 1];
    for (std::uint64_t c = 0; c < slots.size(); ++c) {
      slots[c] = model.utilities.at(inverse[j] - 1).at(old_config(new_parents, c));
    }
  }
  const auto everyone = out.all_attributes();
  for (std::uint64_t c = 0; c < out.corner_weights.size(); ++c) {
    out.corner_weights[c] = model.corner_weights.at(old_config(everyone, c));
  }
  return out;
}

}  // namespace deun
