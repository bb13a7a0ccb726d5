#include "deun/engine.hpp"

#include <algorithm>
#include <exception>
#include <numeric>

namespace deun {

namespace {

enum class Family { Gaussian, Discrete };

Family model_family(const DecisionModel& model, int decision) {
  bool any_gaussian = false, any_tabular = false;
  for (int i = 1; i <= model.size(); ++i) {
    (is_tabular(model.cpd(decision, i)) ? any_tabular : any_gaussian) = true;
  }
  if (any_gaussian && any_tabular) {
    throw Error(ErrorKind::UnsupportedCombination,
                "decision " + model.decisions[decision] +
                    " mixes linear-Gaussian and tabular distributions; use the oracle");
  }
  const Family family = any_tabular ? Family::Discrete : Family::Gaussian;
  for (int i = 1; i <= model.size(); ++i) {
    for (const auto& slot : model.utilities[i - 1]) {
      if (slot && is_tabular(*slot) != (family == Family::Discrete)) {
        throw Error(ErrorKind::UnsupportedCombination,
                    "attribute " + model.attribute(i).name + " pairs a " +
                        (family == Family::Discrete ? "tabular distribution with an exponential"
                                                    : "continuous distribution with a tabular") +
                        " utility; use the oracle");
      }
    }
  }
  return family;
}

struct GaussianPolicy {
  using Entry = ExpLinExpr;

  const DecisionModel& model;
  int decision;

  BasicLabeledTable<Entry> utility(int i) const { return conditional_utility_vector(model, i); }

  Entry expect(const Entry& e, int i) const {
    const auto& g = std::get<LinearGaussian>(model.cpd(decision, i));
    return gaussian_expectation(e, i, g.mean(), g.sigma);
  }

  static bool mentions(const Entry& e, int i) {
    for (const auto& t : e.terms()) {
      if (t.exponent.mentions(i)) return true;
    }
    return false;
  }
  static std::size_t entry_size(const Entry& e) { return e.terms().size(); }
};

struct DiscretePolicy {
  using Entry = DiscreteFactor;

  const DecisionModel& model;
  int decision;
  std::vector<DiscreteFactor> cpd_factors;  // p(y_i | parents) at [i - 1]

  DiscretePolicy(const DecisionModel& m, int d) : model(m), decision(d) {
    for (int i = 1; i <= m.size(); ++i) {
      const auto& t = std::get<TabularCpd>(m.cpd(d, i));
      std::vector<int> vars = t.parents();
      std::vector<int> cards;
      for (int p : vars) cards.push_back(static_cast<int>(t.parent_grids.at(p).size()));
      vars.push_back(i);  // every parent has a lower index
      cards.push_back(static_cast<int>(t.support.size()));
      std::vector<double> values;
      for (const auto& row : t.rows) values.insert(values.end(), row.begin(), row.end());
      cpd_factors.emplace_back(std::move(vars), std::move(cards), std::move(values));
    }
  }

  BasicLabeledTable<Entry> utility(int i) const { return conditional_utility_factors(model, i); }

  Entry expect(const Entry& e, int i) const { return (e * cpd_factors[i - 1]).sum_out(i); }

  static bool mentions(const Entry& e, int i) {
    return std::binary_search(e.vars().begin(), e.vars().end(), i);
  }
  static std::size_t entry_size(const Entry& e) { return e.values().size(); }
};

template <class Policy>
BasicLabeledTable<typename Policy::Entry> expect_table(
    const Policy& policy, const BasicLabeledTable<typename Policy::Entry>& table, int i) {
  using Entry = typename Policy::Entry;
  std::vector<Entry> out(table.size());
  const auto n = static_cast<std::int64_t>(table.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) if (n >= static_cast<std::int64_t>(kParallelCircThreshold))
  for (std::int64_t k = 0; k < n; ++k) {
    try {
      out[k] = policy.expect(table[k], i);
    } catch (...) {
#pragma omp critical(deun_expect_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return BasicLabeledTable<Entry>(table.scope(), std::move(out));
}

template <class Entry>
BasicLabeledTable<Entry> corner_table(const DecisionModel& model) {
  std::vector<Entry> entries;
  entries.reserve(model.corner_weights.size());
  for (std::uint64_t c = 0; c < model.corner_weights.size(); ++c) {
    entries.push_back(Entry::constant(model.corner_weight(c)));
  }
  return BasicLabeledTable<Entry>(model.all_attributes(), std::move(entries));
}

template <class Entry>
double final_sum(const BasicLabeledTable<Entry>& table) {
  try {
    return table_reduce_sum(table);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotConstant) throw;
    throw Error(ErrorKind::PendingVariable,
                std::string("variables left after full integration: ") + e.what());
  }
}

template <class Policy>
void note_sizes(const BasicLabeledTable<typename Policy::Entry>& t, JtreeStats* stats) {
  if (!stats) return;
  stats->max_table_entries = std::max(stats->max_table_entries, t.size());
  for (const auto& e : t.entries()) {
    stats->max_entry_size = std::max(stats->max_entry_size, Policy::entry_size(e));
  }
}

template <class Policy>
double run_theorem1(const Policy& policy, const std::vector<int>& order, Theorem1Trace* trace) {
  using Table = BasicLabeledTable<typename Policy::Entry>;
  Table acc = Table::unit();
  for (int i : order) {
    acc = expect_table(policy, table_circ(acc, policy.utility(i)), i);
    if (trace) {
      if constexpr (std::is_same_v<typename Policy::Entry, ExpLinExpr>) trace->tables.push_back(acc);
    }
  }
  return final_sum(table_circ(corner_table<typename Policy::Entry>(policy.model), acc));
}

template <class Policy>
double run_jtree(const Policy& policy, const JunctionTree& tree, JtreeStats* stats) {
  using Table = BasicLabeledTable<typename Policy::Entry>;
  const auto& model = policy.model;
  const int m = tree.clique_set.size();
  const auto roots = tree.roots();
  std::vector<Table> psi(m);
  for (int j = 0; j < m; ++j) {
    for (int v : tree.assigned_vertices(j)) psi[j] = table_circ(psi[j], policy.utility(v));
  }
  psi[roots.front()] =
      table_circ(corner_table<typename Policy::Entry>(model), psi[roots.front()]);

  if (stats) stats->cliques = m;
  Table combined = Table::unit();
  // Children always carry higher indices than their parents.
  for (int j = m - 1; j >= 0; --j) {
    auto assigned = tree.assigned_vertices(j);
    for (auto it = assigned.rbegin(); it != assigned.rend(); ++it) {
      psi[j] = expect_table(policy, psi[j], *it);
      note_sizes<Policy>(psi[j], stats);
    }
    if (stats) stats->absorption_order.push_back(j);
    const auto& parent = tree.clique_set.rip_parent[j];
    if (parent) {
      psi[*parent] = table_circ(psi[*parent], psi[j]);
      note_sizes<Policy>(psi[*parent], stats);
    } else {
      combined = table_circ(combined, psi[j]);
    }
    psi[j] = Table();
  }
  return final_sum(combined);
}

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::Theorem1 ? "theorem1" : "jtree";
}

Method parse_method(std::string_view name) {
  if (name == "theorem1") return Method::Theorem1;
  if (name == "jtree") return Method::JunctionTree;
  throw Error(ErrorKind::InvalidArgument,
              "unknown method '" + std::string(name) + "' (theorem1 or jtree)");
}

Method default_method(const DecisionModel& model) {
  return is_decomposable(model.deun) ? Method::JunctionTree : Method::Theorem1;
}

void check_integration_order(const Deun& deun, const std::vector<int>& order) {
  const int n = deun.size();
  std::vector<int> position(n + 1, -1);
  if (static_cast<int>(order.size()) != n) {
    throw Error(ErrorKind::InvalidArgument, "integration order must list every attribute once");
  }
  for (size_t k = 0; k < order.size(); ++k) {
    const int v = order[k];
    if (v < 1 || v > n || position[v] != -1) {
      throw Error(ErrorKind::InvalidArgument, "integration order must list every attribute once");
    }
    position[v] = static_cast<int>(k);
  }
  for (const auto& e : deun.prob_edges()) {
    if (position[e.to] > position[e.from]) {
      throw Error(ErrorKind::OrderingViolated,
                  "attribute " + std::to_string(e.from) + " is integrated before its child " +
                      std::to_string(e.to));
    }
  }
}

double theorem1_eu(const DecisionModel& model, int decision,
                   const std::optional<std::vector<int>>& order, Theorem1Trace* trace) {
  std::vector<int> ord;
  if (order) {
    ord = *order;
    check_integration_order(model.deun, ord);
  } else {
    ord.resize(model.size());
    std::iota(ord.rbegin(), ord.rend(), 1);
  }
  if (trace) {
    trace->order = ord;
    trace->tables.clear();
  }
  if (model_family(model, decision) == Family::Gaussian) {
    return run_theorem1(GaussianPolicy{model, decision}, ord, trace);
  }
  return run_theorem1(DiscretePolicy(model, decision), ord, trace);
}

double theorem1_eu(const DecisionModel& model, const std::string& decision,
                   const std::optional<std::vector<int>>& order, Theorem1Trace* trace) {
  return theorem1_eu(model, model.decision_index(decision), order, trace);
}

double jtree_eu(const DecisionModel& model, int decision, JtreeStats* stats) {
  const auto tree = build_junction_tree(model.deun);
  if (stats) *stats = JtreeStats{};
  if (model_family(model, decision) == Family::Gaussian) {
    return run_jtree(GaussianPolicy{model, decision}, tree, stats);
  }
  return run_jtree(DiscretePolicy(model, decision), tree, stats);
}

double jtree_eu(const DecisionModel& model, const std::string& decision, JtreeStats* stats) {
  return jtree_eu(model, model.decision_index(decision), stats);
}

double expected_utility(const DecisionModel& model, int decision, Method method) {
  return method == Method::Theorem1 ? theorem1_eu(model, decision) : jtree_eu(model, decision);
}

std::vector<RankedDecision> rank_decisions(const DecisionModel& model, Method method) {
  const int count = static_cast<int>(model.decisions.size());
  std::vector<RankedDecision> out(count);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int d = 0; d < count; ++d) {
    try {
      out[d] = {model.decisions[d], expected_utility(model, d, method)};
    } catch (...) {
#pragma omp critical(deun_rank_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedDecision& a, const RankedDecision& b) { return a.eu > b.eu; });
  return out;
}

std::vector<Monomial> utility_expansion(const DecisionModel& model, int cap) {
  const int n = model.size();
  if (n > cap) {
    throw Error(ErrorKind::ExpansionTooLarge, "expansion of " + std::to_string(n) +
                                                  " attributes exceeds the cap of " +
                                                  std::to_string(cap));
  }
  const auto everyone = model.all_attributes();
  std::vector<std::vector<int>> parents(n + 1);
  for (int i = 1; i <= n; ++i) parents[i] = model.deun.util_parents(i);
  const std::uint64_t total = config_count(n);
  std::vector<Monomial> out;
  out.reserve(total);
  for (std::uint64_t k = 0; k < total; ++k) {
    Monomial mono;
    mono.corner = CornerConfig(everyone, k);
    mono.weight = model.corner_weight(k);
    for (int i = 1; i <= n; ++i) {
      mono.factors.push_back({i, !mono.corner.is_star(i), mono.corner.restrict_to(parents[i])});
    }
    out.push_back(std::move(mono));
  }
  return out;
}

UtilityEvaluator::UtilityEvaluator(const DecisionModel& model, Domain mode)
    : n_(model.size()), mode_(mode) {
  parents_.resize(n_);
  forms_.resize(n_);
  for (int i = 1; i <= n_; ++i) {
    domains_.push_back(model.attribute(i).domain);
    parents_[i - 1] = model.deun.util_parents(i);
    for (std::uint64_t c = 0; c < model.utilities[i - 1].size(); ++c) {
      forms_[i - 1].push_back(model.normalized_utility(i, c));
    }
  }
  for (std::uint64_t c = 0; c < model.corner_weights.size(); ++c) {
    weights_.push_back(model.corner_weight(c));
  }
}

void UtilityEvaluator::factor_values(std::span<const double> y,
                                     std::vector<std::vector<double>>& u) const {
  if (static_cast<int>(y.size()) != n_) {
    throw Error(ErrorKind::InvalidArgument, "point has the wrong number of attributes");
  }
  u.resize(n_);
  for (int i = 0; i < n_; ++i) {
    double v = y[i];
    if (!domains_[i].contains(v)) {
      if (mode_ == Domain::Strict) {
        throw Error(ErrorKind::OutOfDomain, "y" + std::to_string(i + 1) + " = " +
                                                std::to_string(v) + " is outside its domain");
      }
      if (mode_ == Domain::Clamp) v = domains_[i].clamp(v);
    }
    u[i].resize(forms_[i].size());
    for (size_t c = 0; c < forms_[i].size(); ++c) u[i][c] = forms_[i][c](v);
  }
}

std::vector<double> UtilityEvaluator::corner_products(std::span<const double> y) const {
  std::vector<std::vector<double>> u;
  factor_values(y, u);
  const std::uint64_t total = config_count(n_);
  std::vector<double> out(total);
  for (std::uint64_t k = 0; k < total; ++k) {
    auto bit = [&](int a) { return (k >> (n_ - a)) & 1u; };
    double prod = 1.0;
    for (int i = 1; i <= n_; ++i) {
      std::uint64_t pc = 0;
      for (int p : parents_[i - 1]) pc = (pc << 1) | bit(p);
      const double ui = u[i - 1][pc];
      prod *= bit(i) ? ui : 1.0 - ui;
    }
    out[k] = prod;
  }
  return out;
}

double UtilityEvaluator::operator()(std::span<const double> y) const {
  const auto products = corner_products(y);
  double sum = 0.0;
  for (size_t k = 0; k < products.size(); ++k) sum += weights_[k] * products[k];
  return sum;
}

double evaluate_utility_pointwise(const DecisionModel& model, std::span<const double> y) {
  return UtilityEvaluator(model)(y);
}

}  // namespace deun
