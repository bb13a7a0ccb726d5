#include "support/random_models.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace deun::gen {

namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::vector<Attribute> make_attributes(int n, double half_width) {
  std::vector<Attribute> attrs;
  for (int i = 1; i <= n; ++i) {
    attrs.push_back({i, "y" + std::to_string(i), {-half_width, half_width}, -half_width,
                     half_width});
  }
  return attrs;
}

std::vector<std::string> decision_labels(int count) {
  std::vector<std::string> out;
  for (int d = 0; d < count; ++d) out.push_back("d" + std::to_string(d));
  return out;
}

}  // namespace

Deun random_structure(Rng& rng, int n, const StructureOptions& options) {
  EdgeSet prob, util;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (coin(rng, options.prob_density)) prob.insert({i, j});
      if (coin(rng, options.util_density)) util.insert({i, j});
    }
  }
  Deun deun = validate_deun(n, std::move(prob), std::move(util));
  return options.decomposable ? make_decomposable(deun) : deun;
}

std::vector<std::optional<double>> random_corner_weights(Rng& rng, int n) {
  std::vector<double> single(n);
  for (auto& a : single) a = uniform(rng, 0.1, 1.0);
  std::vector<std::vector<double>> pair(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pair[i][j] = uniform(rng, 0.0, 0.3);
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> raw(count, 0.0);
  for (std::uint64_t c = 0; c < count; ++c) {
    // bit (n - 1 - i) of the index is attribute i + 1
    auto star = [&](int i) { return (c >> (n - 1 - i)) & 1U; };
    for (int i = 0; i < n; ++i) {
      if (!star(i)) continue;
      raw[c] += single[i];
      for (int j = i + 1; j < n; ++j) {
        if (star(j)) raw[c] += pair[i][j];
      }
    }
  }
  const double total = raw.back();
  std::vector<std::optional<double>> out(count);
  for (std::uint64_t c = 0; c < count; ++c) out[c] = raw[c] / total;
  out.back() = 1.0;
  return out;
}

DecisionModel random_gaussian_model(Rng& rng, const Deun& structure,
                                    const GaussianOptions& options) {
  const int n = structure.size();
  DecisionModel m =
      make_empty_model(structure, make_attributes(n, 30.0), decision_labels(options.decisions));
  for (int d = 0; d < options.decisions; ++d) {
    for (int i = 1; i <= n; ++i) {
      LinearGaussian g;
      g.intercept = uniform(rng, -1.0, 1.0);
      g.sigma = uniform(rng, options.min_sigma, options.max_sigma);
      const auto parents = structure.prob_parents(i);
      std::vector<double> w(parents.size());
      double l1 = 0.0;
      for (auto& c : w) {
        c = uniform(rng, -1.0, 1.0);
        l1 += std::abs(c);
      }
      // keep the total parent weight bounded so variances stay moderate
      const double scale = l1 > 0.0 ? options.max_coefficient / std::max(1.0, l1) : 0.0;
      for (size_t k = 0; k < parents.size(); ++k) g.coefficients[parents[k]] = w[k] * scale;
      m.cpds[d][i - 1] = g;
    }
  }
  for (int i = 1; i <= n; ++i) {
    const bool increasing = coin(rng, 0.5);
    for (auto& slot : m.utilities[i - 1]) {
      const double delta = uniform(rng, 0.02, 0.15);
      if (increasing) {
        slot = ExpIncreasing{delta};
      } else if (coin(rng, 0.5)) {
        slot = ExpDecreasing{delta};
      } else {
        slot = OneMinusExp{delta};
      }
    }
  }
  m.corner_weights = random_corner_weights(rng, n);
  derive_reference_values(m);
  return m;
}

DecisionModel random_tabular_model(Rng& rng, const Deun& structure, int max_support,
                                   int decisions) {
  const int n = structure.size();
  DecisionModel m = make_empty_model(structure, make_attributes(n, 10.0), decision_labels(decisions));
  std::vector<std::vector<double>> supports(n);
  for (int i = 0; i < n; ++i) {
    const int k = std::uniform_int_distribution<int>(2, std::max(2, max_support))(rng);
    std::set<double> pts;
    while (static_cast<int>(pts.size()) < k) {
      pts.insert(std::uniform_int_distribution<int>(-10, 10)(rng) * 1.0);
    }
    supports[i].assign(pts.begin(), pts.end());
  }
  for (int d = 0; d < decisions; ++d) {
    for (int i = 1; i <= n; ++i) {
      TabularCpd t;
      t.support = supports[i - 1];
      std::size_t rows = 1;
      for (int p : structure.prob_parents(i)) {
        t.parent_grids[p] = supports[p - 1];
        rows *= supports[p - 1].size();
      }
      for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> row(t.support.size());
        for (auto& p : row) p = uniform(rng, 0.05, 1.0);
        const double sum = std::accumulate(row.begin(), row.end(), 0.0);
        for (auto& p : row) p /= sum;
        t.rows.push_back(std::move(row));
      }
      m.cpds[d][i - 1] = std::move(t);
    }
  }
  for (int i = 1; i <= n; ++i) {
    const int k = static_cast<int>(supports[i - 1].size());
    const int top = std::uniform_int_distribution<int>(0, k - 1)(rng);
    int bottom = std::uniform_int_distribution<int>(0, k - 2)(rng);
    if (bottom >= top) ++bottom;
    for (auto& slot : m.utilities[i - 1]) {
      TabularUtility u;
      for (int s = 0; s < k; ++s) {
        u.values.push_back(s == top ? 1.0 : s == bottom ? 0.0 : uniform(rng, 0.05, 0.95));
      }
      slot = std::move(u);
    }
    m.attributes[i - 1].ref_star = supports[i - 1][top];
    m.attributes[i - 1].ref_zero = supports[i - 1][bottom];
  }
  m.corner_weights = random_corner_weights(rng, n);
  return m;
}

std::vector<std::vector<int>> brute_force_cliques(const Deun& deun) {
  const int n = deun.size();
  const std::uint32_t count = 1U << n;
  std::vector<bool> is_clique(count, false);
  for (std::uint32_t s = 1; s < count; ++s) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) {
      if (!(s >> a & 1U)) continue;
      for (int b = a + 1; b < n && ok; ++b) {
        if ((s >> b & 1U) && !deun.prob_adjacent(a + 1, b + 1)) ok = false;
      }
    }
    is_clique[s] = ok;
  }
  std::vector<std::vector<int>> out;
  for (std::uint32_t s = 1; s < count; ++s) {
    if (!is_clique[s]) continue;
    bool maximal = true;
    for (int a = 0; a < n && maximal; ++a) {
      if (!(s >> a & 1U) && is_clique[s | (1U << a)]) maximal = false;
    }
    if (!maximal) continue;
    std::vector<int> c;
    for (int a = 0; a < n; ++a) {
      if (s >> a & 1U) c.push_back(a + 1);
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> random_point(Rng& rng, const DecisionModel& model) {
  std::vector<double> y;
  for (const auto& a : model.attributes) y.push_back(uniform(rng, a.domain.lo, a.domain.hi));
  return y;
}

}  // namespace deun::gen
