#include "deun/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iterator>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace deun {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-attribute sampling data for one decision.
struct Node {
  bool tabular = false;
  // linear Gaussian
  double intercept = 0.0;
  std::vector<std::pair<int, double>> coeffs;
  double sigma = 0.0;
  // tabular
  std::vector<double> support;
  std::vector<int> parents;
  std::vector<int> cards;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<double>> cumulative;

  std::size_t row_of(const std::vector<int>& states) const {
    std::size_t r = 0;
    for (size_t k = 0; k < parents.size(); ++k) r = r * cards[k] + states[parents[k] - 1];
    return r;
  }
};

std::vector<Node> nodes_for(const DecisionModel& model, int decision) {
  std::vector<Node> nodes(model.size());
  for (int i = 1; i <= model.size(); ++i) {
    auto& nd = nodes[i - 1];
    const auto& cpd = model.cpd(decision, i);
    if (const auto* g = std::get_if<LinearGaussian>(&cpd)) {
      nd.intercept = g->intercept;
      nd.coeffs.assign(g->coefficients.begin(), g->coefficients.end());
      nd.sigma = g->sigma;
      continue;
    }
    const auto& t = std::get<TabularCpd>(cpd);
    nd.tabular = true;
    nd.support = t.support;
    nd.parents = t.parents();
    for (int p : nd.parents) {
      const auto& ps = model.cpd(decision, p);
      if (!is_tabular(ps) || std::get<TabularCpd>(ps).support != t.parent_grids.at(p)) {
        throw Error(ErrorKind::UnsupportedCombination,
                    "tabular parent grids must match the parent supports");
      }
      nd.cards.push_back(static_cast<int>(t.parent_grids.at(p).size()));
    }
    nd.rows = t.rows;
    for (const auto& row : t.rows) {
      std::vector<double> cum(row.size());
      std::partial_sum(row.begin(), row.end(), cum.begin());
      nd.cumulative.push_back(std::move(cum));
    }
  }
  return nodes;
}

struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t out_of_domain = 0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
    const double delta = o.mean - mean;
    const double n = na + nb;
    mean += delta * nb / n;
    m2 += o.m2 + delta * delta * na * nb / n;
    count += o.count;
    out_of_domain += o.out_of_domain;
  }
};

class McKernel {
 public:
  McKernel(const DecisionModel& model, int decision, const McOptions& options)
      : n_(model.size()),
        nodes_(nodes_for(model, decision)),
        eval_(model, options.clamp ? UtilityEvaluator::Domain::Clamp
                                   : UtilityEvaluator::Domain::Extrapolate),
        rng_(options.seed),
        samples_(options.samples) {
    for (int i = 1; i <= n_; ++i) domains_.push_back(model.attribute(i).domain);
  }

  std::uint64_t blocks() const { return (samples_ + kMcBlock - 1) / kMcBlock; }

  Moments block(std::uint64_t b) const {
    Moments mom;
    std::vector<double> y(n_);
    std::vector<int> states(n_, 0);
    const std::uint64_t end = std::min(samples_, (b + 1) * kMcBlock);
    for (std::uint64_t k = b * kMcBlock; k < end; ++k) {
      bool outside = false;
      for (int i = 0; i < n_; ++i) {
        const auto& nd = nodes_[i];
        const std::uint64_t c = k * static_cast<std::uint64_t>(n_) + static_cast<std::uint64_t>(i);
        if (nd.tabular) {
          const auto& cum = nd.cumulative[nd.row_of(states)];
          const double u = rng_.uniform(2 * c);
          auto it = std::lower_bound(cum.begin(), cum.end(), u);
          if (it == cum.end()) it = std::prev(cum.end());
          states[i] = static_cast<int>(it - cum.begin());
          y[i] = nd.support[states[i]];
        } else {
          double mean = nd.intercept;
          for (const auto& [p, w] : nd.coeffs) mean += w * y[p - 1];
          y[i] = mean + nd.sigma * rng_.normal(c);
        }
        outside = outside || !domains_[i].contains(y[i]);
      }
      mom.add(eval_(y));
      if (outside) ++mom.out_of_domain;
    }
    return mom;
  }

  McReport report(const Moments& total, const McOptions& options) const {
    McReport r;
    r.estimate = total.mean;
    r.sample_count = total.count;
    r.std_error = total.count > 1
                      ? std::sqrt(total.m2 / static_cast<double>(total.count - 1)) /
                            std::sqrt(static_cast<double>(total.count))
                      : 0.0;
    r.seed = options.seed;
    r.clamped = options.clamp;
    r.out_of_domain_fraction =
        static_cast<double>(total.out_of_domain) / static_cast<double>(total.count);
    return r;
  }

 private:
  int n_;
  std::vector<Node> nodes_;
  UtilityEvaluator eval_;
  std::vector<Interval> domains_;
  CounterRng rng_;
  std::uint64_t samples_;
};

void check_samples(const McOptions& options) {
  if (options.samples == 0) {
    throw Error(ErrorKind::InvalidArgument, "Monte Carlo needs at least one sample");
  }
}

// Mixed-radix enumeration of joint support configurations.
class Enumerator {
 public:
  Enumerator(const DecisionModel& model, int decision)
      : n_(model.size()), nodes_(nodes_for(model, decision)), eval_(model) {
    total_ = 1;
    for (const auto& nd : nodes_) {
      if (!nd.tabular) {
        throw Error(ErrorKind::UnsupportedCombination,
                    "exact enumeration needs tabular distributions for every attribute");
      }
      const std::uint64_t card = nd.support.size();
      if (total_ > kMaxEnumeration / card) {
        throw Error(ErrorKind::TooLarge, "joint support exceeds " +
                                             std::to_string(kMaxEnumeration) + " configurations");
      }
      total_ *= card;
    }
  }

  std::uint64_t blocks() const { return (total_ + kMcBlock - 1) / kMcBlock; }

  double block(std::uint64_t b) const {
    std::vector<int> states(n_);
    std::vector<double> y(n_);
    const std::uint64_t begin = b * kMcBlock;
    const std::uint64_t end = std::min(total_, begin + kMcBlock);
    double sum = 0.0;
    for (std::uint64_t k = begin; k < end; ++k) {
      std::uint64_t rest = k;
      for (int i = n_ - 1; i >= 0; --i) {
        const std::uint64_t card = nodes_[i].support.size();
        states[i] = static_cast<int>(rest % card);
        rest /= card;
      }
      double p = 1.0;
      for (int i = 0; i < n_ && p != 0.0; ++i) {
        p *= nodes_[i].rows[nodes_[i].row_of(states)][states[i]];
        y[i] = nodes_[i].support[states[i]];
      }
      if (p == 0.0) continue;
      sum += p * eval_(y);
    }
    return sum;
  }

 private:
  int n_;
  std::vector<Node> nodes_;
  UtilityEvaluator eval_;
  std::uint64_t total_ = 0;
};

}  // namespace

CounterRng::CounterRng(std::uint64_t seed) : key_(mix64(seed + kGamma)) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  return mix64(key_ + (counter + 1) * kGamma);
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t c) const noexcept {
  const double u1 = uniform(2 * c);
  const double u2 = uniform(2 * c + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double exact_discrete_eu(const DecisionModel& model, int decision) {
  const Enumerator en(model, decision);
  const auto nb = static_cast<std::int64_t>(en.blocks());
  std::vector<double> partial(nb, 0.0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < nb; ++b) {
    try {
      partial[b] = en.block(static_cast<std::uint64_t>(b));
    } catch (...) {
#pragma omp critical(deun_exact_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

double exact_discrete_eu_serial(const DecisionModel& model, int decision) {
  const Enumerator en(model, decision);
  double sum = 0.0;
  for (std::uint64_t b = 0; b < en.blocks(); ++b) sum += en.block(b);
  return sum;
}

McReport monte_carlo_eu(const DecisionModel& model, int decision, const McOptions& options) {
  check_samples(options);
  const McKernel kernel(model, decision, options);
  const auto nb = static_cast<std::int64_t>(kernel.blocks());
  std::vector<Moments> partial(nb);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < nb; ++b) {
    try {
      partial[b] = kernel.block(static_cast<std::uint64_t>(b));
    } catch (...) {
#pragma omp critical(deun_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  Moments total;
  for (const auto& m : partial) total.merge(m);
  return kernel.report(total, options);
}

McReport monte_carlo_eu_serial(const DecisionModel& model, int decision,
                               const McOptions& options) {
  check_samples(options);
  const McKernel kernel(model, decision, options);
  Moments total;
  for (std::uint64_t b = 0; b < kernel.blocks(); ++b) total.merge(kernel.block(b));
  return kernel.report(total, options);
}

double quadrature_expectation(const ExpLinExpr& e, int attribute, double mean, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma must be positive");
  for (int v : e.pending_variables()) {
    if (v != attribute) {
      throw Error(ErrorKind::InvalidArgument,
                  "expression depends on y" + std::to_string(v) + " besides the integrated one");
    }
  }
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<double> y(attribute, 0.0);
  auto f = [&](double z) {
    y[attribute - 1] = mean + sigma * z;
    return e.evaluate(y) * inv_sqrt_2pi * std::exp(-0.5 * z * z);
  };
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -12.0, 12.0, 20, 1e-13,
                                                                    &error);
  if (!std::isfinite(value) || error > 1e-10 * std::max(1.0, std::abs(value))) {
    throw Error(ErrorKind::NonConvergence, "quadrature error estimate " + std::to_string(error));
  }
  return value;
}

}  // namespace deun
