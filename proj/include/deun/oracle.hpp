#pragma once

// Independent checks on the engine: brute-force enumeration for tabular
// models, seeded Monte Carlo, and adaptive quadrature of single-variable
// Gaussian expectations.

#include <cstdint>
#include <string>

#include "deun/engine.hpp"
#include "deun/expr.hpp"
#include "deun/model.hpp"

namespace deun {

inline constexpr std::uint64_t kMaxEnumeration = 10'000'000;

/// Sum over every joint support configuration of probability times u(y).
/// TooLarge beyond kMaxEnumeration configurations. Utility forms of any kind
/// are evaluated at the support points.
double exact_discrete_eu(const DecisionModel& model, int decision);
/// Single-threaded reference; bit-identical to exact_discrete_eu.
double exact_discrete_eu_serial(const DecisionModel& model, int decision);

/// Identifier of the sampling scheme below, stored in every report.
inline constexpr const char* kRngAlgorithm = "splitmix64-counter/box-muller-cos";

/// Counter-based generator: draw k of a stream is a pure function of (seed, k).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed);
  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform in (0, 1].
  double uniform(std::uint64_t counter) const noexcept;
  /// Standard normal from draws 2c and 2c + 1.
  double normal(std::uint64_t c) const noexcept;

 private:
  std::uint64_t key_;
};

struct McOptions {
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
  bool clamp = false;  // clamp samples into the domains before evaluating u
};

struct McReport {
  double estimate = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(samples); 0 for one sample
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
  std::string rng = kRngAlgorithm;
  bool clamped = false;
  double out_of_domain_fraction = 0.0;  // samples with any attribute outside its domain

  bool operator==(const McReport&) const = default;
};

/// Samples per block; blocks are the unit of parallel work and are merged in
/// block order, so the report does not depend on the thread count.
inline constexpr std::uint64_t kMcBlock = 4096;

/// Ancestral sampling in index order, each sample scored by u(y).
McReport monte_carlo_eu(const DecisionModel& model, int decision, const McOptions& options);
/// Single-threaded reference; bit-identical to monte_carlo_eu.
McReport monte_carlo_eu_serial(const DecisionModel& model, int decision,
                               const McOptions& options);

/// E[e] over y_attribute ~ N(mean, sigma^2) by adaptive Gauss-Kronrod on
/// mean +- 12 sigma. e must depend on no attribute other than the given one.
/// NonConvergence when the error estimate exceeds 1e-10 * max(1, |result|).
double quadrature_expectation(const ExpLinExpr& e, int attribute, double mean, double sigma);

}  // namespace deun
