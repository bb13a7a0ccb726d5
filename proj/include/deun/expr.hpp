#pragma once

// Finite sums of coefficient * exp(linear form) over continuous attributes.
// The family is closed under products and under Gaussian expectation of any
// attribute whose conditional mean is linear in the others, which is all the
// closed-form evaluation needs.

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace deun {

/// constant + sum_k coefficient_k * y_{attribute_k}
class LinForm {
 public:
  LinForm() = default;
  explicit LinForm(double constant) : constant_(constant) {}
  LinForm(double constant, std::vector<std::pair<int, double>> coefficients);

  static LinForm variable(int attribute, double coefficient = 1.0) {
    return LinForm(0.0, {{attribute, coefficient}});
  }

  double constant() const noexcept { return constant_; }
  /// Sorted by attribute, no explicit zeros.
  const std::vector<std::pair<int, double>>& coefficients() const noexcept {
    return coefficients_;
  }
  double coefficient(int attribute) const;
  bool mentions(int attribute) const;
  bool is_constant() const noexcept { return coefficients_.empty(); }

  /// y[a - 1] is the value of attribute a.
  double evaluate(std::span<const double> y) const;

  LinForm operator+(const LinForm& other) const;
  LinForm operator*(double s) const;

  std::string to_string() const;

  bool operator==(const LinForm&) const = default;

 private:
  double constant_ = 0.0;
  std::vector<std::pair<int, double>> coefficients_;
};

class ExpLinExpr {
 public:
  struct Term {
    double coefficient = 0.0;
    LinForm exponent;  // constant part always folded into the coefficient

    bool operator==(const Term&) const = default;
  };

  /// Exponents within this distance per coefficient are merged.
  static constexpr double kMergeTolerance = 1e-12;
  /// Terms with smaller magnitude are dropped.
  static constexpr double kDropBelow = 1e-300;

  ExpLinExpr() = default;  // zero
  explicit ExpLinExpr(std::vector<Term> terms);

  static ExpLinExpr constant(double c);
  /// coefficient * exp(exponent)
  static ExpLinExpr exp_of(double coefficient, const LinForm& exponent);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const;
  /// Throws NotConstant when any term still depends on an attribute.
  double constant_value() const;
  /// Attributes any exponent still depends on, ascending.
  std::vector<int> pending_variables() const;

  double evaluate(std::span<const double> y) const;
  /// Substitutes y_attribute = value.
  ExpLinExpr partial_evaluate(int attribute, double value) const;

  ExpLinExpr operator+(const ExpLinExpr& other) const;
  ExpLinExpr operator-(const ExpLinExpr& other) const;
  ExpLinExpr operator*(const ExpLinExpr& other) const;
  ExpLinExpr operator*(double s) const;

  std::string to_string() const;

  bool operator==(const ExpLinExpr&) const = default;

 private:
  void canonicalize();

  std::vector<Term> terms_;
};

/// Serial product; the reference for the parallel-table kernels.
ExpLinExpr expr_mul(const ExpLinExpr& a, const ExpLinExpr& b);

/// E[e] over y_attribute ~ N(mean, sigma^2), via E[exp(bY)] = exp(b*mu + b^2 sigma^2 / 2).
/// Throws SelfReferentialMean if the mean depends on the attribute itself.
ExpLinExpr gaussian_expectation(const ExpLinExpr& e, int attribute, const LinForm& mean,
                                double sigma);

}  // namespace deun
