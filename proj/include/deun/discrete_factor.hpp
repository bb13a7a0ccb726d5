#pragma once

// Dense factors over finitely supported attributes. These play the role of
// ExpLinExpr when every attribute has a tabular distribution: the pending
// dependence on not-yet-marginalized parents is a table instead of an
// exponential form.

#include <vector>

namespace deun {

class DiscreteFactor {
 public:
  DiscreteFactor() : values_{0.0} {}  // the constant zero

  /// vars ascending; values row-major with the last variable fastest.
  DiscreteFactor(std::vector<int> vars, std::vector<int> cardinalities,
                 std::vector<double> values);

  static DiscreteFactor constant(double c);

  const std::vector<int>& vars() const noexcept { return vars_; }
  const std::vector<int>& cardinalities() const noexcept { return cards_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool is_constant() const noexcept { return vars_.empty(); }
  /// Throws NotConstant while variables remain.
  double constant_value() const;

  /// Value at the given state indices; states[a - 1] is the state of attribute a.
  double at(const std::vector<int>& states) const;

  DiscreteFactor operator*(const DiscreteFactor& other) const;
  DiscreteFactor operator+(const DiscreteFactor& other) const;
  DiscreteFactor operator*(double s) const;

  /// Sums the attribute out.
  DiscreteFactor sum_out(int attribute) const;

  bool operator==(const DiscreteFactor&) const = default;

 private:
  std::vector<int> vars_;
  std::vector<int> cards_;
  std::vector<double> values_;
};

}  // namespace deun
