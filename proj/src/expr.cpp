#include "deun/expr.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "deun/errors.hpp"

namespace deun {

namespace {

using Coeffs = std::vector<std::pair<int, double>>;

Coeffs add_coeffs(const Coeffs& a, const Coeffs& b, double scale_b = 1.0) {
  Coeffs out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, scale_b * b[j].second);
      ++j;
    } else {
      out.emplace_back(a[i].first, a[i].second + scale_b * b[j].second);
      ++i;
      ++j;
    }
  }
  std::erase_if(out, [](const auto& p) { return p.second == 0.0; });
  return out;
}

bool exponent_less(const LinForm& a, const LinForm& b) {
  const auto& x = a.coefficients();
  const auto& y = b.coefficients();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

bool exponent_close(const LinForm& a, const LinForm& b) {
  const auto& x = a.coefficients();
  const auto& y = b.coefficients();
  if (x.size() != y.size()) return false;
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k].first != y[k].first) return false;
    if (std::abs(x[k].second - y[k].second) > ExpLinExpr::kMergeTolerance) return false;
  }
  return true;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

LinForm::LinForm(double constant, std::vector<std::pair<int, double>> coefficients)
    : constant_(constant) {
  std::sort(coefficients.begin(), coefficients.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [attr, c] : coefficients) {
    if (!coefficients_.empty() && coefficients_.back().first == attr) {
      coefficients_.back().second += c;
    } else {
      coefficients_.emplace_back(attr, c);
    }
  }
  std::erase_if(coefficients_, [](const auto& p) { return p.second == 0.0; });
}

double LinForm::coefficient(int attribute) const {
  auto it = std::lower_bound(coefficients_.begin(), coefficients_.end(), attribute,
                             [](const auto& p, int a) { return p.first < a; });
  return (it != coefficients_.end() && it->first == attribute) ? it->second : 0.0;
}

bool LinForm::mentions(int attribute) const { return coefficient(attribute) != 0.0; }

double LinForm::evaluate(std::span<const double> y) const {
  double v = constant_;
  for (const auto& [attr, c] : coefficients_) v += c * y[attr - 1];
  return v;
}

LinForm LinForm::operator+(const LinForm& other) const {
  LinForm out;
  out.constant_ = constant_ + other.constant_;
  out.coefficients_ = add_coeffs(coefficients_, other.coefficients_);
  return out;
}

LinForm LinForm::operator*(double s) const {
  LinForm out;
  out.constant_ = constant_ * s;
  for (const auto& [attr, c] : coefficients_) {
    if (c * s != 0.0) out.coefficients_.emplace_back(attr, c * s);
  }
  return out;
}

std::string LinForm::to_string() const {
  std::ostringstream os;
  bool first = true;
  if (constant_ != 0.0 || coefficients_.empty()) {
    os << fmt(constant_);
    first = false;
  }
  for (const auto& [attr, c] : coefficients_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    os << fmt(std::abs(c)) << "*y" << attr;
    first = false;
  }
  return os.str();
}

ExpLinExpr::ExpLinExpr(std::vector<Term> terms) : terms_(std::move(terms)) { canonicalize(); }

ExpLinExpr ExpLinExpr::constant(double c) { return ExpLinExpr({Term{c, LinForm{}}}); }

ExpLinExpr ExpLinExpr::exp_of(double coefficient, const LinForm& exponent) {
  return ExpLinExpr({Term{coefficient, exponent}});
}

void ExpLinExpr::canonicalize() {
  for (auto& t : terms_) {
    if (t.exponent.constant() != 0.0) {
      t.coefficient *= std::exp(t.exponent.constant());
      t.exponent = LinForm(0.0, t.exponent.coefficients());
    }
  }
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
    if (exponent_less(a.exponent, b.exponent)) return true;
    if (exponent_less(b.exponent, a.exponent)) return false;
    return a.coefficient < b.coefficient;
  });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    auto it = std::find_if(merged.rbegin(), merged.rend(), [&](const Term& m) {
      return exponent_close(m.exponent, t.exponent);
    });
    if (it != merged.rend()) {
      it->coefficient += t.coefficient;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const Term& t) { return std::abs(t.coefficient) < kDropBelow; });
  terms_ = std::move(merged);
}

bool ExpLinExpr::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.exponent.is_constant(); });
}

double ExpLinExpr::constant_value() const {
  double v = 0.0;
  for (const auto& t : terms_) {
    if (!t.exponent.is_constant()) {
      throw Error(ErrorKind::NotConstant,
                  "expression still depends on attributes: " + to_string());
    }
    v += t.coefficient;
  }
  return v;
}

std::vector<int> ExpLinExpr::pending_variables() const {
  std::vector<int> out;
  for (const auto& t : terms_) {
    for (const auto& [attr, c] : t.exponent.coefficients()) out.push_back(attr);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ExpLinExpr::evaluate(std::span<const double> y) const {
  double v = 0.0;
  for (const auto& t : terms_) v += t.coefficient * std::exp(t.exponent.evaluate(y));
  return v;
}

ExpLinExpr ExpLinExpr::partial_evaluate(int attribute, double value) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    const double b = t.exponent.coefficient(attribute);
    if (b == 0.0) {
      out.push_back(t);
      continue;
    }
    auto rest = t.exponent + LinForm::variable(attribute, -b);
    out.push_back({t.coefficient * std::exp(b * value), rest});
  }
  return ExpLinExpr(std::move(out));
}

ExpLinExpr ExpLinExpr::operator+(const ExpLinExpr& other) const {
  std::vector<Term> out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return ExpLinExpr(std::move(out));
}

ExpLinExpr ExpLinExpr::operator-(const ExpLinExpr& other) const { return *this + other * -1.0; }

ExpLinExpr ExpLinExpr::operator*(const ExpLinExpr& other) const { return expr_mul(*this, other); }

ExpLinExpr ExpLinExpr::operator*(double s) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coefficient *= s;
  return ExpLinExpr(std::move(out));
}

std::string ExpLinExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (size_t k = 0; k < terms_.size(); ++k) {
    const auto& t = terms_[k];
    if (k) os << (t.coefficient < 0 ? " - " : " + ");
    else if (t.coefficient < 0) os << "-";
    os << fmt(std::abs(t.coefficient));
    if (!t.exponent.is_constant()) os << "*exp(" << t.exponent.to_string() << ")";
  }
  return os.str();
}

ExpLinExpr expr_mul(const ExpLinExpr& a, const ExpLinExpr& b) {
  std::vector<ExpLinExpr::Term> out;
  out.reserve(a.terms().size() * b.terms().size());
  for (const auto& x : a.terms()) {
    for (const auto& y : b.terms()) {
      out.push_back({x.coefficient * y.coefficient, x.exponent + y.exponent});
    }
  }
  return ExpLinExpr(std::move(out));
}

ExpLinExpr gaussian_expectation(const ExpLinExpr& e, int attribute, const LinForm& mean,
                                double sigma) {
  if (mean.mentions(attribute)) {
    throw Error(ErrorKind::SelfReferentialMean,
                "mean of y" + std::to_string(attribute) + " depends on itself");
  }
  if (!(sigma >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "standard deviation must be non-negative");
  }
  std::vector<ExpLinExpr::Term> out;
  out.reserve(e.terms().size());
  for (const auto& t : e.terms()) {
    const double b = t.exponent.coefficient(attribute);
    if (b == 0.0) {
      out.push_back(t);
      continue;
    }
    auto rest = t.exponent + LinForm::variable(attribute, -b);
    auto shifted = rest + mean * b + LinForm(0.5 * b * b * sigma * sigma);
    out.push_back({t.coefficient, shifted});
  }
  return ExpLinExpr(std::move(out));
}

}  // namespace deun
