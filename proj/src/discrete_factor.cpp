#include "deun/discrete_factor.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

#include "deun/errors.hpp"

namespace deun {

namespace {

// Strides of a row-major layout with the last variable fastest.
std::vector<size_t> strides_of(const std::vector<int>& cards) {
  std::vector<size_t> s(cards.size(), 1);
  for (int k = static_cast<int>(cards.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * cards[k + 1];
  return s;
}

size_t total_size(const std::vector<int>& cards) {
  return std::accumulate(cards.begin(), cards.end(), size_t{1},
                         [](size_t a, int c) { return a * static_cast<size_t>(c); });
}

// Stride of each union variable inside an operand (0 when absent).
std::vector<size_t> embed_strides(const std::vector<int>& union_vars,
                                  const std::vector<int>& vars,
                                  const std::vector<int>& cards) {
  auto s = strides_of(cards);
  std::vector<size_t> out(union_vars.size(), 0);
  for (size_t u = 0; u < union_vars.size(); ++u) {
    auto it = std::lower_bound(vars.begin(), vars.end(), union_vars[u]);
    if (it != vars.end() && *it == union_vars[u]) out[u] = s[it - vars.begin()];
  }
  return out;
}

template <class Op>
DiscreteFactor combine(const DiscreteFactor& a, const DiscreteFactor& b, Op op) {
  std::vector<int> vars;
  std::set_union(a.vars().begin(), a.vars().end(), b.vars().begin(), b.vars().end(),
                 std::back_inserter(vars));
  std::vector<int> cards(vars.size());
  for (size_t u = 0; u < vars.size(); ++u) {
    auto ia = std::lower_bound(a.vars().begin(), a.vars().end(), vars[u]);
    if (ia != a.vars().end() && *ia == vars[u]) {
      cards[u] = a.cardinalities()[ia - a.vars().begin()];
    } else {
      auto ib = std::lower_bound(b.vars().begin(), b.vars().end(), vars[u]);
      cards[u] = b.cardinalities()[ib - b.vars().begin()];
    }
  }
  for (size_t u = 0; u < vars.size(); ++u) {
    auto ib = std::lower_bound(b.vars().begin(), b.vars().end(), vars[u]);
    if (ib != b.vars().end() && *ib == vars[u] &&
        b.cardinalities()[ib - b.vars().begin()] != cards[u]) {
      throw Error(ErrorKind::InvalidArgument, "cardinality mismatch for attribute " +
                                                  std::to_string(vars[u]));
    }
  }
  const auto sa = embed_strides(vars, a.vars(), a.cardinalities());
  const auto sb = embed_strides(vars, b.vars(), b.cardinalities());
  const size_t total = total_size(cards);
  std::vector<double> values(total);
  std::vector<int> state(vars.size(), 0);
  size_t ia = 0, ib = 0;
  for (size_t r = 0; r < total; ++r) {
    values[r] = op(a.values()[ia], b.values()[ib]);
    for (int k = static_cast<int>(vars.size()) - 1; k >= 0; --k) {
      if (++state[k] < cards[k]) {
        ia += sa[k];
        ib += sb[k];
        break;
      }
      ia -= sa[k] * (cards[k] - 1);
      ib -= sb[k] * (cards[k] - 1);
      state[k] = 0;
    }
  }
  return DiscreteFactor(std::move(vars), std::move(cards), std::move(values));
}

}  // namespace

DiscreteFactor::DiscreteFactor(std::vector<int> vars, std::vector<int> cardinalities,
                               std::vector<double> values)
    : vars_(std::move(vars)), cards_(std::move(cardinalities)), values_(std::move(values)) {
  if (vars_.size() != cards_.size() || !std::is_sorted(vars_.begin(), vars_.end()) ||
      values_.size() != total_size(cards_)) {
    throw Error(ErrorKind::InvalidArgument, "malformed discrete factor");
  }
}

DiscreteFactor DiscreteFactor::constant(double c) { return DiscreteFactor({}, {}, {c}); }

double DiscreteFactor::constant_value() const {
  if (!is_constant()) {
    throw Error(ErrorKind::NotConstant, "discrete factor still depends on attributes");
  }
  return values_[0];
}

double DiscreteFactor::at(const std::vector<int>& states) const {
  const auto s = strides_of(cards_);
  size_t idx = 0;
  for (size_t k = 0; k < vars_.size(); ++k) idx += s[k] * states[vars_[k] - 1];
  return values_[idx];
}

DiscreteFactor DiscreteFactor::operator*(const DiscreteFactor& other) const {
  return combine(*this, other, [](double x, double y) { return x * y; });
}

DiscreteFactor DiscreteFactor::operator+(const DiscreteFactor& other) const {
  return combine(*this, other, [](double x, double y) { return x + y; });
}

DiscreteFactor DiscreteFactor::operator*(double s) const {
  DiscreteFactor out = *this;
  for (auto& v : out.values_) v *= s;
  return out;
}

DiscreteFactor DiscreteFactor::sum_out(int attribute) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), attribute);
  if (it == vars_.end() || *it != attribute) return *this;
  const size_t pos = it - vars_.begin();
  const auto s = strides_of(cards_);
  std::vector<int> vars = vars_;
  std::vector<int> cards = cards_;
  vars.erase(vars.begin() + pos);
  cards.erase(cards.begin() + pos);
  const size_t outer = total_size(std::vector<int>(cards_.begin(), cards_.begin() + pos));
  const size_t inner = s[pos];
  const size_t card = cards_[pos];
  std::vector<double> values(outer * inner, 0.0);
  for (size_t o = 0; o < outer; ++o) {
    for (size_t c = 0; c < card; ++c) {
      for (size_t i = 0; i < inner; ++i) {
        values[o * inner + i] += values_[o * card * inner + c * inner + i];
      }
    }
  }
  return DiscreteFactor(std::move(vars), std::move(cards), std::move(values));
}

}  // namespace deun
