#pragma once

// Tables indexed by corner configurations of a scope, and the compatible-
// instantiation product between them.
//
// Entry order is canonical (see corner.hpp), so the product is an element-wise
// multiplication after each operand index is read off the result index.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "deun/corner.hpp"
#include "deun/errors.hpp"

namespace deun {

template <class Entry>
class BasicLabeledTable {
 public:
  using entry_type = Entry;

  BasicLabeledTable() : entries_{Entry::constant(1.0)} {}  // unit on the empty scope

  BasicLabeledTable(std::vector<int> scope, std::vector<Entry> entries)
      : scope_(std::move(scope)), entries_(std::move(entries)) {
    if (entries_.size() != config_count(static_cast<int>(scope_.size()))) {
      throw Error(ErrorKind::InvalidArgument, "labeled table needs 2^|scope| entries");
    }
  }

  static BasicLabeledTable unit() { return BasicLabeledTable(); }

  const std::vector<int>& scope() const noexcept { return scope_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const Entry& operator[](std::uint64_t index) const { return entries_[index]; }
  const Entry& at(const CornerConfig& config) const {
    return entries_[config.restrict_to(scope_).index()];
  }
  CornerConfig config(std::uint64_t index) const { return CornerConfig(scope_, index); }

  /// Applies f to every entry in place.
  template <class F>
  BasicLabeledTable& transform(F&& f) {
    for (auto& e : entries_) e = f(e);
    return *this;
  }

 private:
  std::vector<int> scope_;
  std::vector<Entry> entries_;
};

namespace detail {

// For every result scope position, the bit shift inside an operand (or -1).
inline std::vector<int> operand_shifts(const std::vector<int>& result_scope,
                                       const std::vector<int>& operand_scope) {
  std::vector<int> shifts(result_scope.size(), -1);
  const int k = static_cast<int>(operand_scope.size());
  for (size_t u = 0, p = 0; u < result_scope.size(); ++u) {
    if (p < operand_scope.size() && operand_scope[p] == result_scope[u]) {
      shifts[u] = k - 1 - static_cast<int>(p);
      ++p;
    }
  }
  return shifts;
}

inline std::uint64_t operand_index(std::uint64_t result_index, const std::vector<int>& shifts) {
  const int width = static_cast<int>(shifts.size());
  std::uint64_t idx = 0;
  for (int u = 0; u < width; ++u) {
    if (shifts[u] >= 0 && ((result_index >> (width - 1 - u)) & 1u)) {
      idx |= std::uint64_t{1} << shifts[u];
    }
  }
  return idx;
}

}  // namespace detail

/// Reference kernel: one thread, result entries in canonical order.
template <class Entry>
BasicLabeledTable<Entry> table_circ_serial(const BasicLabeledTable<Entry>& a,
                                           const BasicLabeledTable<Entry>& b) {
  auto scope = scope_union(a.scope(), b.scope());
  const auto sa = detail::operand_shifts(scope, a.scope());
  const auto sb = detail::operand_shifts(scope, b.scope());
  const std::uint64_t total = config_count(static_cast<int>(scope.size()));
  std::vector<Entry> out;
  out.reserve(total);
  for (std::uint64_t r = 0; r < total; ++r) {
    out.push_back(a[detail::operand_index(r, sa)] * b[detail::operand_index(r, sb)]);
  }
  return BasicLabeledTable<Entry>(std::move(scope), std::move(out));
}

/// Tables below this entry count stay on the calling thread.
inline constexpr std::uint64_t kParallelCircThreshold = 32;

/// OpenMP kernel; entry-for-entry identical to table_circ_serial.
template <class Entry>
BasicLabeledTable<Entry> table_circ(const BasicLabeledTable<Entry>& a,
                                    const BasicLabeledTable<Entry>& b) {
  auto scope = scope_union(a.scope(), b.scope());
  const auto sa = detail::operand_shifts(scope, a.scope());
  const auto sb = detail::operand_shifts(scope, b.scope());
  const std::uint64_t total = config_count(static_cast<int>(scope.size()));
  std::vector<Entry> out(total);
  const auto n = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(static) if (total >= kParallelCircThreshold)
  for (std::int64_t r = 0; r < n; ++r) {
    const auto ur = static_cast<std::uint64_t>(r);
    out[r] = a[detail::operand_index(ur, sa)] * b[detail::operand_index(ur, sb)];
  }
  return BasicLabeledTable<Entry>(std::move(scope), std::move(out));
}

/// Sum of all entries; each must be constant (NotConstant otherwise).
template <class Entry>
double table_reduce_sum(const BasicLabeledTable<Entry>& t) {
  double sum = 0.0;
  for (const auto& e : t.entries()) sum += e.constant_value();
  return sum;
}

}  // namespace deun

#include "deun/expr.hpp"

namespace deun {
using LabeledTable = BasicLabeledTable<ExpLinExpr>;
}  // namespace deun
