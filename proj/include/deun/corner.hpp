#pragma once

// Corner configurations: every attribute in a scope pinned to its worst (0)
// or best (*) reference value.
//
// Canonical order over a scope s_0 < s_1 < ... < s_{k-1} is binary counting
// with star = 1 and s_0 as the most significant bit, so index 0 is all-zero
// and index 2^k - 1 is all-star.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace deun {

enum class Corner : std::uint8_t { Zero = 0, Star = 1 };

class CornerConfig {
 public:
  CornerConfig() = default;
  /// scope must be sorted ascending without duplicates; index < 2^|scope|.
  CornerConfig(std::vector<int> scope, std::uint64_t index);

  static CornerConfig from_key(std::vector<int> scope, std::string_view key);

  const std::vector<int>& scope() const noexcept { return scope_; }
  std::uint64_t index() const noexcept { return index_; }
  int size() const noexcept { return static_cast<int>(scope_.size()); }

  Corner at(int attribute) const;
  bool is_star(int attribute) const { return at(attribute) == Corner::Star; }

  /// Restriction onto a sub-scope (every attribute of sub must be in scope).
  CornerConfig restrict_to(const std::vector<int>& sub) const;

  /// '0' / '*' per scope attribute, ascending attribute order.
  std::string key() const;

  bool operator==(const CornerConfig&) const = default;

 private:
  std::vector<int> scope_;
  std::uint64_t index_ = 0;
};

/// 2^k as a size; throws for k beyond 62.
std::uint64_t config_count(int scope_size);

/// Checks that key has one '0'/'*' per scope attribute.
bool is_valid_key(std::string_view key, int scope_size);

/// Canonical index of key; requires is_valid_key.
std::uint64_t key_to_index(std::string_view key);
std::string index_to_key(std::uint64_t index, int scope_size);

/// Sorted union / difference helpers for attribute scopes.
std::vector<int> scope_union(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace deun
