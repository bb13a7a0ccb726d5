#include "deun/corner.hpp"

#include <algorithm>
#include <iterator>

#include "deun/errors.hpp"

namespace deun {

CornerConfig::CornerConfig(std::vector<int> scope, std::uint64_t index)
    : scope_(std::move(scope)), index_(index) {
  if (index_ >= config_count(size())) {
    throw Error(ErrorKind::InvalidArgument, "corner index out of range for scope");
  }
}

CornerConfig CornerConfig::from_key(std::vector<int> scope, std::string_view key) {
  if (!is_valid_key(key, static_cast<int>(scope.size()))) {
    throw Error(ErrorKind::InvalidArgument,
                "corner key '" + std::string(key) + "' does not match a scope of size " +
                    std::to_string(scope.size()));
  }
  return CornerConfig(std::move(scope), key_to_index(key));
}

Corner CornerConfig::at(int attribute) const {
  auto it = std::lower_bound(scope_.begin(), scope_.end(), attribute);
  if (it == scope_.end() || *it != attribute) {
    throw Error(ErrorKind::InvalidArgument,
                "attribute " + std::to_string(attribute) + " not in corner scope");
  }
  const int pos = static_cast<int>(it - scope_.begin());
  const int shift = size() - 1 - pos;
  return ((index_ >> shift) & 1u) ? Corner::Star : Corner::Zero;
}

CornerConfig CornerConfig::restrict_to(const std::vector<int>& sub) const {
  std::uint64_t idx = 0;
  for (int a : sub) idx = (idx << 1) | (is_star(a) ? 1u : 0u);
  return CornerConfig(sub, idx);
}

std::string CornerConfig::key() const { return index_to_key(index_, size()); }

std::uint64_t config_count(int scope_size) {
  if (scope_size < 0 || scope_size > 62) {
    throw Error(ErrorKind::TooLarge, "corner scope too large: " + std::to_string(scope_size));
  }
  return std::uint64_t{1} << scope_size;
}

bool is_valid_key(std::string_view key, int scope_size) {
  if (static_cast<int>(key.size()) != scope_size) return false;
  return std::all_of(key.begin(), key.end(), [](char c) { return c == '0' || c == '*'; });
}

std::uint64_t key_to_index(std::string_view key) {
  std::uint64_t idx = 0;
  for (char c : key) idx = (idx << 1) | (c == '*' ? 1u : 0u);
  return idx;
}

std::string index_to_key(std::uint64_t index, int scope_size) {
  std::string key(scope_size, '0');
  for (int pos = 0; pos < scope_size; ++pos) {
    if ((index >> (scope_size - 1 - pos)) & 1u) key[pos] = '*';
  }
  return key;
}

std::vector<int> scope_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace deun
