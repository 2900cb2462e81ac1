#pragma once

#include <cstddef>
#include <vector>

namespace relcd::detail {

/// Size-k subsets of `pool` in lexicographic index order, at most `limit`
/// of them. Sets `truncated` when more existed.
template <class T>
std::vector<std::vector<T>> combinations(const std::vector<T>& pool, std::size_t k, std::size_t limit,
                                         bool* truncated = nullptr) {
  std::vector<std::vector<T>> out;
  if (truncated) *truncated = false;
  if (k > pool.size()) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (out.size() == limit) {
      if (truncated) *truncated = true;
      return out;
    }
    std::vector<T> s;
    s.reserve(k);
    for (std::size_t i : idx) s.push_back(pool[i]);
    out.push_back(std::move(s));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pool.size() - k + i - 1) --i;
    if (i == 0) return out;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace relcd::detail
