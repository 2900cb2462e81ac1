#pragma once

#include <compare>
#include <string>
#include <vector>

namespace relcd {

/// A walk over item classes, read from the base (perspective) class to the
/// terminal class.
struct RelationalPath {
  std::vector<std::string> classes;

  RelationalPath() = default;
  explicit RelationalPath(std::vector<std::string> c) : classes(std::move(c)) {}
  RelationalPath(std::initializer_list<std::string> c) : classes(c) {}

  const std::string& base() const { return classes.front(); }
  const std::string& terminal() const { return classes.back(); }
  std::size_t hops() const { return classes.empty() ? 0 : classes.size() - 1; }
  bool canonical() const { return classes.size() == 1; }
  RelationalPath reversed() const { return RelationalPath(std::vector<std::string>(classes.rbegin(), classes.rend())); }

  std::string to_string() const;

  bool operator==(const RelationalPath&) const = default;
  /// Shorter paths first, then lexicographic by class ids.
  std::strong_ordering operator<=>(const RelationalPath& o) const;
};

}  // namespace relcd
