#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

#include "relcd/citest.hpp"

namespace relcd {

FlatTable flatten(const Skeleton& sk, const AttrData& data, const RelationalVariable& u,
                  const RelationalVariable& v, std::span<const RelationalVariable> w, TerminalSetCache* cache) {
  const std::string& base = v.base();
  if (u.base() != base) throw std::invalid_argument("flatten: U and V have different base classes");
  for (const auto& x : w)
    if (x.base() != base) throw std::invalid_argument("flatten: " + x.to_string() + " has another base class");
  TerminalSetCache local(sk);
  TerminalSetCache& ts = cache ? *cache : local;

  FlatTable t;
  t.columns.push_back(u);
  t.columns.push_back(v);
  t.columns.insert(t.columns.end(), w.begin(), w.end());
  t.cells.resize(t.columns.size());
  for (ItemIndex i : sk.items_of(base)) {
    const auto& tu = ts.get(u.path, i);
    if (tu.empty()) continue;
    const auto& tv = ts.get(v.path, i);
    if (tv.empty()) continue;
    t.rows.push_back(i);
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto& col = t.columns[c];
      Cell cell;
      for (ItemIndex j : ts.get(col.path, i)) cell.push_back(data.get(j, col.attr));
      t.cells[c].push_back(std::move(cell));
    }
  }
  return t;
}

std::string to_string(Aggregator f) {
  switch (f) {
    case Aggregator::Average: return "average";
    case Aggregator::Median: return "median";
    case Aggregator::Mode: return "mode";
  }
  return "?";
}

Aggregator aggregator_from_string(const std::string& s) {
  if (s == "average") return Aggregator::Average;
  if (s == "median") return Aggregator::Median;
  if (s == "mode") return Aggregator::Mode;
  throw std::invalid_argument("unknown aggregator '" + s + "'");
}

Column aggregate_column(const Column& col, Aggregator f) {
  Column out;
  out.reserve(col.size());
  for (const auto& c : col) {
    if (c.empty()) throw std::invalid_argument("aggregate_column: empty cell");
    double r = 0;
    if (c.size() == 1) {
      r = c.front();
    } else if (f == Aggregator::Average) {
      for (double x : c) r += x;
      r /= static_cast<double>(c.size());
    } else {
      Cell s = c;
      std::sort(s.begin(), s.end());
      if (f == Aggregator::Median) {
        const std::size_t m = s.size() / 2;
        r = s.size() % 2 ? s[m] : 0.5 * (s[m - 1] + s[m]);
      } else {
        std::size_t best = 0;
        for (std::size_t k = 0; k < s.size();) {
          std::size_t e = k;
          while (e < s.size() && s[e] == s[k]) ++e;
          if (e - k > best) {
            best = e - k;
            r = s[k];
          }
          k = e;
        }
      }
    }
    out.push_back({r});
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("config: bad value for " + key + ": '" + v + "'");
  return out;
}

}  // namespace

CiConfig parse_ci_config(std::string_view text, CiConfig c) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key = value, got '" + line + "'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string val = trim(std::string_view(line).substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    if (key == "alpha") c.alpha = parse_number<double>(key, val);
    else if (key == "n_perm") c.n_perm = parse_number<int>(key, val);
    else if (key == "aggregator") c.aggregator = aggregator_from_string(val);
    else if (key == "median_cap") c.median_cap = parse_number<std::size_t>(key, val);
    else if (key == "icl_tol") c.icl_tol = parse_number<double>(key, val);
    else if (key == "icl_max_rank") c.icl_max_rank = parse_number<int>(key, val);
    else if (key == "ridge") c.ridge = parse_number<double>(key, val);
    else if (key == "block_size") c.block_size = parse_number<int>(key, val);
    else if (key == "parallel") c.parallel = val == "true" || val == "1";
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  if (!(c.alpha > 0 && c.alpha < 1)) throw std::invalid_argument("config: alpha must be in (0, 1)");
  if (c.n_perm < 1) throw std::invalid_argument("config: n_perm must be positive");
  if (c.block_size < 2) throw std::invalid_argument("config: block_size must be at least 2");
  return c;
}

std::string to_text(const CiConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "alpha = " << c.alpha << "\n"
    << "n_perm = " << c.n_perm << "\n"
    << "aggregator = " << to_string(c.aggregator) << "\n"
    << "median_cap = " << c.median_cap << "\n"
    << "icl_tol = " << c.icl_tol << "\n"
    << "icl_max_rank = " << c.icl_max_rank << "\n"
    << "ridge = " << c.ridge << "\n"
    << "block_size = " << c.block_size << "\n"
    << "parallel = " << (c.parallel ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace relcd
