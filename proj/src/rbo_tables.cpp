#include <algorithm>
#include <set>
#include <stdexcept>

#include "relcd/rpcd.hpp"

namespace relcd {

namespace {

Cell values(TerminalSetCache& ts, const AttrData& data, const RelationalVariable& v, ItemIndex base) {
  Cell c;
  for (ItemIndex j : ts.get(v.path, base)) c.push_back(data.get(j, v.attr));
  return c;
}

void check_s(const std::string& owner, std::span<const RelationalVariable> s) {
  for (const auto& v : s)
    if (v.base() != owner) throw std::invalid_argument("rbo table: " + v.to_string() + " is not based on " + owner);
}

}  // namespace

FlatTable build_split_rbo_table(const Skeleton& sk, const AttrData& data, const RelationalPath& p,
                                const std::string& x, const std::string& y, std::span<const RelationalVariable> s,
                                bool with_y, bool dedup, TerminalSetCache* cache) {
  TerminalSetCache local(sk);
  TerminalSetCache& tsc = cache ? *cache : local;
  const Schema& sch = sk.schema();
  if (p.base() != sch.owner(y) || p.terminal() != sch.owner(x))
    throw std::invalid_argument("split-rbo: path " + p.to_string() + " does not connect " + y + " to " + x);
  check_s(sch.owner(x), s);
  FlatTable t;
  t.columns = {{p, x}, {p, x}};
  t.columns.insert(t.columns.end(), s.begin(), s.end());
  if (with_y) t.columns.push_back(canonical_variable(sch, y));
  t.cells.resize(t.columns.size());
  std::set<ItemIndex> used;
  for (ItemIndex i : sk.items_of(p.base())) {
    const auto& ts = tsc.get(p, i);
    if (ts.size() < 2) continue;
    for (ItemIndex j : ts) {
      if (dedup && !used.insert(j).second) continue;
      Cell rest;
      for (ItemIndex k : ts)
        if (k != j) rest.push_back(data.get(k, x));
      t.rows.push_back(j);
      t.cells[0].push_back({data.get(j, x)});
      t.cells[1].push_back(std::move(rest));
      for (std::size_t c = 0; c < s.size(); ++c) t.cells[2 + c].push_back(values(tsc, data, s[c], j));
      if (with_y) t.cells.back().push_back({data.get(i, y)});
    }
  }
  if (t.rows.empty()) throw std::invalid_argument("split-rbo: no " + p.base() + " item has two neighbors along " + p.to_string());
  return t;
}

FlatTable build_pair_rbo_table(const Skeleton& sk, const AttrData& data, const RelationalPath& p,
                               const RelationalPath& q, const std::string& x, const std::string& y,
                               std::span<const RelationalVariable> s, bool with_y, TerminalSetCache* cache) {
  TerminalSetCache local(sk);
  TerminalSetCache& tsc = cache ? *cache : local;
  const Schema& sch = sk.schema();
  if (p == q) throw std::invalid_argument("pair-rbo: paths must differ");
  for (const auto* r : {&p, &q})
    if (r->base() != sch.owner(y) || r->terminal() != sch.owner(x))
      throw std::invalid_argument("pair-rbo: path " + r->to_string() + " does not connect " + y + " to " + x);
  check_s(sch.owner(x), s);
  FlatTable t;
  t.columns = {{p, x}, {q, x}};
  t.columns.insert(t.columns.end(), s.begin(), s.end());
  if (with_y) t.columns.push_back(canonical_variable(sch, y));
  t.cells.resize(t.columns.size());
  for (ItemIndex i : sk.items_of(p.base())) {
    const auto& tp = tsc.get(p, i);
    const auto& tq = tsc.get(q, i);
    if (tp.size() != 1 || tq.size() != 1 || tp[0] == tq[0]) continue;
    t.rows.push_back(i);
    t.cells[0].push_back({data.get(tp[0], x)});
    t.cells[1].push_back({data.get(tq[0], x)});
    for (std::size_t c = 0; c < s.size(); ++c) {
      Cell cell = values(tsc, data, s[c], tp[0]);
      Cell other = values(tsc, data, s[c], tq[0]);
      cell.insert(cell.end(), other.begin(), other.end());
      t.cells[2 + c].push_back(std::move(cell));
    }
    if (with_y) t.cells.back().push_back({data.get(i, y)});
  }
  if (t.rows.empty()) throw std::invalid_argument("pair-rbo: no " + p.base() + " item reaches two distinct items");
  return t;
}

}  // namespace relcd
