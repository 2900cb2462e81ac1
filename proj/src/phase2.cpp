#include <algorithm>
#include <functional>
#include <set>

#include "combos.hpp"
#include "relcd/rpcd.hpp"

namespace relcd {

namespace {

using Vars = std::vector<RelationalVariable>;
using Builder = std::function<FlatTable(const Vars& s, bool with_y)>;

std::string triple_name(const AttrTriple& t) { return "<" + t[0] + "," + t[1] + "," + t[2] + ">"; }

Vars without_attr(Vars v, const std::string& attr) {
  v.erase(std::remove_if(v.begin(), v.end(), [&](const RelationalVariable& x) { return x.attr == attr; }), v.end());
  return v;
}

/// Relational variables of [I_X].X's neighborhood whose attribute is a
/// parent of X in h.
Vars parent_vars(const Model& m, const AttributeGraph& h, const std::string& x) {
  const auto pa = h.parents(x);
  Vars out;
  for (const auto& v : m.neighbors(x))
    if (std::find(pa.begin(), pa.end(), v.attr) != pa.end()) out.push_back(v);
  return out;
}

class SepsetSearch {
 public:
  SepsetSearch(Tester& t, const LearnerConfig& cfg, RunReport& report) : t_(t), cfg_(cfg), report_(report) {}

  /// Looks for separating sets S = required + T, T drawn from `pool` by
  /// ascending size. Y-free separation gives collider verdicts (weak when
  /// detection finds separation with Y added too); otherwise separation with
  /// Y gives non-collider verdicts. Returns false when no table could be
  /// built.
  bool run(const Vars& required, const Vars& pool, const Builder& build, const std::string& family,
           const AttrTriple& triple, const std::string& context) {
    try {
      build(required, false);
    } catch (const std::invalid_argument& e) {
      report_.log.push_back(family + " skipped for " + context + ": " + e.what());
      return false;
    }
    for (bool with_y : {false, true}) {
      const int top = std::min<int>(cfg_.max_cond_size - static_cast<int>(required.size()), static_cast<int>(pool.size()));
      for (int k = 0; k <= top; ++k) {
        bool truncated = false;
        const auto subsets = detail::combinations(pool, static_cast<std::size_t>(k),
                                                  static_cast<std::size_t>(cfg_.sepset_budget), &truncated);
        if (truncated) report_.log.push_back(family + ": sepset budget reached for " + context);
        std::vector<Vars> found;
        for (const auto& extra : subsets) {
          Vars s = required;
          s.insert(s.end(), extra.begin(), extra.end());
          if (test(build, s, with_y, family) == std::optional<bool>(true)) found.push_back(std::move(s));
        }
        if (found.empty()) continue;
        for (std::size_t f = 0; f < found.size(); ++f) {
          Verdict v{triple, with_y ? VerdictKind::NonCollider : VerdictKind::Collider, family, found[f], context, f == 0};
          if (!with_y && cfg_.detection && test(build, found[f], true, family) == std::optional<bool>(true))
            v.kind = VerdictKind::Weak;
          report_.verdicts.push_back(std::move(v));
        }
        return true;
      }
    }
    return true;
  }

 private:
  std::optional<bool> test(const Builder& build, const Vars& s, bool with_y, const std::string& family) {
    FlatTable tb;
    try {
      tb = build(s, with_y);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < tb.columns.size(); ++c) labels.push_back(tb.columns[c].to_string());
    if (family == "split-rbo") {
      labels[0] = "one(" + labels[0] + ")";
      labels[1] = "rest(" + labels[1] + ")";
    }
    return t_.table_independent(tb.cells[0], tb.cells[1], std::span<const Column>(tb.cells).subspan(2), labels, family);
  }

  Tester& t_;
  const LearnerConfig& cfg_;
  RunReport& report_;
};

/// Non-RBO table for P.X - [I_Y].Y and Q.Z - [I_Y].Y with Q of cardinality
/// ONE. From the I_X side the tested pair is one(P.X) and Q.Z with S taken
/// from the one-item; from the I_Z side it is Q.Z and P.X with S taken from
/// the Q-item.
FlatTable build_non_rbo_table(Tester& t, const RelationalPath& p, const std::string& x, const RelationalPath& q,
                              const std::string& z, const std::string& y, bool x_side, const Vars& s, bool with_y) {
  const Skeleton& sk = t.skeleton();
  const AttrData& data = t.data();
  auto& ts = t.terminal_sets();
  FlatTable tb;
  const RelationalVariable px{p, x}, qz{q, z};
  tb.columns = x_side ? Vars{px, qz} : Vars{qz, px};
  tb.columns.insert(tb.columns.end(), s.begin(), s.end());
  if (with_y) tb.columns.push_back(canonical_variable(sk.schema(), y));
  tb.cells.resize(tb.columns.size());
  std::set<ItemIndex> used;
  const bool p_many = path_cardinality(sk.schema(), p) == Cardinality::Many;
  for (ItemIndex i : sk.items_of(p.base())) {
    const auto& tp = ts.get(p, i);
    const auto& tq = ts.get(q, i);
    if (tp.empty() || tq.size() != 1) continue;
    const ItemIndex k = tq[0];
    if (std::binary_search(tp.begin(), tp.end(), k)) continue;
    auto cells_of = [&](ItemIndex base) {
      for (std::size_t c = 0; c < s.size(); ++c) {
        Cell cell;
        for (ItemIndex r : ts.get(s[c].path, base)) cell.push_back(data.get(r, s[c].attr));
        tb.cells[2 + c].push_back(std::move(cell));
      }
    };
    if (x_side) {
      ItemIndex j = -1;
      for (ItemIndex cand : tp)
        if (!p_many || used.insert(cand).second) {
          j = cand;
          break;
        }
      if (j < 0) continue;
      tb.rows.push_back(i);
      tb.cells[0].push_back({data.get(j, x)});
      tb.cells[1].push_back({data.get(k, z)});
      cells_of(j);
    } else {
      Cell pxs;
      for (ItemIndex j : tp) pxs.push_back(data.get(j, x));
      tb.rows.push_back(i);
      tb.cells[0].push_back({data.get(k, z)});
      tb.cells[1].push_back(std::move(pxs));
      cells_of(k);
    }
    if (with_y) tb.cells.back().push_back({data.get(i, y)});
  }
  if (tb.rows.empty()) throw std::invalid_argument("non-rbo: no rows for " + px.to_string() + " and " + qz.to_string());
  return tb;
}

/// Split-RBO and pair-RBO evidence for every adjacent attribute pair.
/// Returns the pairs (unordered, as sorted pairs) that RBO tests could not
/// orient.
std::set<std::pair<std::string, std::string>> rbo_phase(const Model& m, Tester& t, const LearnerConfig& cfg,
                                                        RunReport& report) {
  const Schema& s = m.schema();
  SepsetSearch search(t, cfg, report);
  std::set<std::pair<std::string, std::string>> weak;
  for (const auto& [a, b] : m.graph().edges()) {
    bool attempted = false;
    const std::size_t before = report.verdicts.size();
    for (const auto& [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
      // perspective P.X - [I_Y].Y
      const auto deps = m.adjacencies_between(y, x);
      const Vars pool = without_attr(m.neighbors(x), y);
      const AttrTriple triple{x, y, x};
      std::vector<RelationalPath> ones;
      for (const auto& d : deps) {
        const RelationalPath& p = d.cause.path;
        if (path_cardinality(s, p) == Cardinality::Many) {
          Builder build = [&, p](const Vars& sv, bool with_y) {
            return build_split_rbo_table(t.skeleton(), t.data(), p, x, y, sv, with_y, true, &t.terminal_sets());
          };
          attempted |= search.run({}, pool, build, "split-rbo", triple, d.to_string());
        } else {
          ones.push_back(p);
        }
      }
      for (std::size_t i = 0; i < ones.size(); ++i)
        for (std::size_t j = i + 1; j < ones.size(); ++j) {
          const RelationalPath p = ones[i], q = ones[j];
          Builder build = [&, p, q](const Vars& sv, bool with_y) {
            return build_pair_rbo_table(t.skeleton(), t.data(), p, q, x, y, sv, with_y, &t.terminal_sets());
          };
          attempted |= search.run({}, pool, build, "pair-rbo", triple,
                                  RelationalVariable{p, x}.to_string() + " & " + RelationalVariable{q, x}.to_string());
        }
    }
    bool oriented = false;
    for (std::size_t k = before; k < report.verdicts.size(); ++k)
      if (report.verdicts[k].kind != VerdictKind::Weak) oriented = true;
    if (attempted && !oriented) weak.insert({a, b});
  }
  return weak;
}

void non_rbo_phase(const Model& m, const AttributeGraph& h1, const std::set<std::pair<std::string, std::string>>& weak,
                   Tester& t, const LearnerConfig& cfg, RunReport& report) {
  const Schema& s = m.schema();
  SepsetSearch search(t, cfg, report);
  auto is_weak = [&](std::string a, std::string b) {
    if (a > b) std::swap(a, b);
    return weak.count({a, b}) > 0;
  };
  for (const auto& y : h1.nodes()) {
    const auto adj = h1.adjacents(y);
    for (std::size_t i = 0; i < adj.size(); ++i)
      for (std::size_t j = i + 1; j < adj.size(); ++j) {
        const std::string& x0 = adj[i];
        const std::string& z0 = adj[j];
        if (h1.adjacent(x0, z0)) continue;
        const AttrTriple triple{x0, y, z0};
        if (is_weak(x0, y) || is_weak(z0, y)) {
          report.log.push_back("non-rbo skipped for " + triple_name(triple) + ": weak pair");
          continue;
        }
        if (h1.has_directed(y, x0) || h1.has_directed(y, z0)) continue;
        if (h1.has_directed(x0, y) && h1.has_directed(z0, y)) continue;
        for (const auto& dx : m.adjacencies_between(y, x0))
          for (const auto& dz : m.adjacencies_between(y, z0)) {
            // orient roles so that Q (the z side) is ONE
            RelationalPath p = dx.cause.path, q = dz.cause.path;
            std::string x = x0, z = z0;
            if (path_cardinality(s, q) == Cardinality::Many) {
              if (path_cardinality(s, p) == Cardinality::Many) {
                report.log.push_back("non-rbo skipped for " + dx.to_string() + " & " + dz.to_string() + ": both many");
                continue;
              }
              std::swap(p, q);
              std::swap(x, z);
            }
            const std::string context = RelationalVariable{p, x}.to_string() + " & " + RelationalVariable{q, z}.to_string();
            for (bool x_side : {true, false}) {
              const std::string& owner = x_side ? x : z;
              const Vars required = parent_vars(m, h1, owner);
              Vars pool = without_attr(m.neighbors(owner), y);
              pool.erase(std::remove_if(pool.begin(), pool.end(),
                                        [&](const RelationalVariable& v) {
                                          return std::find(required.begin(), required.end(), v) != required.end();
                                        }),
                         pool.end());
              Builder build = [&, p, q, x, z, x_side](const Vars& sv, bool with_y) {
                return build_non_rbo_table(t, p, x, q, z, y, x_side, sv, with_y);
              };
              search.run(required, pool, build, "non-rbo", triple, context);
            }
          }
      }
  }
}

/// Alg. 1's CUT loop with immediate orientation; used in oracle mode.
Model literal_cut_phase(const Model& m, Tester& t, const LearnerConfig& cfg, RunReport& report) {
  std::set<Cut> cuts;
  const int max_hop = 2 * cfg.h;
  if (auto* o = t.rci_oracle()) {
    for (const auto& sk : o->skeletons())
      for (auto& c : enumerate_cuts(m, *sk, max_hop)) cuts.insert(std::move(c));
  } else {
    for (auto& c : enumerate_cuts(m, t.skeleton(), max_hop)) cuts.insert(std::move(c));
  }
  report.log.push_back("cut: " + std::to_string(cuts.size()) + " canonical unshielded triples");
  Model out = m;
  out.clear_orientations();
  AttributeGraph& h = out.graph();
  std::set<AttrTriple> n;
  for (const auto& cut : cuts) {
    const std::string& x = cut.vx.attr;
    const std::string& y = cut.pys.front().attr;
    const std::string& z = cut.rz.attr;
    if (n.count({x, y, z})) continue;
    const auto und = h.undirected_neighbors(y);
    if (std::find(und.begin(), und.end(), x) == und.end() && std::find(und.begin(), und.end(), z) == und.end()) continue;
    if (h.has_directed(y, x) || h.has_directed(y, z)) continue;
    const Vars adj = m.neighbors(x);
    std::optional<Vars> sep;
    for (std::size_t k = 0; k <= adj.size() && !sep; ++k)
      for (const auto& sset : detail::combinations(adj, k, static_cast<std::size_t>(cfg.sepset_budget)))
        if (t.independent(cut.rz, cut.vx, sset, 2, "cut")) {
          sep = sset;
          break;
        }
    if (!sep) continue;
    const bool meets = std::any_of(sep->begin(), sep->end(), [&](const RelationalVariable& v) {
      return std::binary_search(cut.pys.begin(), cut.pys.end(), v);
    });
    Verdict v{{x, y, z}, VerdictKind::NonCollider, "cut", *sep, cut.to_string(), true};
    if (!meets) {
      v.kind = VerdictKind::Collider;
      for (const auto& from : {x, z}) {
        if (h.has_directed(y, from))
          report.log.push_back("cut: conflicting collider on " + triple_name(v.triple));
        else
          h.orient(from, y);
      }
    } else if (x == z) {
      if (h.has_directed(x, y))
        report.log.push_back("cut: conflicting orientation " + y + "->" + x);
      else
        h.orient(y, x);
    } else {
      n.insert({x, y, z});
      n.insert({z, y, x});
    }
    report.verdicts.push_back(std::move(v));
    propagate(h, n);
  }
  propagate(h, n);
  out.non_colliders() = n;
  return out;
}

/// CUT-based evidence with the first separating set only; orientation by
/// majority and sequential acceptance.
Model baseline_cut_phase(const Model& m, Tester& t, const LearnerConfig& cfg, RunReport& report) {
  const auto cuts = enumerate_cuts(m, t.skeleton(), 2 * cfg.h);
  report.log.push_back("cut: " + std::to_string(cuts.size()) + " canonical unshielded triples");
  std::map<AttrTriple, int> used;
  for (const auto& cut : cuts) {
    const AttrTriple triple{cut.vx.attr, cut.pys.front().attr, cut.rz.attr};
    if (used[triple]++ >= cfg.cuts_per_triple) continue;
    const Vars adj = m.neighbors(cut.vx.attr);
    std::optional<Vars> sep;
    const int top = std::min<int>(cfg.max_cond_size, static_cast<int>(adj.size()));
    for (int k = 0; k <= top && !sep; ++k)
      for (const auto& sset : detail::combinations(adj, static_cast<std::size_t>(k), static_cast<std::size_t>(cfg.sepset_budget)))
        if (t.independent(cut.rz, cut.vx, sset, 2, "cut")) {
          sep = sset;
          break;
        }
    if (!sep) continue;
    const bool meets = std::any_of(sep->begin(), sep->end(), [&](const RelationalVariable& v) {
      return std::binary_search(cut.pys.begin(), cut.pys.end(), v);
    });
    report.verdicts.push_back({triple, meets ? VerdictKind::NonCollider : VerdictKind::Collider, "cut", *sep, cut.to_string(), true});
  }
  return orient(m, report.verdicts, true, &report);
}

}  // namespace

Model phase2(const Model& undirected, Tester& t, const LearnerConfig& cfg, RunReport& report) {
  Model m = undirected;
  m.clear_orientations();
  if (cfg.mode == Mode::Oracle || t.oracle()) return literal_cut_phase(m, t, cfg, report);
  if (cfg.mode == Mode::BaselineCut) return baseline_cut_phase(m, t, cfg, report);

  const auto weak = rbo_phase(m, t, cfg, report);
  if (cfg.non_rbo) {
    const Model h1 = orient(m, report.verdicts, false, nullptr);
    non_rbo_phase(m, h1.graph(), weak, t, cfg, report);
  }
  return orient(m, report.verdicts, false, &report);
}

}  // namespace relcd
