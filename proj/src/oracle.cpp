#include "relcd/oracle.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace relcd {

RciOracle::PerSkeleton::PerSkeleton(std::shared_ptr<const Skeleton> s, const Model& m)
    : sk(std::move(s)), gg(GroundGraph::build(m, *sk)), paths(*sk), ds(gg.dag()) {}

RciOracle::RciOracle(const Model& rcm, std::vector<std::shared_ptr<const Skeleton>> skeletons)
    : rcm_(rcm), skeletons_(std::move(skeletons)) {
  if (skeletons_.empty()) throw std::invalid_argument("RciOracle: need at least one skeleton");
  for (const auto& sk : skeletons_) state_.push_back(std::make_unique<PerSkeleton>(sk, rcm_));
}

bool RciOracle::independent(const RelationalVariable& u, const RelationalVariable& v,
                            std::span<const RelationalVariable> w) {
  if (!v.canonical()) throw std::invalid_argument("rci_oracle: V must be canonical");
  if (u.base() != v.base()) throw std::invalid_argument("rci_oracle: U and V have different base classes");
  for (const auto& x : w)
    if (x.base() != v.base()) throw std::invalid_argument("rci_oracle: W member " + x.to_string() + " has another base");

  std::vector<RelationalVariable> wkey(w.begin(), w.end());
  std::sort(wkey.begin(), wkey.end());
  auto key = std::make_tuple(u, v, wkey);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  ++queries_;

  bool indep = true;
  std::vector<NodeIndex> given, targets;
  for (auto& st : state_) {
    const Skeleton& sk = *st->sk;
    for (ItemIndex i : sk.items_of(v.base())) {
      given.clear();
      for (const auto& x : w)
        for (ItemIndex j : st->paths.get(x.path, i)) given.push_back(*st->gg.find(j, x.attr));
      std::sort(given.begin(), given.end());
      const NodeIndex vn = *st->gg.find(i, v.attr);
      if (std::binary_search(given.begin(), given.end(), vn)) continue;
      targets.clear();
      for (ItemIndex j : st->paths.get(u.path, i)) {
        NodeIndex un = *st->gg.find(j, u.attr);
        if (un != vn && !std::binary_search(given.begin(), given.end(), un)) targets.push_back(un);
      }
      if (targets.empty()) continue;
      if (st->ds.any_connected(vn, targets, given)) {
        indep = false;
        break;
      }
    }
    if (!indep) break;
  }
  memo_.emplace(std::move(key), indep);
  return indep;
}

bool rci_oracle(const Model& rcm, const RelationalVariable& u, const RelationalVariable& v,
                std::span<const RelationalVariable> w, std::vector<std::shared_ptr<const Skeleton>> skeletons) {
  RciOracle o(rcm, std::move(skeletons));
  return o.independent(u, v, w);
}

std::string Cut::to_string() const {
  std::string s = "<" + vx.to_string() + ", {";
  for (std::size_t k = 0; k < pys.size(); ++k) s += (k ? ", " : "") + pys[k].to_string();
  return s + "}, " + rz.to_string() + ">";
}

namespace {

/// For one base item: every item reachable by a distinct-item walk whose
/// class sequence is a valid path of at most max_hop hops, with the ids of
/// those paths.
class WalkIndex {
 public:
  WalkIndex(const Skeleton& sk, int max_hop) : sk_(sk), max_hop_(max_hop), names_(sk.schema().item_classes()) {}

  void build(ItemIndex base) {
    reach_.clear();
    stack_.assign(1, base);
    cls_.assign(1, sk_.class_index(base));
    walk();
  }

  const std::vector<int>* paths_to(ItemIndex j) const {
    auto it = reach_.find(j);
    return it == reach_.end() ? nullptr : &it->second;
  }

  const RelationalPath& path(int id) const { return paths_[static_cast<std::size_t>(id)]; }

  void finalize() {
    for (auto& [_, ids] : reach_) {
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
  }

 private:
  int intern() {
    auto [it, fresh] = ids_.try_emplace(cls_, static_cast<int>(paths_.size()));
    if (fresh) {
      RelationalPath p;
      for (int c : cls_) p.classes.push_back(names_[static_cast<std::size_t>(c)]);
      paths_.push_back(std::move(p));
    }
    return it->second;
  }

  void walk() {
    reach_[stack_.back()].push_back(intern());
    if (static_cast<int>(stack_.size()) - 1 >= max_hop_) return;
    const ItemIndex cur = stack_.back();
    for (ItemIndex nb : sk_.neighbors(cur)) {
      if (std::find(stack_.begin(), stack_.end(), nb) != stack_.end()) continue;
      const int c = sk_.class_index(nb);
      const std::size_t n = cls_.size();
      if (n >= 2 && cls_[n - 2] == c) {
        // repeat rule: the middle class must be an entity participating MANY
        const auto& mid = names_[static_cast<std::size_t>(cls_[n - 1])];
        const auto& rel = names_[static_cast<std::size_t>(c)];
        if (!sk_.schema().is_entity(mid) || sk_.schema().participation(mid, rel) != Cardinality::Many) continue;
      }
      stack_.push_back(nb);
      cls_.push_back(c);
      walk();
      cls_.pop_back();
      stack_.pop_back();
    }
  }

  const Skeleton& sk_;
  int max_hop_;
  std::vector<std::string> names_;
  std::vector<ItemIndex> stack_;
  std::vector<int> cls_;
  std::map<ItemIndex, std::vector<int>> reach_;
  std::map<std::vector<int>, int> ids_;
  std::vector<RelationalPath> paths_;
};

}  // namespace

std::vector<Cut> enumerate_cuts(const Model& m, const Skeleton& sk, int max_hop) {
  const Schema& s = m.schema();
  TerminalSetCache ts(sk);
  WalkIndex walks(sk, max_hop);
  // CUT key with path ids: (X, pys ids, rz id, Z)
  std::set<std::tuple<std::string, std::vector<int>, std::string, int, std::string>> keys;

  for (const auto& cls : s.item_classes()) {
    std::vector<std::pair<std::string, std::vector<RelationalVariable>>> anchors;
    for (const auto& x : s.attributes_of(cls))
      if (auto adj = m.neighbors(x); !adj.empty()) anchors.emplace_back(x, std::move(adj));
    if (anchors.empty()) continue;
    for (ItemIndex i : sk.items_of(cls)) {
      walks.build(i);
      walks.finalize();
      for (const auto& [x, x_adj] : anchors) {
        for (const auto& py : x_adj) {
          const std::string& y = py.attr;
          for (ItemIndex j : ts.get(py.path, i)) {
            const auto* pys = walks.paths_to(j);
            if (!pys) continue;
            for (const auto& qz : m.neighbors(y)) {
              const std::string& z = qz.attr;
              for (ItemIndex k : ts.get(qz.path, j)) {
                if (k == i && z == x) continue;
                bool shielded = false;
                for (const auto& rz : x_adj) {
                  if (rz.attr != z) continue;
                  const auto& t = ts.get(rz.path, i);
                  if (std::binary_search(t.begin(), t.end(), k)) {
                    shielded = true;
                    break;
                  }
                }
                if (shielded) continue;
                const auto* rzs = walks.paths_to(k);
                if (!rzs) continue;
                for (int r : *rzs) keys.emplace(x, *pys, y, r, z);
              }
            }
          }
        }
      }
    }
  }

  std::vector<Cut> out;
  out.reserve(keys.size());
  for (const auto& [x, pys, y, r, z] : keys) {
    Cut c;
    c.vx = canonical_variable(s, x);
    for (int p : pys) c.pys.push_back({walks.path(p), y});
    std::sort(c.pys.begin(), c.pys.end());
    c.rz = {walks.path(r), z};
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace relcd
