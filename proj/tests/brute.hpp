#pragma once

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "relcd/ground_graph.hpp"
#include "relcd/skeleton.hpp"

namespace relcd::brute {

/// Terminal items of every walk along `path` from `base` that never revisits
/// an item.
inline std::vector<ItemIndex> walk_terminals(const Skeleton& sk, const RelationalPath& path, ItemIndex base) {
  std::set<ItemIndex> out;
  std::vector<ItemIndex> walk{base};
  std::function<void(std::size_t)> step = [&](std::size_t k) {
    if (k == path.classes.size()) {
      out.insert(walk.back());
      return;
    }
    for (ItemIndex nb : sk.neighbors(walk.back())) {
      if (sk.item(nb).cls != path.classes[k]) continue;
      if (std::find(walk.begin(), walk.end(), nb) != walk.end()) continue;
      walk.push_back(nb);
      step(k + 1);
      walk.pop_back();
    }
  };
  if (sk.item(base).cls == path.base()) step(1);
  return {out.begin(), out.end()};
}

/// d-separation by enumerating every simple path between x and y in the
/// skeleton of the DAG and checking whether each is blocked.
inline bool d_separated(const Dag& g, NodeIndex x, NodeIndex y, const std::vector<NodeIndex>& z) {
  const std::size_t n = g.size();
  std::vector<char> in_z(n, 0), anc_z(n, 0);
  for (auto v : z) in_z[static_cast<std::size_t>(v)] = 1;
  // ancestors of Z (inclusive)
  std::vector<NodeIndex> stack(z.begin(), z.end());
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (anc_z[static_cast<std::size_t>(v)]) continue;
    anc_z[static_cast<std::size_t>(v)] = 1;
    for (auto p : g.parents(v)) stack.push_back(p);
  }
  auto edge = [&](NodeIndex a, NodeIndex b) {
    const auto& c = g.children(a);
    return std::find(c.begin(), c.end(), b) != c.end();
  };
  std::vector<NodeIndex> path{x};
  std::vector<char> on(n, 0);
  on[static_cast<std::size_t>(x)] = 1;
  std::function<bool(NodeIndex)> open_path = [&](NodeIndex v) -> bool {
    if (v == y) {
      for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        const NodeIndex a = path[k - 1], m = path[k], b = path[k + 1];
        const bool collider = edge(a, m) && edge(b, m);
        if (collider ? !anc_z[static_cast<std::size_t>(m)] : in_z[static_cast<std::size_t>(m)]) return false;
      }
      return true;
    }
    std::vector<NodeIndex> nb(g.parents(v).begin(), g.parents(v).end());
    nb.insert(nb.end(), g.children(v).begin(), g.children(v).end());
    for (auto w : nb) {
      if (on[static_cast<std::size_t>(w)]) continue;
      on[static_cast<std::size_t>(w)] = 1;
      path.push_back(w);
      const bool found = open_path(w);
      path.pop_back();
      on[static_cast<std::size_t>(w)] = 0;
      if (found) return true;
    }
    return false;
  };
  return !open_path(x);
}

}  // namespace relcd::brute
