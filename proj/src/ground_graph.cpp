#include "relcd/ground_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace relcd {

void Dag::add_edge(NodeIndex from, NodeIndex to) {
  auto& ch = children_[static_cast<std::size_t>(from)];
  if (std::find(ch.begin(), ch.end(), to) != ch.end()) return;
  ch.push_back(to);
  parents_[static_cast<std::size_t>(to)].push_back(from);
}

std::size_t Dag::edge_count() const {
  std::size_t n = 0;
  for (const auto& c : children_) n += c.size();
  return n;
}

std::vector<NodeIndex> Dag::topological_order() const {
  std::vector<int> indeg(size());
  for (std::size_t v = 0; v < size(); ++v) indeg[v] = static_cast<int>(parents_[v].size());
  std::vector<NodeIndex> ready, order;
  for (std::size_t v = size(); v-- > 0;)
    if (indeg[v] == 0) ready.push_back(static_cast<NodeIndex>(v));
  while (!ready.empty()) {
    NodeIndex v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (NodeIndex c : children_[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
  }
  if (order.size() != size()) return {};
  return order;
}

GroundGraph GroundGraph::build(const Model& rcm, const Skeleton& sk) {
  if (!(rcm.schema() == sk.schema())) throw std::invalid_argument("ground_graph: schema mismatch");
  if (!rcm.fully_directed()) throw std::invalid_argument("ground_graph: model has undirected dependencies");
  GroundGraph g;
  for (const auto& a : rcm.schema().attributes()) g.attrs_.push_back(a.id);
  g.lookup_.assign(g.attrs_.size(), std::vector<NodeIndex>(sk.size(), -1));
  for (std::size_t a = 0; a < g.attrs_.size(); ++a) {
    for (ItemIndex i : sk.items_of(rcm.schema().owner(g.attrs_[a]))) {
      g.lookup_[a][static_cast<std::size_t>(i)] = static_cast<NodeIndex>(g.nodes_.size());
      g.nodes_.push_back({i, static_cast<int>(a)});
    }
  }
  g.dag_ = Dag(g.nodes_.size());
  for (const auto& d : rcm.dependencies()) {
    const auto cause_attr = static_cast<std::size_t>(
        std::find(g.attrs_.begin(), g.attrs_.end(), d.cause.attr) - g.attrs_.begin());
    const auto effect_attr =
        static_cast<std::size_t>(std::find(g.attrs_.begin(), g.attrs_.end(), d.effect) - g.attrs_.begin());
    for (ItemIndex i : sk.items_of(d.effect_class())) {
      const NodeIndex dst = g.lookup_[effect_attr][static_cast<std::size_t>(i)];
      for (ItemIndex j : terminal_set(sk, d.cause.path, i))
        g.dag_.add_edge(g.lookup_[cause_attr][static_cast<std::size_t>(j)], dst);
    }
  }
  if (!g.dag_.acyclic()) throw std::logic_error("ground_graph: instantiated graph is cyclic");
  return g;
}

std::optional<NodeIndex> GroundGraph::find(ItemIndex item, int attr) const {
  if (attr < 0 || static_cast<std::size_t>(attr) >= lookup_.size()) return std::nullopt;
  const auto& col = lookup_[static_cast<std::size_t>(attr)];
  if (item < 0 || static_cast<std::size_t>(item) >= col.size()) return std::nullopt;
  NodeIndex v = col[static_cast<std::size_t>(item)];
  if (v < 0) return std::nullopt;
  return v;
}

std::optional<NodeIndex> GroundGraph::find(ItemIndex item, const std::string& attr) const {
  auto it = std::find(attrs_.begin(), attrs_.end(), attr);
  if (it == attrs_.end()) return std::nullopt;
  return find(item, static_cast<int>(it - attrs_.begin()));
}

std::string GroundGraph::label(const Skeleton& sk, NodeIndex v) const {
  const auto& n = node(v);
  return sk.id(n.item) + "." + attrs_[static_cast<std::size_t>(n.attr)];
}

std::vector<std::pair<NodeIndex, NodeIndex>> GroundGraph::edges() const {
  std::vector<std::pair<NodeIndex, NodeIndex>> out;
  for (std::size_t v = 0; v < dag_.size(); ++v)
    for (NodeIndex c : dag_.children(static_cast<NodeIndex>(v))) out.emplace_back(static_cast<NodeIndex>(v), c);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

DSeparation::DSeparation(const Dag& dag)
    : dag_(&dag),
      in_given_(dag.size()),
      ancestor_(dag.size()),
      reach_(dag.size()),
      seen_up_(dag.size()),
      seen_down_(dag.size()) {}

void DSeparation::run(std::span<const NodeIndex> sources, std::span<const NodeIndex> given) {
  if (++stamp_ == 0) {
    // wrapped around; reset all marks
    for (auto* v : {&in_given_, &ancestor_, &reach_, &seen_up_, &seen_down_}) std::fill(v->begin(), v->end(), 0u);
    stamp_ = 1;
  }
  const auto at = [](std::vector<std::uint32_t>& v, NodeIndex i) -> std::uint32_t& {
    return v[static_cast<std::size_t>(i)];
  };
  // ancestors of the conditioning set (inclusive)
  work_.clear();
  for (NodeIndex z : given) {
    at(in_given_, z) = stamp_;
    if (at(ancestor_, z) != stamp_) {
      at(ancestor_, z) = stamp_;
      work_.push_back(z);
    }
  }
  while (!work_.empty()) {
    NodeIndex v = work_.back();
    work_.pop_back();
    for (NodeIndex p : dag_->parents(v))
      if (at(ancestor_, p) != stamp_) {
        at(ancestor_, p) = stamp_;
        work_.push_back(p);
      }
  }
  // Traverse (node, direction); sign encodes direction: >= 0 arrived from a
  // child (moving up), < 0 arrived from a parent (moving down).
  work_.clear();
  for (NodeIndex s : sources) {
    if (at(in_given_, s) == stamp_) continue;
    if (at(seen_up_, s) != stamp_) {
      at(seen_up_, s) = stamp_;
      work_.push_back(s);
    }
  }
  while (!work_.empty()) {
    NodeIndex code = work_.back();
    work_.pop_back();
    const bool up = code >= 0;
    const NodeIndex v = up ? code : -code - 1;
    const bool conditioned = at(in_given_, v) == stamp_;
    if (!conditioned) at(reach_, v) = stamp_;
    auto push_up = [&](NodeIndex u) {
      if (at(seen_up_, u) != stamp_) {
        at(seen_up_, u) = stamp_;
        work_.push_back(u);
      }
    };
    auto push_down = [&](NodeIndex u) {
      if (at(seen_down_, u) != stamp_) {
        at(seen_down_, u) = stamp_;
        work_.push_back(-u - 1);
      }
    };
    if (up) {
      if (!conditioned) {
        for (NodeIndex p : dag_->parents(v)) push_up(p);
        for (NodeIndex c : dag_->children(v)) push_down(c);
      }
    } else {
      if (!conditioned)
        for (NodeIndex c : dag_->children(v)) push_down(c);
      if (at(ancestor_, v) == stamp_)
        for (NodeIndex p : dag_->parents(v)) push_up(p);
    }
  }
}

bool DSeparation::separated(NodeIndex x, NodeIndex y, std::span<const NodeIndex> given) {
  NodeIndex src[1] = {x};
  run(src, given);
  return !reachable(y);
}

bool DSeparation::any_connected(NodeIndex source, std::span<const NodeIndex> targets,
                                std::span<const NodeIndex> given) {
  NodeIndex src[1] = {source};
  run(src, given);
  for (NodeIndex t : targets)
    if (reachable(t)) return true;
  return false;
}

bool d_separated(const Dag& g, NodeIndex x, NodeIndex y, std::span<const NodeIndex> given) {
  const auto n = static_cast<NodeIndex>(g.size());
  auto check = [&](NodeIndex v) {
    if (v < 0 || v >= n) throw std::out_of_range("d_separated: unknown node " + std::to_string(v));
  };
  check(x);
  check(y);
  for (NodeIndex z : given) check(z);
  if (x == y) throw std::invalid_argument("d_separated: x and y must differ");
  if (std::find(given.begin(), given.end(), x) != given.end() || std::find(given.begin(), given.end(), y) != given.end())
    throw std::invalid_argument("d_separated: endpoints must not be conditioned on");
  DSeparation ds(g);
  return ds.separated(x, y, given);
}

}  // namespace relcd
