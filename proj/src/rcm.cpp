#include "relcd/rcm.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace relcd {

RelationalDependency RelationalDependency::undirected_key() const {
  RelationalDependency a{cause, effect, false};
  RelationalDependency b = a.reversed();
  return std::min(a, b);
}

std::string RelationalDependency::to_string() const {
  return cause.to_string() + (directed ? " -> " : " - ") + effect_variable().to_string();
}

bool valid_path(const Schema& s, const std::vector<std::string>& classes) {
  if (classes.empty()) return false;
  for (const auto& c : classes)
    if (!s.is_item_class(c)) return false;
  for (std::size_t k = 0; k + 1 < classes.size(); ++k) {
    const auto& a = classes[k];
    const auto& b = classes[k + 1];
    const bool ok = (s.is_entity(a) && s.participation(a, b)) || (s.is_entity(b) && s.participation(b, a));
    if (!ok) return false;
  }
  for (std::size_t k = 1; k + 1 < classes.size(); ++k) {
    if (classes[k - 1] != classes[k + 1]) continue;
    const auto& mid = classes[k];
    // A relationship item holds a single item per participating entity
    // class, so E-R-E never has a distinct-item instance.
    if (s.is_relationship(mid)) return false;
    if (s.participation(mid, classes[k - 1]) != Cardinality::Many) return false;
  }
  return true;
}

Cardinality path_cardinality(const Schema& s, const RelationalPath& p) {
  for (std::size_t k = 0; k + 1 < p.classes.size(); ++k) {
    const auto& a = p.classes[k];
    if (s.is_entity(a) && s.participation(a, p.classes[k + 1]) == Cardinality::Many) return Cardinality::Many;
  }
  return Cardinality::One;
}

std::vector<RelationalPath> enumerate_paths(const Schema& s, const std::string& base, int max_hops) {
  std::vector<RelationalPath> out;
  std::vector<std::string> cur{base};
  std::function<void()> rec = [&] {
    out.emplace_back(cur);
    if (static_cast<int>(cur.size()) - 1 >= max_hops) return;
    for (const auto& nb : s.neighbors(cur.back())) {
      cur.push_back(nb);
      const std::size_t n = cur.size();
      bool ok = true;
      if (n >= 3 && cur[n - 3] == cur[n - 1]) {
        const auto& mid = cur[n - 2];
        ok = s.is_entity(mid) && s.participation(mid, cur[n - 1]) == Cardinality::Many;
      }
      if (ok) rec();
      cur.pop_back();
    }
  };
  rec();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RelationalDependency> enumerate_candidate_deps(const Schema& s, int max_hops) {
  std::set<RelationalDependency> out;
  for (const auto& y : s.attributes()) {
    for (const auto& p : enumerate_paths(s, y.owner, max_hops)) {
      for (const auto& x : s.attributes_of(p.terminal())) {
        if (x == y.id) continue;
        out.insert(RelationalDependency{{p, x}, y.id, false}.undirected_key());
      }
    }
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------

void AttributeGraph::add_undirected(const std::string& a, const std::string& b) {
  if (a == b) throw std::invalid_argument("attribute graph: self loop on " + a);
  auto key = std::minmax(a, b);
  edges_.try_emplace({key.first, key.second}, Mark::Undirected);
}

bool AttributeGraph::adjacent(const std::string& a, const std::string& b) const {
  auto key = std::minmax(a, b);
  return edges_.count({key.first, key.second}) > 0;
}

bool AttributeGraph::has_directed(const std::string& from, const std::string& to) const {
  auto it = edges_.find({std::min(from, to), std::max(from, to)});
  if (it == edges_.end()) return false;
  return from < to ? it->second == Mark::Forward : it->second == Mark::Backward;
}

bool AttributeGraph::has_undirected(const std::string& a, const std::string& b) const {
  auto it = edges_.find({std::min(a, b), std::max(a, b)});
  return it != edges_.end() && it->second == Mark::Undirected;
}

bool AttributeGraph::orient(const std::string& from, const std::string& to) {
  auto it = edges_.find({std::min(from, to), std::max(from, to)});
  if (it == edges_.end()) return false;
  it->second = from < to ? Mark::Forward : Mark::Backward;
  return true;
}

void AttributeGraph::unorient(const std::string& a, const std::string& b) {
  auto it = edges_.find({std::min(a, b), std::max(a, b)});
  if (it != edges_.end()) it->second = Mark::Undirected;
}

std::vector<std::string> AttributeGraph::parents(const std::string& x) const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (has_directed(n, x)) out.push_back(n);
  return out;
}

std::vector<std::string> AttributeGraph::children(const std::string& x) const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (has_directed(x, n)) out.push_back(n);
  return out;
}

std::vector<std::string> AttributeGraph::undirected_neighbors(const std::string& x) const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (n != x && has_undirected(x, n)) out.push_back(n);
  return out;
}

std::vector<std::string> AttributeGraph::adjacents(const std::string& x) const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (n != x && adjacent(x, n)) out.push_back(n);
  return out;
}

std::vector<std::pair<std::string, std::string>> AttributeGraph::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, _] : edges_) out.push_back(k);
  return out;
}

std::size_t AttributeGraph::directed_count() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const auto& e) { return e.second != Mark::Undirected; }));
}

bool AttributeGraph::directed_acyclic() const {
  // Kahn over directed edges only.
  std::map<std::string, int> indeg;
  for (const auto& n : nodes_) indeg[n] = 0;
  for (const auto& n : nodes_)
    for (const auto& c : children(n)) ++indeg[c];
  std::vector<std::string> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.push_back(n);
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto n = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& c : children(n))
      if (--indeg[c] == 0) ready.push_back(c);
  }
  return seen == nodes_.size();
}

// ---------------------------------------------------------------------------

Model::Model(Schema schema, int hop_threshold) : schema_(std::move(schema)), hop_threshold_(hop_threshold) {
  std::vector<std::string> attrs;
  for (const auto& a : schema_.attributes()) attrs.push_back(a.id);
  h_ = AttributeGraph(std::move(attrs));
}

Model Model::from_dependencies(Schema schema, const std::vector<RelationalDependency>& deps, int hop_threshold) {
  Model m(std::move(schema), hop_threshold);
  for (const auto& d : deps) {
    if (!m.schema_.has_attribute(d.effect) || !m.schema_.has_attribute(d.cause.attr))
      throw std::invalid_argument("dependency " + d.to_string() + " uses unknown attributes");
    if (d.cause.attr == d.effect) throw std::invalid_argument("dependency " + d.to_string() + " is a self loop");
    if (!valid_path(m.schema_, d.cause.path)) throw std::invalid_argument("dependency " + d.to_string() + " has an invalid path");
    if (m.schema_.owner(d.effect) != d.cause.base() || m.schema_.owner(d.cause.attr) != d.cause.path.terminal())
      throw std::invalid_argument("dependency " + d.to_string() + " does not match attribute owners");
    m.add_adjacency(d);
  }
  for (const auto& d : deps) {
    if (!d.directed) continue;
    if (m.h_.has_directed(d.effect, d.cause.attr))
      throw std::invalid_argument("conflicting directions between " + d.cause.attr + " and " + d.effect);
    m.h_.orient(d.cause.attr, d.effect);
  }
  return m;
}

void Model::add_adjacency(const RelationalDependency& dep) {
  adjacencies_.insert(dep.undirected_key());
  h_.add_undirected(dep.cause.attr, dep.effect);
}

void Model::remove_adjacency(const RelationalDependency& dep) {
  adjacencies_.erase(dep.undirected_key());
  const auto& x = dep.cause.attr;
  const auto& y = dep.effect;
  bool still = std::any_of(adjacencies_.begin(), adjacencies_.end(), [&](const RelationalDependency& d) {
    return (d.cause.attr == x && d.effect == y) || (d.cause.attr == y && d.effect == x);
  });
  if (!still) {
    // rebuild the graph without this pair
    AttributeGraph g(h_.nodes());
    for (const auto& [a, b] : h_.edges()) {
      if ((a == x && b == y) || (a == y && b == x)) continue;
      g.add_undirected(a, b);
      if (h_.has_directed(a, b)) g.orient(a, b);
      if (h_.has_directed(b, a)) g.orient(b, a);
    }
    h_ = std::move(g);
  }
}

bool Model::has_adjacency(const RelationalDependency& dep) const { return adjacencies_.count(dep.undirected_key()) > 0; }

void Model::clear_orientations() {
  for (const auto& [a, b] : h_.edges()) h_.unorient(a, b);
  n_.clear();
}

std::vector<RelationalDependency> Model::dependencies() const {
  std::vector<RelationalDependency> out;
  for (const auto& a : adjacencies_) {
    const auto& x = a.cause.attr;
    const auto& y = a.effect;
    if (h_.has_directed(x, y)) {
      out.push_back({a.cause, y, true});
    } else if (h_.has_directed(y, x)) {
      auto r = a.reversed();
      r.directed = true;
      out.push_back(r);
    } else {
      out.push_back(a);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RelationalDependency> Model::directed_dependencies() const {
  auto all = dependencies();
  std::vector<RelationalDependency> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), [](const auto& d) { return d.directed; });
  return out;
}

std::vector<RelationalVariable> Model::neighbors(const std::string& attr) const {
  std::vector<RelationalVariable> out;
  for (const auto& a : adjacencies_) {
    if (a.effect == attr) out.push_back(a.cause);
    if (a.cause.attr == attr) out.push_back(a.reversed().cause);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<RelationalVariable> Model::parents(const std::string& attr) const {
  std::vector<RelationalVariable> out;
  for (const auto& v : neighbors(attr))
    if (h_.has_directed(v.attr, attr)) out.push_back(v);
  return out;
}

std::vector<RelationalDependency> Model::adjacencies_between(const std::string& effect, const std::string& cause) const {
  std::vector<RelationalDependency> out;
  for (const auto& a : adjacencies_) {
    if (a.effect == effect && a.cause.attr == cause) out.push_back(a);
    else if (a.effect == cause && a.cause.attr == effect) out.push_back(a.reversed());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Model::fully_directed() const {
  for (const auto& [a, b] : h_.edges())
    if (h_.has_undirected(a, b)) return false;
  return true;
}

}  // namespace relcd
