#include <algorithm>
#include <map>
#include <set>

#include "relcd/rpcd.hpp"

namespace relcd {

void propagate(AttributeGraph& h, const std::set<AttrTriple>& n) {
  auto in_n = [&](const std::string& a, const std::string& b, const std::string& c) { return n.count({a, b, c}) > 0; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [p, q] : h.edges()) {
      for (const auto& [a, b] : {std::pair{p, q}, std::pair{q, p}}) {
        if (!h.has_undirected(a, b)) continue;
        // R1: c -> a - b with <c, a, b> a known non-collider
        for (const auto& c : h.parents(a))
          if (c != b && in_n(c, a, b)) {
            h.orient(a, b);
            changed = true;
            break;
          }
        if (!h.has_undirected(a, b)) continue;
        // R2: a -> c -> b
        for (const auto& c : h.children(a))
          if (h.has_directed(c, b)) {
            h.orient(a, b);
            changed = true;
            break;
          }
        if (!h.has_undirected(a, b)) continue;
        // R3: a - c1 -> b, a - c2 -> b, <c1, a, c2> a known non-collider
        const auto und = h.undirected_neighbors(a);
        bool done = false;
        for (std::size_t i = 0; i < und.size() && !done; ++i)
          for (std::size_t j = 0; j < und.size() && !done; ++j)
            if (i != j && und[i] != b && und[j] != b && h.has_directed(und[i], b) && h.has_directed(und[j], b) &&
                in_n(und[i], a, und[j])) {
              h.orient(a, b);
              changed = done = true;
            }
        if (done) continue;
        // R4: a - c1, c1 -> c2 -> b, a adjacent to c2, <c1, a, b> a known non-collider
        for (const auto& c1 : und) {
          if (c1 == b || done) continue;
          for (const auto& c2 : h.children(c1))
            if (c2 != a && h.adjacent(a, c2) && h.has_directed(c2, b) && in_n(c1, a, b)) {
              h.orient(a, b);
              changed = done = true;
              break;
            }
        }
      }
    }
  }
}

namespace {

struct Decision {
  AttrTriple triple;
  VerdictKind kind;
  int margin;
};

/// Orientation state built from accepted decisions.
struct State {
  std::map<std::pair<std::string, std::string>, int> arrows;  // (from, to) -> multiplicity
  std::vector<AttrTriple> non_colliders;

  bool has(const std::string& a, const std::string& b) const { return arrows.count({a, b}) > 0; }
};

std::vector<std::pair<std::string, std::string>> arrows_of(const Decision& d) {
  const auto& [x, y, z] = d.triple;
  if (d.kind == VerdictKind::NonCollider) {
    if (x == z) return {{y, x}};
    return {};
  }
  if (x == z) return {{x, y}};
  return {{x, y}, {z, y}};
}

bool acyclic(const State& s) {
  std::map<std::string, std::vector<std::string>> adj;
  std::map<std::string, int> indeg;
  for (const auto& [e, _] : s.arrows) {
    adj[e.first].push_back(e.second);
    indeg[e.second]++;
    indeg.try_emplace(e.first, 0);
  }
  std::vector<std::string> ready;
  for (const auto& [v, d] : indeg)
    if (d == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& c : adj[v])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  return seen == indeg.size();
}

bool consistent(const State& s) {
  for (const auto& [e, _] : s.arrows)
    if (s.has(e.second, e.first)) return false;
  for (const auto& t : s.non_colliders)
    if (s.has(t[0], t[1]) && s.has(t[2], t[1])) return false;
  return acyclic(s);
}

bool add(State& s, const Decision& d) {
  for (const auto& a : arrows_of(d)) s.arrows[a]++;
  if (d.kind == VerdictKind::NonCollider && d.triple[0] != d.triple[2]) s.non_colliders.push_back(d.triple);
  return consistent(s);
}

void remove(State& s, const Decision& d) {
  for (const auto& a : arrows_of(d))
    if (--s.arrows[a] == 0) s.arrows.erase(a);
  if (d.kind == VerdictKind::NonCollider && d.triple[0] != d.triple[2]) s.non_colliders.pop_back();
}

class MaxConsistent {
 public:
  explicit MaxConsistent(const std::vector<Decision>& ds) : ds_(ds) {}

  std::vector<std::vector<bool>> solve() {
    std::vector<bool> pick(ds_.size(), false);
    State s;
    dfs(0, 0, pick, s);
    return best_sets_;
  }
  bool exhausted() const { return nodes_ > kNodeLimit; }

 private:
  static constexpr long kNodeLimit = 2'000'000;

  void dfs(std::size_t i, int count, std::vector<bool>& pick, State& s) {
    if (++nodes_ > kNodeLimit) return;
    if (count + static_cast<int>(ds_.size() - i) < best_) return;
    if (i == ds_.size()) {
      if (count > best_) {
        best_ = count;
        best_sets_.clear();
      }
      if (best_sets_.size() < 256) best_sets_.push_back(pick);
      return;
    }
    if (add(s, ds_[i])) {
      pick[i] = true;
      dfs(i + 1, count + 1, pick, s);
      pick[i] = false;
    }
    remove(s, ds_[i]);
    dfs(i + 1, count, pick, s);
  }

  const std::vector<Decision>& ds_;
  int best_ = -1;
  long nodes_ = 0;
  std::vector<std::vector<bool>> best_sets_;
};

}  // namespace

Model orient(const Model& undirected, const std::vector<Verdict>& verdicts, bool sequential, RunReport* report) {
  // votes per triple; non-RBO triples are stored with x < z
  std::map<AttrTriple, std::pair<int, int>> votes;  // collider, non-collider
  for (const auto& v : verdicts) {
    if (v.kind == VerdictKind::Weak) continue;
    AttrTriple t = v.triple;
    if (t[0] > t[2]) std::swap(t[0], t[2]);
    auto& c = votes[t];
    (v.kind == VerdictKind::Collider ? c.first : c.second)++;
  }
  std::vector<Decision> ds;
  for (const auto& [t, c] : votes) {
    if (c.first == c.second) continue;
    ds.push_back({t, c.first > c.second ? VerdictKind::Collider : VerdictKind::NonCollider, std::abs(c.first - c.second)});
  }

  std::vector<bool> chosen(ds.size(), false);
  if (sequential) {
    State s;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (add(s, ds[i]))
        chosen[i] = true;
      else
        remove(s, ds[i]);
    }
  } else {
    std::stable_sort(ds.begin(), ds.end(), [](const Decision& a, const Decision& b) { return a.margin > b.margin; });
    MaxConsistent solver(ds);
    auto sols = solver.solve();
    if (report && solver.exhausted()) report->log.push_back("orient: search limit reached; best found kept");
    // among co-maximal solutions prefer the one sharing most orientations
    std::map<std::pair<std::string, std::string>, int> freq;
    std::vector<std::set<std::pair<std::string, std::string>>> arrows(sols.size());
    for (std::size_t k = 0; k < sols.size(); ++k) {
      for (std::size_t i = 0; i < ds.size(); ++i)
        if (sols[k][i])
          for (const auto& a : arrows_of(ds[i])) arrows[k].insert(a);
      for (const auto& a : arrows[k]) freq[a]++;
    }
    std::size_t best = 0;
    long best_score = -1;
    for (std::size_t k = 0; k < sols.size(); ++k) {
      long score = 0;
      for (const auto& a : arrows[k]) score += freq[a];
      if (score > best_score) {
        best_score = score;
        best = k;
      }
    }
    if (!sols.empty()) chosen = sols[best];
  }

  Model m = undirected;
  m.clear_orientations();
  std::set<AttrTriple> n;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!chosen[i]) {
      if (report) report->log.push_back("orient: dropped conflicting decision on <" + ds[i].triple[0] + "," +
                                        ds[i].triple[1] + "," + ds[i].triple[2] + ">");
      continue;
    }
    for (const auto& [a, b] : arrows_of(ds[i])) m.graph().orient(a, b);
    if (ds[i].kind == VerdictKind::NonCollider && ds[i].triple[0] != ds[i].triple[2]) {
      n.insert(ds[i].triple);
      n.insert({ds[i].triple[2], ds[i].triple[1], ds[i].triple[0]});
    }
  }
  propagate(m.graph(), n);
  m.non_colliders() = n;
  return m;
}

}  // namespace relcd
