#include <algorithm>
#include <random>

#include "combos.hpp"
#include "relcd/rpcd.hpp"

namespace relcd {

Model phase1(const Schema& s, Tester& t, const LearnerConfig& cfg, RunReport& report) {
  if (cfg.h < 1) throw std::invalid_argument("phase1: hop threshold must be at least 1");
  Model m(s, cfg.h);
  std::vector<RelationalDependency> order = enumerate_candidate_deps(s, cfg.h);
  for (const auto& d : order) m.add_adjacency(d);
  if (cfg.candidate_order_seed) {
    std::mt19937_64 rng(*cfg.candidate_order_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  report.log.push_back("phase1: " + std::to_string(order.size()) + " candidate adjacencies");

  for (int ell = 0; ell <= cfg.max_cond_size; ++ell) {
    std::map<std::string, std::vector<RelationalVariable>> snapshot;
    if (cfg.order_independent)
      for (const auto& a : s.attributes()) snapshot[a.id] = m.neighbors(a.id);
    std::set<RelationalDependency> removals;
    bool testable = false;

    for (const auto& key : order) {
      if (!m.has_adjacency(key) || removals.count(key)) continue;
      bool removed = false;
      for (const RelationalDependency& persp : {key, key.reversed()}) {
        const RelationalVariable& u = persp.cause;
        const RelationalVariable v = persp.effect_variable();
        std::vector<RelationalVariable> ne = cfg.order_independent ? snapshot[persp.effect] : m.neighbors(persp.effect);
        ne.erase(std::remove(ne.begin(), ne.end(), u), ne.end());
        if (ne.size() < static_cast<std::size_t>(ell)) continue;
        testable = true;
        bool truncated = false;
        const auto subsets = detail::combinations(ne, static_cast<std::size_t>(ell),
                                                  static_cast<std::size_t>(cfg.sepset_budget), &truncated);
        if (truncated)
          report.log.push_back("phase1: sepset budget reached for " + persp.to_string() + " at size " +
                               std::to_string(ell));
        for (const auto& sset : subsets) {
          if (t.independent(u, v, sset, 1, "phase1")) {
            report.sepsets.push_back({u, v, sset, 1});
            removed = true;
            break;
          }
        }
        if (removed) break;
      }
      if (!removed) continue;
      if (cfg.order_independent)
        removals.insert(key);
      else
        m.remove_adjacency(key);
    }
    for (const auto& key : removals) m.remove_adjacency(key);
    if (!testable) break;
  }
  report.log.push_back("phase1: " + std::to_string(m.adjacencies().size()) + " adjacencies retained");
  return m;
}

}  // namespace relcd
