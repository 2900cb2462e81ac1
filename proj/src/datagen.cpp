#include "relcd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace relcd {

LinearGaussianParams parametrize(const Model& m, std::uint64_t seed, double noise_sd, double coeff_sd) {
  if (!m.acyclic()) throw std::invalid_argument("parametrize: model is cyclic");
  LinearGaussianParams p;
  p.noise_sd = noise_sd;
  p.coeff_sd = coeff_sd;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gamma(0.0, coeff_sd);
  for (const auto& d : m.directed_dependencies()) p.beta[d] = 1.0 + std::abs(gamma(rng));
  return p;
}

namespace {

std::vector<std::string> attribute_order(const AttributeGraph& h) {
  std::map<std::string, int> indeg;
  for (const auto& x : h.nodes()) indeg[x] = static_cast<int>(h.parents(x).size());
  std::vector<std::string> order;
  std::vector<std::string> ready;
  for (const auto& [x, d] : indeg)
    if (d == 0) ready.push_back(x);
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    auto x = ready.back();
    ready.pop_back();
    order.push_back(x);
    for (const auto& c : h.children(x))
      if (--indeg[c] == 0) ready.push_back(c);
  }
  if (order.size() != h.nodes().size()) throw std::invalid_argument("generate_data: model is cyclic");
  return order;
}

}  // namespace

AttrData generate_data(const Model& m, const LinearGaussianParams& p, const Skeleton& sk, std::uint64_t seed) {
  if (!(m.schema() == sk.schema())) throw std::invalid_argument("generate_data: schema mismatch");
  if (!m.fully_directed()) throw std::invalid_argument("generate_data: model has undirected dependencies");
  const Schema& s = m.schema();
  AttrData data(sk);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, 1.0);
  for (const auto& a : s.attributes())
    for (ItemIndex i : sk.items_of(a.owner)) data.set(i, a.id, p.noise_sd * eps(rng));

  std::map<std::string, std::vector<RelationalDependency>> parents;
  for (const auto& d : m.directed_dependencies()) {
    if (!p.beta.count(d)) throw std::invalid_argument("generate_data: no coefficient for " + d.to_string());
    parents[d.effect].push_back(d);
  }
  TerminalSetCache ts(sk);
  for (const auto& x : attribute_order(m.graph())) {
    auto it = parents.find(x);
    if (it == parents.end()) continue;
    for (ItemIndex i : sk.items_of(s.owner(x))) {
      double v = data.get(i, x);
      for (const auto& d : it->second) {
        const auto& t = ts.get(d.cause.path, i);
        if (t.empty()) continue;
        double sum = 0;
        for (ItemIndex j : t) sum += data.get(j, d.cause.attr);
        v += p.beta.at(d) * sum / static_cast<double>(t.size());
      }
      data.set(i, x, v);
    }
  }
  return data;
}

Model random_rcm(const Schema& s, std::uint64_t seed, const RcmGenConfig& cfg) {
  if (cfg.hop_choices.empty()) throw std::invalid_argument("random_rcm: no hop choices");
  std::mt19937_64 rng(seed);
  const std::size_t want = 3 * s.attributes().size() / 2;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    const int h = cfg.hop_choices[std::uniform_int_distribution<std::size_t>(0, cfg.hop_choices.size() - 1)(rng)];
    std::vector<RelationalDependency> pool;
    for (const auto& c : enumerate_candidate_deps(s, h)) {
      RelationalDependency fwd = c, bwd = c.reversed();
      fwd.directed = bwd.directed = true;
      pool.push_back(fwd);
      pool.push_back(bwd);
    }
    std::shuffle(pool.begin(), pool.end(), rng);

    Model m(s, h);
    std::map<std::string, int> parent_count;
    std::size_t added = 0;
    for (const auto& d : pool) {
      if (added == want) break;
      if (m.has_adjacency(d)) continue;
      if (parent_count[d.effect] >= cfg.max_parents) continue;
      const auto& cause = d.cause.attr;
      if (m.graph().has_directed(d.effect, cause)) continue;
      const bool fresh_pair = !m.graph().adjacent(cause, d.effect);
      m.add_adjacency(d);
      m.graph().orient(cause, d.effect);
      if (fresh_pair && !m.acyclic()) {
        m.remove_adjacency(d);
        continue;
      }
      ++parent_count[d.effect];
      ++added;
    }
    if (added != want) continue;
    bool isolated = false;
    for (const auto& a : s.attributes())
      if (m.graph().adjacents(a.id).empty()) isolated = true;
    if (isolated) continue;
    if (cfg.accept && !cfg.accept(m)) continue;
    return m;
  }
  throw GenerationExhausted("random_rcm: no acceptable model after " + std::to_string(cfg.max_retries) + " attempts");
}

}  // namespace relcd
