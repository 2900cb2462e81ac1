#include <stdexcept>

#include "relcd/rpcd.hpp"

namespace relcd {

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool has_multi(const Column& c) {
  for (const auto& x : c)
    if (x.size() > 1) return true;
  return false;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Robust: return "robust";
    case Mode::BaselineCut: return "baseline_cut";
    case Mode::Oracle: return "oracle";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "robust") return Mode::Robust;
  if (s == "baseline_cut" || s == "baseline") return Mode::BaselineCut;
  if (s == "oracle") return Mode::Oracle;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Collider: return "collider";
    case VerdictKind::NonCollider: return "non_collider";
    case VerdictKind::Weak: return "weak";
  }
  return "?";
}

Tester::Tester(const Skeleton& sk, const AttrData& data, const LearnerConfig& cfg, RunReport& report)
    : sk_(&sk), data_(&data), cfg_(cfg), report_(report), ts_(std::make_unique<TerminalSetCache>(sk)) {}

Tester::Tester(RciOracle& oracle, const LearnerConfig& cfg, RunReport& report)
    : sk_(oracle.skeletons().back().get()),
      oracle_(&oracle),
      cfg_(cfg),
      report_(report),
      ts_(std::make_unique<TerminalSetCache>(*sk_)) {}

const Column& Tester::full_column(const RelationalVariable& x) {
  auto it = columns_.find(x);
  if (it != columns_.end()) return it->second;
  if (!data_) throw std::logic_error("Tester: no data in oracle mode");
  Column col;
  const auto& items = sk_->items_of(x.base());
  col.reserve(items.size());
  for (ItemIndex i : items) {
    Cell c;
    for (ItemIndex j : ts_->get(x.path, i)) c.push_back(data_->get(j, x.attr));
    col.push_back(std::move(c));
  }
  return columns_.emplace(x, std::move(col)).first->second;
}

std::uint64_t Tester::seed_for(const QueryRecord& rec) const {
  std::uint64_t h = fnv1a(rec.provenance);
  h = fnv1a(rec.u + "|" + rec.v, h);
  for (const auto& w : rec.w) h = fnv1a("|" + w, h);
  return splitmix(h ^ splitmix(cfg_.seed));
}

bool Tester::decide(const Column& a, const Column& b, std::span<const Column> w, QueryRecord& rec) {
  const std::uint64_t seed = seed_for(rec);
  try {
    TestResult r = conditional_test(a, b, w, cfg_.ci, seed);
    rec.p_value = r.p_value;
    rec.independent = !r.reject;
    if (r.fallback_marginal) rec.note = "constant conditioning set; marginal test used";
    if (rec.independent && cfg_.aggregation) {
      const bool agg_a = has_multi(a), agg_b = !agg_a && has_multi(b);
      if (agg_a || agg_b) {
        const Column fa = agg_a ? aggregate_column(a, cfg_.ci.aggregator) : Column{};
        const Column fb = agg_b ? aggregate_column(b, cfg_.ci.aggregator) : Column{};
        TestResult r2 = conditional_test(agg_a ? fa : a, agg_b ? fb : b, w, cfg_.ci, splitmix(seed));
        rec.aggregated = true;
        if (r2.reject) {
          rec.independent = false;
          rec.p_value = r2.p_value;
        }
      }
    }
  } catch (const std::invalid_argument& e) {
    rec.error = true;
    rec.independent = false;
    rec.note = e.what();
  }
  return rec.independent;
}

bool Tester::independent(const RelationalVariable& u, const RelationalVariable& v,
                         std::span<const RelationalVariable> w, int phase, const std::string& provenance) {
  QueryRecord rec;
  rec.u = u.to_string();
  rec.v = v.to_string();
  for (const auto& x : w) rec.w.push_back(x.to_string());
  rec.phase = phase;
  rec.provenance = provenance;
  if (oracle_) {
    rec.independent = oracle_->independent(u, v, w);
    rec.p_value = rec.independent ? 1.0 : 0.0;
    report_.queries.push_back(std::move(rec));
    return report_.queries.back().independent;
  }
  const Column& cu = full_column(u);
  const Column& cv = full_column(v);
  std::vector<const Column*> cw;
  for (const auto& x : w) cw.push_back(&full_column(x));
  Column a, b;
  std::vector<Column> ws(w.size());
  for (std::size_t r = 0; r < cu.size(); ++r) {
    if (cu[r].empty() || cv[r].empty()) continue;
    a.push_back(cu[r]);
    b.push_back(cv[r]);
    for (std::size_t k = 0; k < cw.size(); ++k) ws[k].push_back((*cw[k])[r]);
  }
  const bool ind = decide(a, b, ws, rec);
  report_.queries.push_back(std::move(rec));
  return ind;
}

std::optional<bool> Tester::table_independent(const Column& a, const Column& b, std::span<const Column> w,
                                              const std::vector<std::string>& labels, const std::string& provenance) {
  if (oracle_) throw std::logic_error("Tester: table tests need data");
  QueryRecord rec;
  rec.u = labels.size() > 0 ? labels[0] : "a";
  rec.v = labels.size() > 1 ? labels[1] : "b";
  for (std::size_t k = 2; k < labels.size(); ++k) rec.w.push_back(labels[k]);
  rec.phase = 2;
  rec.provenance = provenance;
  const bool ind = decide(a, b, w, rec);
  const bool err = rec.error;
  report_.queries.push_back(std::move(rec));
  if (err) return std::nullopt;
  return ind;
}

}  // namespace relcd
