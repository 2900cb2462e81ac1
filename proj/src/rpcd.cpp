#include <charconv>
#include <chrono>
#include <sstream>

#include "relcd/rpcd.hpp"

namespace relcd {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class T>
T number(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("config: bad value for " + key + ": '" + v + "'");
  return out;
}

bool boolean(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument("config: bad value for " + key + ": '" + v + "'");
}

}  // namespace

void set_learner_option(LearnerConfig& c, const std::string& key, const std::string& value) {
  if (key == "h") c.h = number<int>(key, value);
  else if (key == "order_independent") c.order_independent = boolean(key, value);
  else if (key == "aggregation") c.aggregation = boolean(key, value);
  else if (key == "detection") c.detection = boolean(key, value);
  else if (key == "non_rbo") c.non_rbo = boolean(key, value);
  else if (key == "mode") c.mode = mode_from_string(value);
  else if (key == "max_cond_size") c.max_cond_size = number<int>(key, value);
  else if (key == "seed") c.seed = number<std::uint64_t>(key, value);
  else if (key == "sepset_budget") c.sepset_budget = number<int>(key, value);
  else if (key == "cuts_per_triple") c.cuts_per_triple = number<int>(key, value);
  else c.ci = parse_ci_config(key + " = " + value, c.ci);
}

std::string to_text(const LearnerConfig& c) {
  std::ostringstream o;
  o << "h = " << c.h << "\n"
    << "order_independent = " << (c.order_independent ? "true" : "false") << "\n"
    << "aggregation = " << (c.aggregation ? "true" : "false") << "\n"
    << "detection = " << (c.detection ? "true" : "false") << "\n"
    << "non_rbo = " << (c.non_rbo ? "true" : "false") << "\n"
    << "mode = " << to_string(c.mode) << "\n"
    << "max_cond_size = " << c.max_cond_size << "\n"
    << "seed = " << c.seed << "\n"
    << "sepset_budget = " << c.sepset_budget << "\n"
    << "cuts_per_triple = " << c.cuts_per_triple << "\n"
    << to_text(c.ci);
  return o.str();
}

RunResult rpcd_run(const Schema& s, const Skeleton& sk, const AttrData* data, const LearnerConfig& cfg,
                   RciOracle* oracle) {
  RunResult r;
  LearnerConfig c = cfg;
  if (oracle) c.mode = Mode::Oracle;
  if (c.mode == Mode::Oracle && !oracle) throw std::invalid_argument("rpcd: oracle mode needs an oracle");
  if (c.mode != Mode::Oracle && !data) throw std::invalid_argument("rpcd: statistical modes need data");
  std::unique_ptr<Tester> t = oracle ? std::make_unique<Tester>(*oracle, c, r.report)
                                     : std::make_unique<Tester>(sk, *data, c, r.report);
  auto t0 = std::chrono::steady_clock::now();
  r.phase1_model = phase1(s, *t, c, r.report);
  r.report.timings["phase1"] = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  r.model = phase2(r.phase1_model, *t, c, r.report);
  r.report.timings["phase2"] = seconds_since(t0);
  return r;
}

std::vector<std::shared_ptr<const Skeleton>> oracle_skeletons(const Schema& s, std::uint64_t seed,
                                                              const OracleSkeletons& o) {
  std::vector<std::shared_ptr<const Skeleton>> out;
  for (int k = 0; k < o.count; ++k)
    out.push_back(std::make_shared<const Skeleton>(random_skeleton(s, o.base_size, seed + 0x9e3779b97f4a7c15ULL * (k + 1))));
  return out;
}

Model true_cprcm(const Model& rcm, std::vector<std::shared_ptr<const Skeleton>> skeletons, int h) {
  LearnerConfig cfg;
  cfg.mode = Mode::Oracle;
  cfg.h = h < 0 ? rcm.hop_threshold() : h;
  cfg.max_cond_size = 64;
  cfg.sepset_budget = 1 << 20;
  RciOracle oracle(rcm, std::move(skeletons));
  return rpcd_run(rcm.schema(), *oracle.skeletons().back(), nullptr, cfg, &oracle).model;
}

}  // namespace relcd
