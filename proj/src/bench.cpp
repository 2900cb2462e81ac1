#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "relcd/bench.hpp"
#include "relcd/datagen.hpp"
#include "relcd/io.hpp"

namespace relcd {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t z = seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xbf58476d1ce4e5b9ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") + 1 - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep))
    if (!trim(part).empty()) out.push_back(trim(part));
  return out;
}

}  // namespace

Instance make_instance(std::uint64_t seed, const OracleSkeletons& o) {
  Instance inst;
  inst.seed = seed;
  // some schemas admit no model with an orientable dependency; redraw those
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t schema_seed = attempt == 0 ? seed : mix(seed, attempt, 11);
    inst.schema_seed = schema_seed;
    inst.schema = random_schema(schema_seed);
    const auto sks = oracle_skeletons(inst.schema, schema_seed, o);
    RcmGenConfig cfg;
    cfg.max_retries = 100;
    cfg.accept = [&](const Model& m) {
      inst.cprcm = true_cprcm(m, sks);
      return !inst.cprcm.directed_dependencies().empty();
    };
    try {
      inst.rcm = random_rcm(inst.schema, schema_seed, cfg);
      return inst;
    } catch (const GenerationExhausted&) {
      if (attempt >= 20) throw;
    }
  }
}

std::pair<Skeleton, AttrData> make_data(const Instance& inst, int n) {
  Skeleton sk = random_skeleton(inst.schema, n, mix(inst.seed, static_cast<std::uint64_t>(n), 1));
  const auto params = parametrize(inst.rcm, mix(inst.seed, 2));
  AttrData data = generate_data(inst.rcm, params, sk, mix(inst.seed, static_cast<std::uint64_t>(n), 3));
  return {std::move(sk), std::move(data)};
}

BenchConfig parse_bench_config(const std::string& text) {
  BenchConfig c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bench config: expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    try {
      if (key == "models") c.models = std::stoi(val);
      else if (key == "sizes") {
        c.sizes.clear();
        for (const auto& p : split(val, ',')) c.sizes.push_back(std::stoi(p));
      } else if (key == "variants") {
        c.variants = split(val, ',');
        for (const auto& v : c.variants) variant_config(v, c.learner);
      } else if (key == "bench_seed") c.seed = std::stoull(val);
      else if (key == "perfect_phase1") c.perfect_phase1 = val == "true" || val == "1";
      else if (key == "oracle_skeletons") c.oracle_skeletons = std::stoi(val);
      else if (key == "oracle_base_size") c.oracle_base_size = std::stoi(val);
      else set_learner_option(c.learner, key, val);
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("bench config: " + key + ": " + e.what());
    }
  }
  if (c.models < 1 || c.sizes.empty() || c.variants.empty()) throw std::invalid_argument("bench config: empty batch");
  return c;
}

std::string to_text(const BenchConfig& c) {
  std::ostringstream o;
  o << "models = " << c.models << "\nsizes = ";
  for (std::size_t i = 0; i < c.sizes.size(); ++i) o << (i ? ", " : "") << c.sizes[i];
  o << "\nvariants = ";
  for (std::size_t i = 0; i < c.variants.size(); ++i) o << (i ? ", " : "") << c.variants[i];
  o << "\nbench_seed = " << c.seed << "\nperfect_phase1 = " << (c.perfect_phase1 ? "true" : "false")
    << "\noracle_skeletons = " << c.oracle_skeletons << "\noracle_base_size = " << c.oracle_base_size << "\n"
    << to_text(c.learner);
  return o.str();
}

LearnerConfig variant_config(const std::string& v, const LearnerConfig& base) {
  LearnerConfig c = base;
  if (v == "robust") c.mode = Mode::Robust;
  else if (v == "baseline_cut") c.mode = Mode::BaselineCut;
  else if (v == "no_aggregation") c.aggregation = false;
  else if (v == "no_order_independence") c.order_independent = false;
  else if (v == "no_detection") c.detection = false;
  else if (v == "no_non_rbo") c.non_rbo = false;
  else throw std::invalid_argument("unknown variant '" + v + "'");
  return c;
}

namespace {

const char* kRowsHeader = "variant,size,seed,p1_tp,p1_fp,p1_fn,p2_tp,p2_fp,p2_fn,failed,error";

std::string row_line(const ModelRow& r) {
  std::string err = r.error;
  std::replace(err.begin(), err.end(), ',', ';');
  std::replace(err.begin(), err.end(), '\n', ' ');
  std::ostringstream o;
  o << r.variant << ',' << r.size << ',' << r.seed << ',' << r.eval.phase1.tp << ',' << r.eval.phase1.fp << ','
    << r.eval.phase1.fn << ',' << r.eval.phase2.tp << ',' << r.eval.phase2.fp << ',' << r.eval.phase2.fn << ','
    << (r.failed ? 1 : 0) << ',' << err;
  return o.str();
}

std::vector<ModelRow> read_rows(const std::filesystem::path& p) {
  std::vector<ModelRow> rows;
  std::ifstream in(p);
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line != kRowsHeader) throw io::FormatError(p.string() + ": unexpected header");
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string part;
    while (std::getline(ss, part, ',')) f.push_back(part);
    if (f.size() < 10) throw io::FormatError(p.string() + ": short row '" + line + "'");
    ModelRow r;
    r.variant = f[0];
    r.size = std::stoi(f[1]);
    r.seed = std::stoull(f[2]);
    r.eval.phase1 = {std::stol(f[3]), std::stol(f[4]), std::stol(f[5])};
    r.eval.phase2 = {std::stol(f[6]), std::stol(f[7]), std::stol(f[8])};
    r.failed = f[9] == "1";
    if (f.size() > 10) r.error = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

Model learn(const Instance& inst, const Skeleton& sk, const AttrData& data, const LearnerConfig& cfg, bool perfect) {
  if (!perfect) return rpcd_run(inst.schema, sk, &data, cfg).model;
  RunReport report;
  Tester t(sk, data, cfg, report);
  Model undirected = inst.rcm;
  undirected.clear_orientations();
  return phase2(undirected, t, cfg, report);
}

std::string fmt(double v, bool undefined) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(4) << v << (undefined ? "*" : "");
  return o.str();
}

}  // namespace

std::vector<ModelRow> run_benchmark(const BenchConfig& cfg, const std::filesystem::path& dir,
                                    const std::function<void(const std::string&)>& progress, int jobs) {
  std::filesystem::create_directories(dir);
  io::write_text_file(dir / "config.txt", to_text(cfg));
  const auto rows_path = dir / "rows.csv";
  std::vector<ModelRow> rows = read_rows(rows_path);
  std::set<std::tuple<std::string, int, std::uint64_t>> done;
  for (const auto& r : rows) done.insert({r.variant, r.size, r.seed});
  std::ofstream out(rows_path, std::ios::app);
  if (rows.empty() && std::filesystem::file_size(rows_path) == 0) out << kRowsHeader << "\n";

  const OracleSkeletons osk{cfg.oracle_skeletons, cfg.oracle_base_size};
  std::mutex mu;
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < cfg.models; k = next++) {
      const std::uint64_t seed = mix(cfg.seed, static_cast<std::uint64_t>(k), 7);
      bool pending = false;
      for (int n : cfg.sizes)
        for (const auto& v : cfg.variants) pending |= !done.count({v, n, seed});
      if (!pending) continue;
      std::optional<Instance> inst;
      std::string inst_error;
      try {
        inst = make_instance(seed, osk);
      } catch (const std::exception& e) {
        inst_error = e.what();
      }
      for (int n : cfg.sizes) {
        std::optional<std::pair<Skeleton, AttrData>> d;
        if (inst) d = make_data(*inst, n);
        for (const auto& v : cfg.variants) {
          if (done.count({v, n, seed})) continue;
          ModelRow r{v, n, seed, {}, false, inst_error};
          if (!inst) {
            r.failed = true;
          } else {
            try {
              LearnerConfig lc = variant_config(v, cfg.learner);
              lc.h = inst->rcm.hop_threshold();
              lc.seed = mix(seed, static_cast<std::uint64_t>(n), 5);
              r.eval = evaluate(learn(*inst, d->first, d->second, lc, cfg.perfect_phase1), inst->rcm, inst->cprcm);
            } catch (const std::exception& e) {
              r.failed = true;
              r.error = e.what();
            }
          }
          std::lock_guard lock(mu);
          out << row_line(r) << "\n" << std::flush;
          if (progress) progress("model " + std::to_string(k + 1) + "/" + std::to_string(cfg.models) + " n=" +
                                 std::to_string(n) + " " + v + (r.failed ? " failed: " + r.error : ""));
          rows.push_back(std::move(r));
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  std::sort(rows.begin(), rows.end(), [](const ModelRow& a, const ModelRow& b) {
    return std::tie(a.variant, a.size, a.seed) < std::tie(b.variant, b.size, b.seed);
  });
  std::ostringstream res;
  res << "variant,size,seed,target,averaging,precision,recall,f\n";
  std::map<std::pair<std::string, int>, std::pair<std::vector<Counts>, std::vector<Counts>>> cells;
  for (const auto& r : rows) {
    if (r.failed) continue;
    auto& c = cells[{r.variant, r.size}];
    c.first.push_back(r.eval.phase1);
    c.second.push_back(r.eval.phase2);
    for (const auto& [target, counts] : {std::pair{"undirected_deps", r.eval.phase1}, std::pair{"directed_vs_cprcm", r.eval.phase2}}) {
      const Metrics m = metrics_from_counts(counts);
      res << r.variant << ',' << r.size << ',' << r.seed << ',' << target << ",model," << io::format_double(m.precision)
          << ',' << io::format_double(m.recall) << ',' << io::format_double(m.f_measure) << "\n";
    }
  }
  for (const auto& [key, c] : cells)
    for (const auto& [target, counts] : {std::pair{"undirected_deps", &c.first}, std::pair{"directed_vs_cprcm", &c.second}})
      for (const auto& [avg, m] : {std::pair{"micro", micro_average(*counts)}, std::pair{"macro", macro_average(*counts)}})
        res << key.first << ',' << key.second << ",all," << target << ',' << avg << ',' << io::format_double(m.precision)
            << ',' << io::format_double(m.recall) << ',' << io::format_double(m.f_measure) << "\n";
  io::write_text_file(dir / "results.csv", res.str());
  io::write_text_file(dir / "table.txt", render_table(rows));
  return rows;
}

std::string render_table(const std::vector<ModelRow>& rows) {
  std::map<std::pair<std::string, int>, std::pair<std::vector<Counts>, std::vector<Counts>>> cells;
  std::map<std::pair<std::string, int>, int> failures;
  for (const auto& r : rows) {
    if (r.failed) {
      failures[{r.variant, r.size}]++;
      continue;
    }
    cells[{r.variant, r.size}].first.push_back(r.eval.phase1);
    cells[{r.variant, r.size}].second.push_back(r.eval.phase2);
  }
  auto stderr_of = [](const std::vector<Counts>& cs, auto get) {
    if (cs.size() < 2) return 0.0;
    double mean = 0, sq = 0;
    for (const auto& c : cs) mean += get(metrics_from_counts(c));
    mean /= cs.size();
    for (const auto& c : cs) sq += std::pow(get(metrics_from_counts(c)) - mean, 2);
    return std::sqrt(sq / (cs.size() - 1) / cs.size());
  };
  std::ostringstream o;
  o << std::left << std::setw(24) << "variant" << std::setw(6) << "size" << std::setw(8) << "models" << std::setw(20)
    << "target" << std::setw(8) << "avg" << std::setw(18) << "precision" << std::setw(18) << "recall" << "f\n";
  for (const auto& [key, c] : cells)
    for (const auto& [target, counts] : {std::pair{"undirected_deps", &c.first}, std::pair{"directed_vs_cprcm", &c.second}}) {
      const Metrics mi = micro_average(*counts), ma = macro_average(*counts);
      const double sp = stderr_of(*counts, [](const Metrics& m) { return m.precision; });
      const double sr = stderr_of(*counts, [](const Metrics& m) { return m.recall; });
      o << std::setw(24) << key.first << std::setw(6) << key.second << std::setw(8) << counts->size() << std::setw(20)
        << target << std::setw(8) << "micro" << std::setw(18) << fmt(mi.precision, mi.precision_undefined)
        << std::setw(18) << fmt(mi.recall, mi.recall_undefined) << fmt(mi.f_measure, false) << "\n";
      o << std::setw(24) << "" << std::setw(6) << "" << std::setw(8) << "" << std::setw(20) << "" << std::setw(8)
        << "macro" << std::setw(18) << (fmt(ma.precision, ma.precision_undefined) + " +-" + fmt(sp, false))
        << std::setw(18) << (fmt(ma.recall, ma.recall_undefined) + " +-" + fmt(sr, false)) << fmt(ma.f_measure, false)
        << "\n";
    }
  for (const auto& [key, n] : failures) o << key.first << " n=" << key.second << ": " << n << " failed models excluded\n";
  o << "* includes 0/0 cases reported as 0\n";
  return o.str();
}

}  // namespace relcd
