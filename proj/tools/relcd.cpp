#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "relcd/bench.hpp"
#include "relcd/datagen.hpp"
#include "relcd/io.hpp"

using namespace relcd;

namespace {

/// Bad inputs: exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Schema load_schema(const std::string& p) { return io::schema_from_json(io::read_json_file(p)); }

Model load_model(const Schema& s, const std::string& p) { return io::model_from_json(s, io::read_json_file(p)); }

Skeleton load_skeleton(const Schema& s, const std::string& p) { return io::skeleton_from_json(s, io::read_json_file(p)); }

AttrData load_data(const Skeleton& sk, const std::string& p) {
  std::istringstream in(io::read_text_file(p));
  return io::read_data_csv(in, sk);
}

void write_json(const std::string& p, const io::json& j) { io::write_text_file(p, j.dump(2) + "\n"); }

/// Applies key = value lines from a config file on top of `cfg`.
void apply_config_file(LearnerConfig& cfg, const std::string& path) {
  std::istringstream in(io::read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos) throw ValidationError(path + ": expected key = value, got '" + line + "'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    set_learner_option(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

struct LearnerFlags {
  std::string mode = "robust";
  int h = 2;
  int max_cond_size = 3;
  int sepset_budget = 64;
  int cuts_per_triple = 16;
  bool no_aggregation = false, no_order_independence = false, no_detection = false, no_non_rbo = false;
  double alpha = 0.05;
  int n_perm = 500;
  std::string aggregator = "average";
  std::string config;

  void add(CLI::App* c) {
    c->add_option("--mode", mode, "robust | baseline_cut")->capture_default_str();
    c->add_option("--h", h, "hop threshold")->capture_default_str();
    c->add_option("--max-cond-size", max_cond_size, "largest separating set size")->capture_default_str();
    c->add_option("--sepset-budget", sepset_budget, "separating set candidates per test and size")->capture_default_str();
    c->add_option("--cuts-per-triple", cuts_per_triple, "baseline CUT tests per attribute triple")->capture_default_str();
    c->add_flag("--no-aggregation", no_aggregation, "disable aggregation retries");
    c->add_flag("--no-order-independence", no_order_independence, "remove adjacencies immediately in Phase I");
    c->add_flag("--no-detection", no_detection, "disable weak dependence detection");
    c->add_flag("--no-non-rbo", no_non_rbo, "skip non-RBO tests");
    c->add_option("--alpha", alpha, "test level")->capture_default_str();
    c->add_option("--n-perm", n_perm, "permutations per test")->capture_default_str();
    c->add_option("--aggregator", aggregator, "average | median | mode")->capture_default_str();
    c->add_option("--config", config, "key = value file; overrides flags")->check(CLI::ExistingFile);
  }

  LearnerConfig build(std::uint64_t seed) const {
    LearnerConfig c;
    c.mode = mode_from_string(mode);
    c.h = h;
    c.max_cond_size = max_cond_size;
    c.sepset_budget = sepset_budget;
    c.cuts_per_triple = cuts_per_triple;
    c.aggregation = !no_aggregation;
    c.order_independent = !no_order_independence;
    c.detection = !no_detection;
    c.non_rbo = !no_non_rbo;
    c.ci.alpha = alpha;
    c.ci.n_perm = n_perm;
    c.ci.aggregator = aggregator_from_string(aggregator);
    c.seed = seed;
    if (!config.empty()) apply_config_file(c, config);
    return c;
  }
};

void print_metrics(const Evaluation& e, const std::string& format) {
  const Metrics p1 = metrics_from_counts(e.phase1), p2 = metrics_from_counts(e.phase2);
  if (format == "json") {
    auto one = [](const Metrics& m, const Counts& c) {
      return io::json{{"precision", m.precision}, {"recall", m.recall}, {"f", m.f_measure},
                      {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn},
                      {"precision_undefined", m.precision_undefined}, {"recall_undefined", m.recall_undefined}};
    };
    std::cout << io::json{{"undirected_deps", one(p1, e.phase1)}, {"directed_vs_cprcm", one(p2, e.phase2)}}.dump(2) << "\n";
    return;
  }
  std::cout << "target,precision,recall,f,tp,fp,fn,undefined\n";
  for (const auto& [name, m, c] : {std::tuple{"undirected_deps", p1, e.phase1}, std::tuple{"directed_vs_cprcm", p2, e.phase2}})
    std::cout << name << ',' << io::format_double(m.precision) << ',' << io::format_double(m.recall) << ','
              << io::format_double(m.f_measure) << ',' << c.tp << ',' << c.fp << ',' << c.fn << ','
              << (m.precision_undefined || m.recall_undefined ? 1 : 0) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relational causal discovery with robustified RpCD"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "random seed (falls back to RELCD_SEED)")->envname("RELCD_SEED")->capture_default_str();

  std::string out, schema_path, model_path, skeleton_path, data_path, params_path;

  auto* gs = app.add_subcommand("generate-schema", "random schema");
  gs->add_option("-o,--out", out, "schema.json")->required();

  auto* gm = app.add_subcommand("generate-model", "random RCM for a schema");
  gm->add_option("--schema", schema_path, "schema.json")->required()->check(CLI::ExistingFile);
  gm->add_option("-o,--out", out, "model.json")->required();
  std::string params_out;
  double noise_sd = 0.1, coeff_sd = 0.1;
  gm->add_option("--params-out", params_out, "also write params.json");
  gm->add_option("--noise-sd", noise_sd, "noise standard deviation")->capture_default_str();
  gm->add_option("--coeff-sd", coeff_sd, "coefficient scale")->capture_default_str();

  auto* gd = app.add_subcommand("generate-data", "random skeleton and data for an RCM");
  int n = 200;
  std::string skeleton_out, gg_out;
  gd->add_option("--schema", schema_path, "schema.json")->required()->check(CLI::ExistingFile);
  gd->add_option("--model", model_path, "fully directed model.json")->required()->check(CLI::ExistingFile);
  gd->add_option("--params", params_path, "params.json (drawn from the seed when absent)")->check(CLI::ExistingFile);
  gd->add_option("--n", n, "base size")->capture_default_str()->check(CLI::PositiveNumber);
  gd->add_option("--skeleton-out", skeleton_out, "skeleton.json")->required();
  gd->add_option("-o,--out", out, "data.csv")->required();
  gd->add_option("--ground-graph-out", gg_out, "gg.csv");

  auto* ln = app.add_subcommand("learn", "run the learner on data");
  LearnerFlags lf;
  std::string report_out;
  ln->add_option("--schema", schema_path, "schema.json")->required()->check(CLI::ExistingFile);
  ln->add_option("--skeleton", skeleton_path, "skeleton.json")->required()->check(CLI::ExistingFile);
  ln->add_option("--data", data_path, "data.csv")->required()->check(CLI::ExistingFile);
  ln->add_option("-o,--out", out, "model.json")->required();
  ln->add_option("--report", report_out, "report.json");
  lf.add(ln);

  auto* ol = app.add_subcommand("oracle-learn", "CPRCM of an RCM by d-separation");
  int osk_count = 3, osk_size = 300, h = -1;
  ol->add_option("--schema", schema_path, "schema.json")->required()->check(CLI::ExistingFile);
  ol->add_option("--model", model_path, "fully directed model.json")->required()->check(CLI::ExistingFile);
  ol->add_option("--skeleton", skeleton_path, "extra skeleton.json added to the oracle's list")->check(CLI::ExistingFile);
  ol->add_option("--skeletons", osk_count, "random oracle skeletons")->capture_default_str();
  ol->add_option("--skeleton-size", osk_size, "their base size")->capture_default_str();
  ol->add_option("--h", h, "hop threshold (model's when negative)")->capture_default_str();
  ol->add_option("-o,--out", out, "cprcm.json")->required();

  auto* ev = app.add_subcommand("evaluate", "metrics of a learned model");
  std::string learned_path, truth_path, cprcm_path, format = "csv";
  ev->add_option("--schema", schema_path, "schema.json")->required()->check(CLI::ExistingFile);
  ev->add_option("--learned", learned_path, "learned model.json")->required()->check(CLI::ExistingFile);
  ev->add_option("--truth", truth_path, "generating model.json")->required()->check(CLI::ExistingFile);
  ev->add_option("--cprcm", cprcm_path, "true CPRCM model.json")->required()->check(CLI::ExistingFile);
  ev->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* bn = app.add_subcommand("bench", "benchmark batch");
  std::string bench_config, out_dir;
  int models = 20, jobs = 1;
  std::vector<int> sizes{200, 500};
  std::vector<std::string> variants{"robust", "baseline_cut"};
  bool perfect = false;
  bn->add_option("--config", bench_config, "batch key = value file; overrides flags")->check(CLI::ExistingFile);
  bn->add_option("--out-dir", out_dir, "output directory (rows.csv, results.csv, table.txt)")->required();
  bn->add_option("--models", models, "number of models")->capture_default_str();
  bn->add_option("--sizes", sizes, "base sizes")->delimiter(',')->capture_default_str();
  bn->add_option("--variants", variants, "robust, baseline_cut, no_aggregation, no_order_independence, no_detection, no_non_rbo")
      ->delimiter(',')
      ->capture_default_str();
  bn->add_flag("--perfect-phase1", perfect, "supply the true adjacencies to Phase II");
  bn->add_option("--n-perm", lf.n_perm, "permutations per test")->capture_default_str();
  bn->add_option("--jobs", jobs, "models run concurrently")->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gs) {
      write_json(out, io::to_json(random_schema(seed)));
    } else if (*gm) {
      const Schema s = load_schema(schema_path);
      const Model m = random_rcm(s, seed);
      write_json(out, io::to_json(m));
      if (!params_out.empty()) write_json(params_out, io::to_json(parametrize(m, seed, noise_sd, coeff_sd)));
    } else if (*gd) {
      const Schema s = load_schema(schema_path);
      const Model m = load_model(s, model_path);
      if (!m.fully_directed()) throw ValidationError(model_path + ": model is not fully directed");
      const auto p = params_path.empty() ? parametrize(m, seed) : io::params_from_json(io::read_json_file(params_path));
      const Skeleton sk = random_skeleton(s, n, seed);
      const AttrData data = generate_data(m, p, sk, seed + 1);
      write_json(skeleton_out, io::to_json(sk));
      std::ostringstream d;
      io::write_data_csv(d, sk, data);
      io::write_text_file(out, d.str());
      if (!gg_out.empty()) {
        std::ostringstream g;
        io::write_ground_graph_csv(g, sk, GroundGraph::build(m, sk));
        io::write_text_file(gg_out, g.str());
      }
    } else if (*ln) {
      const Schema s = load_schema(schema_path);
      const Skeleton sk = load_skeleton(s, skeleton_path);
      const AttrData data = load_data(sk, data_path);
      const LearnerConfig cfg = lf.build(seed);
      if (cfg.mode == Mode::Oracle) throw ValidationError("learn: use oracle-learn for oracle mode");
      const RunResult r = rpcd_run(s, sk, &data, cfg);
      write_json(out, io::to_json(r.model));
      if (!report_out.empty()) write_json(report_out, io::to_json(r.report));
    } else if (*ol) {
      const Schema s = load_schema(schema_path);
      const Model m = load_model(s, model_path);
      if (!m.fully_directed()) throw ValidationError(model_path + ": model is not fully directed");
      auto sks = oracle_skeletons(s, seed, {osk_count, osk_size});
      if (!skeleton_path.empty()) sks.push_back(std::make_shared<const Skeleton>(load_skeleton(s, skeleton_path)));
      write_json(out, io::to_json(true_cprcm(m, sks, h)));
    } else if (*ev) {
      const Schema s = load_schema(schema_path);
      print_metrics(evaluate(load_model(s, learned_path), load_model(s, truth_path), load_model(s, cprcm_path)), format);
    } else if (*bn) {
      BenchConfig cfg;
      cfg.models = models;
      cfg.sizes = sizes;
      cfg.variants = variants;
      for (const auto& v : variants) variant_config(v, cfg.learner);
      cfg.seed = seed;
      cfg.perfect_phase1 = perfect;
      cfg.learner.ci.n_perm = lf.n_perm;
      if (!bench_config.empty()) {
        const std::string text = to_text(cfg) + io::read_text_file(bench_config);
        cfg = parse_bench_config(text);
      }
      const auto rows = run_benchmark(cfg, out_dir, [](const std::string& line) { std::cerr << line << "\n"; }, jobs);
      std::cout << render_table(rows);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const io::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
