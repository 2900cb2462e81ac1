#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relcd/rpcd.hpp"

namespace relcd {

struct Counts {
  long tp = 0, fp = 0, fn = 0;
  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

struct Metrics {
  double precision = 0, recall = 0, f_measure = 0;
  bool precision_undefined = false;  // no predictions: 0/0 reported as 0
  bool recall_undefined = false;
};

Metrics metrics_from_counts(const Counts& c);

struct Evaluation {
  Counts phase1;  // undirected adjacencies vs the true dependencies
  Counts phase2;  // directed dependencies vs the true CPRCM's
};

/// Throws std::invalid_argument on schema mismatch.
Evaluation evaluate(const Model& learned, const Model& truth_rcm, const Model& truth_cprcm);

/// Micro: metrics of summed counts. Macro: mean of per-model metrics.
Metrics micro_average(const std::vector<Counts>& per_model);
Metrics macro_average(const std::vector<Counts>& per_model);

/// Hit counts of orientation verdicts against the generating RCM, split by
/// the true answer.
struct VerdictAccuracy {
  long collider_correct = 0, collider_total = 0;
  long non_collider_correct = 0, non_collider_total = 0;
  VerdictAccuracy& operator+=(const VerdictAccuracy& o);
  double overall() const;
  double collider() const;
  double non_collider() const;
};

/// Scores the verdicts with `first` set whose family satisfies `family`.
/// Weak verdicts count as colliders when `weak_as_collider`, else are
/// skipped.
VerdictAccuracy verdict_accuracy(const std::vector<Verdict>& verdicts, const Model& truth_rcm,
                                 const std::function<bool(const Verdict&)>& family, bool weak_as_collider);

/// One generated benchmark instance.
struct Instance {
  std::uint64_t seed = 0;
  std::uint64_t schema_seed = 0;  // differs from seed when the first schema was redrawn
  Schema schema;
  Model rcm;
  Model cprcm;
};

/// Schema, RCM (with a directed CPRCM dependency) and its CPRCM for a seed.
/// The CPRCM uses oracle_skeletons(schema, schema_seed, o).
Instance make_instance(std::uint64_t seed, const OracleSkeletons& o = {});

/// Skeleton and data of base size n for an instance.
std::pair<Skeleton, AttrData> make_data(const Instance& inst, int n);

struct BenchConfig {
  int models = 20;
  std::vector<int> sizes{200, 500};
  std::vector<std::string> variants{"robust", "baseline_cut"};
  std::uint64_t seed = 1;
  bool perfect_phase1 = false;
  int oracle_skeletons = 3;
  int oracle_base_size = 300;
  LearnerConfig learner;
};

/// key = value lines; unknown keys are errors. Learner and test keys are
/// accepted with their LearnerConfig/CiConfig names.
BenchConfig parse_bench_config(const std::string& text);
std::string to_text(const BenchConfig& cfg);

/// Variants: robust, baseline_cut, no_aggregation, no_order_independence,
/// no_detection, no_non_rbo. Throws std::invalid_argument otherwise.
LearnerConfig variant_config(const std::string& variant, const LearnerConfig& base);

struct ModelRow {
  std::string variant;
  int size = 0;
  std::uint64_t seed = 0;
  Evaluation eval;
  bool failed = false;
  std::string error;
};

/// Runs every (model, size, variant) cell not already in `dir`/rows.csv,
/// appending rows as they finish, then writes results.csv and table.txt.
/// Returns all rows. `jobs` models run concurrently.
std::vector<ModelRow> run_benchmark(const BenchConfig& cfg, const std::filesystem::path& dir,
                                    const std::function<void(const std::string&)>& progress = {}, int jobs = 1);

/// Text table of micro and macro metrics per variant and size.
std::string render_table(const std::vector<ModelRow>& rows);

}  // namespace relcd
