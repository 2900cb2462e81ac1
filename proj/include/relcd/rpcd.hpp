#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relcd/citest.hpp"
#include "relcd/oracle.hpp"
#include "relcd/rcm.hpp"
#include "relcd/skeleton.hpp"

namespace relcd {

enum class Mode { Robust, BaselineCut, Oracle };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct LearnerConfig {
  int h = 2;
  bool order_independent = true;
  bool aggregation = true;
  bool detection = true;
  bool non_rbo = true;
  Mode mode = Mode::Robust;
  int max_cond_size = 3;
  std::uint64_t seed = 0;
  int sepset_budget = 64;   // sepset candidates per adjacency perspective, size, and test
  int cuts_per_triple = 16; // baseline CUT tests per attribute triple
  /// Permutes the iteration order of candidate adjacencies in Phase I.
  std::optional<std::uint64_t> candidate_order_seed;
  CiConfig ci;
};

/// One issued query.
struct QueryRecord {
  std::string u, v;
  std::vector<std::string> w;
  double p_value = 1.0;
  bool independent = false;
  bool aggregated = false;
  bool error = false;
  int phase = 1;
  std::string provenance;  // phase1 | split-rbo | pair-rbo | non-rbo | cut
  std::string note;
};

struct SeparatingSetRecord {
  RelationalVariable u;  // P.Y
  RelationalVariable v;  // canonical [X].X
  std::vector<RelationalVariable> sepset;
  int phase = 1;
};

enum class VerdictKind { Collider, NonCollider, Weak };
std::string to_string(VerdictKind k);

/// Evidence about the attribute triple (x, y, z); x == z for RBO families.
struct Verdict {
  AttrTriple triple;
  VerdictKind kind = VerdictKind::Weak;
  std::string family;  // split-rbo | pair-rbo | non-rbo | cut
  std::vector<RelationalVariable> sepset;
  std::string context;  // the dependency or CUT tested
  bool first = false;   // from the first (smallest) separating set found by its test
};

struct RunReport {
  std::vector<QueryRecord> queries;
  std::vector<SeparatingSetRecord> sepsets;
  std::vector<Verdict> verdicts;
  std::vector<std::string> log;
  std::map<std::string, double> timings;  // seconds per stage
};

/// Sets one LearnerConfig field by name (h, order_independent, aggregation,
/// detection, non_rbo, mode, max_cond_size, seed, sepset_budget,
/// cuts_per_triple) or a CiConfig key. Throws std::invalid_argument on
/// unknown keys or bad values.
void set_learner_option(LearnerConfig& cfg, const std::string& key, const std::string& value);
std::string to_text(const LearnerConfig& cfg);

/// Answers RCI queries and table-level tests for the learner, logging
/// every query. The statistical variant flattens data and runs citest; the
/// oracle variant answers by d-separation.
class Tester {
 public:
  Tester(const Skeleton& sk, const AttrData& data, const LearnerConfig& cfg, RunReport& report);
  Tester(RciOracle& oracle, const LearnerConfig& cfg, RunReport& report);

  bool oracle() const { return oracle_ != nullptr; }
  RciOracle* rci_oracle() const { return oracle_; }
  const AttrData& data() const { return *data_; }
  const Skeleton& skeleton() const { return *sk_; }
  TerminalSetCache& terminal_sets() { return *ts_; }

  /// U _||_ V | W. Errors count as dependent.
  bool independent(const RelationalVariable& u, const RelationalVariable& v, std::span<const RelationalVariable> w,
                   int phase, const std::string& provenance);

  /// Test on a prepared table (statistical mode only). Columns a and b are
  /// the tested pair; `labels` name every column for the log. Returns
  /// nullopt on a test error.
  std::optional<bool> table_independent(const Column& a, const Column& b, std::span<const Column> w,
                                        const std::vector<std::string>& labels, const std::string& provenance);

  /// Cells of P.X over all items of P's base class, in items_of order.
  const Column& full_column(const RelationalVariable& x);

 private:
  bool decide(const Column& a, const Column& b, std::span<const Column> w, QueryRecord& rec);
  std::uint64_t seed_for(const QueryRecord& rec) const;

  const Skeleton* sk_ = nullptr;
  const AttrData* data_ = nullptr;
  RciOracle* oracle_ = nullptr;
  const LearnerConfig& cfg_;
  RunReport& report_;
  std::unique_ptr<TerminalSetCache> ts_;
  std::map<RelationalVariable, Column> columns_;
};

/// Phase I: undirected adjacencies from the candidate set.
Model phase1(const Schema& s, Tester& t, const LearnerConfig& cfg, RunReport& report);

/// Split-RBO table for the adjacency P.X - [I_Y].Y: columns one(P.X),
/// rest(P.X), then S (cells from the one-item), then [I_Y].Y when
/// `with_y`. Rows before deduplication when `dedup` is false. Throws
/// std::invalid_argument when no I_Y item has two P-neighbors.
FlatTable build_split_rbo_table(const Skeleton& sk, const AttrData& data, const RelationalPath& p,
                                const std::string& x, const std::string& y, std::span<const RelationalVariable> s,
                                bool with_y, bool dedup = true, TerminalSetCache* cache = nullptr);

/// Pair-RBO table for P.X - [I_Y].Y and Q.X - [I_Y].Y with ONE paths P != Q.
/// S cells are the union of the cells of both X items.
FlatTable build_pair_rbo_table(const Skeleton& sk, const AttrData& data, const RelationalPath& p,
                               const RelationalPath& q, const std::string& x, const std::string& y,
                               std::span<const RelationalVariable> s, bool with_y,
                               TerminalSetCache* cache = nullptr);

/// Phase II on a fixed undirected structure. Returns the oriented model.
Model phase2(const Model& undirected, Tester& t, const LearnerConfig& cfg, RunReport& report);

/// Majority vote per triple, maximal consistent orientation, then
/// propagation. Exposed for tests.
Model orient(const Model& undirected, const std::vector<Verdict>& verdicts, bool sequential, RunReport* report = nullptr);

/// Closes H under the propagation rules using the non-collider set N.
void propagate(AttributeGraph& h, const std::set<AttrTriple>& n);

struct RunResult {
  Model model;
  Model phase1_model;
  RunReport report;
};

/// End-to-end learner. `data` is ignored in oracle mode, where `oracle` must
/// be set.
RunResult rpcd_run(const Schema& s, const Skeleton& sk, const AttrData* data, const LearnerConfig& cfg,
                   RciOracle* oracle = nullptr);

/// Skeletons used to approximate the oracle's quantifier over skeletons.
struct OracleSkeletons {
  int count = 3;
  int base_size = 300;
};
std::vector<std::shared_ptr<const Skeleton>> oracle_skeletons(const Schema& s, std::uint64_t seed,
                                                              const OracleSkeletons& o = {});

/// The learner in oracle mode on the given skeleton list.
Model true_cprcm(const Model& rcm, std::vector<std::shared_ptr<const Skeleton>> skeletons, int h = -1);

}  // namespace relcd
