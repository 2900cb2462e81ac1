#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relcd/kernel.hpp"
#include "relcd/rcm.hpp"
#include "relcd/skeleton.hpp"

namespace relcd {

/// One row per base item, one multiset cell per column. Columns are U, V,
/// then the conditioning variables.
struct FlatTable {
  std::vector<RelationalVariable> columns;
  std::vector<ItemIndex> rows;
  std::vector<Column> cells;  // cells[column][row]

  std::size_t size() const { return rows.size(); }
  const Column& u() const { return cells[0]; }
  const Column& v() const { return cells[1]; }
  std::span<const Column> w() const { return std::span<const Column>(cells).subspan(2); }
};

/// Rows whose U or V cell is empty are dropped; empty W cells are kept.
/// Cell values are listed in item order. Throws std::invalid_argument when
/// the variables do not share one base class.
FlatTable flatten(const Skeleton& sk, const AttrData& data, const RelationalVariable& u,
                  const RelationalVariable& v, std::span<const RelationalVariable> w,
                  TerminalSetCache* cache = nullptr);

enum class Aggregator { Average, Median, Mode };
std::string to_string(Aggregator f);
Aggregator aggregator_from_string(const std::string& s);

/// Replaces every cell by the singleton {f(cell)}. Mode breaks ties towards
/// the smallest value. Empty cells are an error.
Column aggregate_column(const Column& col, Aggregator f);

struct CiConfig {
  double alpha = 0.05;
  int n_perm = 500;
  Aggregator aggregator = Aggregator::Average;
  std::size_t median_cap = 1000;
  double icl_tol = 1e-6;
  int icl_max_rank = 50;
  double ridge = 1e-3;  // kernel ridge penalty per row
  int block_size = 4;   // conditional permutation neighborhoods
  bool parallel = true;
};

/// key = value lines; '#' starts a comment. Unknown keys are an error.
CiConfig parse_ci_config(std::string_view text, CiConfig base = {});
std::string to_text(const CiConfig& c);

struct TestResult {
  double p_value = 1.0;
  double statistic = 0.0;
  int n_permutations = 0;
  bool reject = false;  // p_value <= alpha
  std::size_t rows = 0;
  bool fallback_marginal = false;
};

/// HSIC with normalized median-heuristic grams, permuting V. Needs >= 10 rows.
TestResult marginal_test(const Column& u, const Column& v, const CiConfig& cfg, std::uint64_t seed);

/// Pluggable conditional test.
class ConditionalTest {
 public:
  virtual ~ConditionalTest() = default;
  virtual TestResult run(const Column& u, const Column& v, std::span<const Column> w, const CiConfig& cfg,
                         std::uint64_t seed) const = 0;
};

/// HSIC of U and V after kernel ridge residualization on W, with
/// permutations restricted to nearest-neighbor blocks in W. Empty W runs the
/// marginal test; constant W falls back to it and sets fallback_marginal.
/// Needs >= 20 rows.
class KernelConditionalTest final : public ConditionalTest {
 public:
  TestResult run(const Column& u, const Column& v, std::span<const Column> w, const CiConfig& cfg,
                 std::uint64_t seed) const override;
};

TestResult conditional_test(const Column& u, const Column& v, std::span<const Column> w, const CiConfig& cfg,
                            std::uint64_t seed);

namespace detail {
/// ||A^T P B||_F^2 / n^2 for every row permutation P of A; the reference
/// loop and the parallel loop give identical values.
std::vector<double> permuted_hsic_serial(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                         const std::vector<std::vector<int>>& perms);
std::vector<double> permuted_hsic_parallel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                           const std::vector<std::vector<int>>& perms);
double hsic_statistic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// Centers columns in place.
void center(Eigen::MatrixXd& g);
/// Greedy nearest-neighbor blocks of `size` rows in the row space of g.
std::vector<std::vector<int>> neighbor_blocks(const Eigen::MatrixXd& g, int size);
}  // namespace detail

}  // namespace relcd
