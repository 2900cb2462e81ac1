#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace relcd {

/// A multiset of values; an empty cell only occurs in conditioning columns.
using Cell = std::vector<double>;
using Column = std::vector<Cell>;

/// Median of pairwise distances between pooled cell elements, on an evenly
/// strided subsample of at most `cap` elements. Falls back to the median of
/// the positive distances when that is 0, and to 1 when all values agree.
double median_bandwidth(const Column& col, std::size_t cap = 1000);

/// Normalized R-convolution RBF kernel over the cells of one column:
/// K'(a,b) = sum_x sum_y exp(-(x-y)^2 / (2 theta^2)), then
/// K'(a,b) / sqrt(K'(a,a) K'(b,b)). Empty cells score 1 against each other
/// and 0 against anything else.
class CellKernel {
 public:
  CellKernel(const Column& col, double theta);
  explicit CellKernel(const Column& col, std::size_t median_cap = 1000)
      : CellKernel(col, median_bandwidth(col, median_cap)) {}

  std::size_t size() const { return offsets_.size() - 1; }
  double theta() const { return theta_; }
  double operator()(std::size_t a, std::size_t b) const;
  /// out[a] = k(a, p) for all rows a.
  void column(std::size_t p, double* out, bool parallel) const;

 private:
  double raw(std::size_t a, std::size_t b) const;
  std::vector<double> values_;
  std::vector<std::size_t> offsets_;
  std::vector<double> inv_norm_;  // 1/sqrt(K'(a,a)), 0 for empty cells
  double theta_;
  double gamma_;
};

/// Full normalized gram. The serial and parallel versions produce identical
/// matrices.
Eigen::MatrixXd gram_serial(const CellKernel& k);
Eigen::MatrixXd gram_parallel(const CellKernel& k);

/// rbf_gram with the median-heuristic bandwidth.
Eigen::MatrixXd rbf_gram(const Column& col, std::size_t median_cap = 1000, bool parallel = true);

/// Pivoted incomplete Cholesky of the elementwise product of the given
/// kernels: returns G (n x r) with K ~ G G^T, stopping once every residual
/// diagonal entry is at most `tol` or r reaches `max_rank`.
Eigen::MatrixXd incomplete_cholesky(std::span<const CellKernel* const> kernels, double tol, int max_rank,
                                    bool parallel);
Eigen::MatrixXd incomplete_cholesky(const CellKernel& k, double tol, int max_rank, bool parallel);

}  // namespace relcd
