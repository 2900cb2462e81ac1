#include "relcd/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace relcd {

namespace {

// Number of pairs i < j of the sorted sample with x[j] - x[i] <= d.
std::uint64_t pairs_within(const std::vector<double>& x, double d) {
  std::uint64_t count = 0;
  std::size_t lo = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    while (x[j] - x[lo] > d) ++lo;
    count += j - lo;
  }
  return count;
}

// k-th smallest (1-based) pairwise difference, bisecting on the bit pattern
// of non-negative doubles, which orders like the values themselves.
double kth_difference(const std::vector<double>& x, std::uint64_t k) {
  std::uint64_t lo = 0, hi = std::bit_cast<std::uint64_t>(x.back() - x.front());
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (pairs_within(x, std::bit_cast<double>(mid)) >= k)
      hi = mid;
    else
      lo = mid + 1;
  }
  return std::bit_cast<double>(lo);
}

double median_of_differences(const std::vector<double>& x, std::uint64_t skip, std::uint64_t total) {
  const std::uint64_t n = total - skip;
  if (n % 2 == 1) return kth_difference(x, skip + (n + 1) / 2);
  return 0.5 * (kth_difference(x, skip + n / 2) + kth_difference(x, skip + n / 2 + 1));
}

}  // namespace

double median_bandwidth(const Column& col, std::size_t cap) {
  std::vector<double> pooled;
  for (const auto& c : col) pooled.insert(pooled.end(), c.begin(), c.end());
  if (cap < 2) cap = 2;
  std::vector<double> x;
  if (pooled.size() > cap) {
    x.reserve(cap);
    for (std::size_t k = 0; k < cap; ++k) x.push_back(pooled[k * pooled.size() / cap]);
  } else {
    x = std::move(pooled);
  }
  if (x.size() < 2) return 1.0;
  std::sort(x.begin(), x.end());
  const std::uint64_t total = static_cast<std::uint64_t>(x.size()) * (x.size() - 1) / 2;
  double med = median_of_differences(x, 0, total);
  if (med > 0) return med;
  const std::uint64_t zeros = pairs_within(x, 0.0);
  if (zeros == total) return 1.0;
  return median_of_differences(x, zeros, total);
}

CellKernel::CellKernel(const Column& col, double theta) : theta_(theta) {
  if (!(theta > 0) || !std::isfinite(theta)) throw std::invalid_argument("CellKernel: bandwidth must be positive");
  gamma_ = 1.0 / (2.0 * theta * theta);
  offsets_.reserve(col.size() + 1);
  offsets_.push_back(0);
  for (const auto& c : col) {
    values_.insert(values_.end(), c.begin(), c.end());
    offsets_.push_back(values_.size());
  }
  inv_norm_.resize(col.size());
  for (std::size_t a = 0; a < col.size(); ++a) {
    const double d = raw(a, a);
    inv_norm_[a] = d > 0 ? 1.0 / std::sqrt(d) : 0.0;
  }
}

double CellKernel::raw(std::size_t a, std::size_t b) const {
  double s = 0;
  for (std::size_t i = offsets_[a]; i < offsets_[a + 1]; ++i)
    for (std::size_t j = offsets_[b]; j < offsets_[b + 1]; ++j) {
      const double d = values_[i] - values_[j];
      s += std::exp(-gamma_ * d * d);
    }
  return s;
}

double CellKernel::operator()(std::size_t a, std::size_t b) const {
  const bool ea = offsets_[a] == offsets_[a + 1], eb = offsets_[b] == offsets_[b + 1];
  if (ea || eb) return ea && eb ? 1.0 : 0.0;
  if (a == b) return 1.0;
  return raw(a, b) * inv_norm_[a] * inv_norm_[b];
}

void CellKernel::column(std::size_t p, double* out, bool parallel) const {
  const auto n = static_cast<std::ptrdiff_t>(size());
#pragma omp parallel for if (parallel) schedule(static)
  for (std::ptrdiff_t a = 0; a < n; ++a) out[a] = (*this)(static_cast<std::size_t>(a), p);
}

Eigen::MatrixXd gram_serial(const CellKernel& k) {
  const auto n = static_cast<Eigen::Index>(k.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a; b < n; ++b) g(a, b) = g(b, a) = k(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  return g;
}

Eigen::MatrixXd gram_parallel(const CellKernel& k) {
  const auto n = static_cast<Eigen::Index>(k.size());
  Eigen::MatrixXd g(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a; b < n; ++b) g(a, b) = g(b, a) = k(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  return g;
}

Eigen::MatrixXd rbf_gram(const Column& col, std::size_t median_cap, bool parallel) {
  if (col.size() < 2) throw std::invalid_argument("rbf_gram: need at least two rows");
  CellKernel k(col, median_cap);
  return parallel ? gram_parallel(k) : gram_serial(k);
}

Eigen::MatrixXd incomplete_cholesky(std::span<const CellKernel* const> kernels, double tol, int max_rank,
                                    bool parallel) {
  if (kernels.empty()) throw std::invalid_argument("incomplete_cholesky: no kernels");
  const auto n = static_cast<Eigen::Index>(kernels.front()->size());
  for (const auto* k : kernels)
    if (static_cast<Eigen::Index>(k->size()) != n) throw std::invalid_argument("incomplete_cholesky: size mismatch");
  const Eigen::Index cap = std::min<Eigen::Index>(n, std::max(1, max_rank));
  Eigen::MatrixXd g(n, cap);
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(n);  // normalized kernels
  Eigen::VectorXd col(n), tmp(n);
  Eigen::Index r = 0;
  for (; r < cap; ++r) {
    Eigen::Index p = 0;
    const double best = diag.maxCoeff(&p);
    if (best <= tol) break;
    kernels.front()->column(static_cast<std::size_t>(p), col.data(), parallel);
    for (std::size_t q = 1; q < kernels.size(); ++q) {
      kernels[q]->column(static_cast<std::size_t>(p), tmp.data(), parallel);
      col.array() *= tmp.array();
    }
    if (r > 0) col.noalias() -= g.leftCols(r) * g.row(p).head(r).transpose();
    const double piv = std::sqrt(best);
    g.col(r) = col / piv;
    g(p, r) = piv;
    diag.array() -= g.col(r).array().square();
    diag(p) = 0;
  }
  return g.leftCols(r);
}

Eigen::MatrixXd incomplete_cholesky(const CellKernel& k, double tol, int max_rank, bool parallel) {
  const CellKernel* ks[1] = {&k};
  return incomplete_cholesky(ks, tol, max_rank, parallel);
}

}  // namespace relcd
