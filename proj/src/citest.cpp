#include "relcd/citest.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace relcd {

namespace detail {

void center(Eigen::MatrixXd& g) {
  if (g.rows() == 0) return;
  g.rowwise() -= g.colwise().mean();
}

double hsic_statistic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double n = static_cast<double>(a.rows());
  return (a.transpose() * b).squaredNorm() / (n * n);
}

namespace {
double permuted_one(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const std::vector<int>& perm,
                    Eigen::MatrixXd& buf) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) buf.row(i) = a.row(perm[static_cast<std::size_t>(i)]);
  return hsic_statistic(buf, b);
}
}  // namespace

std::vector<double> permuted_hsic_serial(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                         const std::vector<std::vector<int>>& perms) {
  std::vector<double> out(perms.size());
  Eigen::MatrixXd buf(a.rows(), a.cols());
  for (std::size_t k = 0; k < perms.size(); ++k) out[k] = permuted_one(a, b, perms[k], buf);
  return out;
}

std::vector<double> permuted_hsic_parallel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                           const std::vector<std::vector<int>>& perms) {
  std::vector<double> out(perms.size());
  const auto m = static_cast<std::ptrdiff_t>(perms.size());
#pragma omp parallel
  {
    Eigen::MatrixXd buf(a.rows(), a.cols());
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < m; ++k)
      out[static_cast<std::size_t>(k)] = permuted_one(a, b, perms[static_cast<std::size_t>(k)], buf);
  }
  return out;
}

std::vector<std::vector<int>> neighbor_blocks(const Eigen::MatrixXd& g, int size) {
  const auto n = static_cast<int>(g.rows());
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> blocks;
  std::vector<std::pair<double, int>> cand;
  for (int i = 0; i < n; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    used[static_cast<std::size_t>(i)] = 1;
    cand.clear();
    for (int j = i + 1; j < n; ++j)
      if (!used[static_cast<std::size_t>(j)]) cand.emplace_back((g.row(i) - g.row(j)).squaredNorm(), j);
    const std::size_t take = std::min(cand.size(), static_cast<std::size_t>(size - 1));
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
    std::vector<int> block{i};
    for (std::size_t k = 0; k < take; ++k) {
      block.push_back(cand[k].second);
      used[static_cast<std::size_t>(cand[k].second)] = 1;
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace detail

namespace {

Eigen::MatrixXd centered_factor(const Column& col, const CiConfig& cfg) {
  CellKernel k(col, cfg.median_cap);
  Eigen::MatrixXd g = incomplete_cholesky(k, cfg.icl_tol, cfg.icl_max_rank, cfg.parallel);
  detail::center(g);
  return g;
}

TestResult finish(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const std::vector<std::vector<int>>& perms,
                  const CiConfig& cfg) {
  TestResult r;
  r.rows = static_cast<std::size_t>(a.rows());
  r.statistic = detail::hsic_statistic(a, b);
  const auto null = cfg.parallel ? detail::permuted_hsic_parallel(a, b, perms) : detail::permuted_hsic_serial(a, b, perms);
  // relative slack so that permutations reproducing the observed pairing
  // count as ties despite rounding
  const double thr = r.statistic * (1 - 1e-12);
  const auto ge = std::count_if(null.begin(), null.end(), [&](double t) { return t >= thr; });
  r.n_permutations = static_cast<int>(perms.size());
  r.p_value = (1.0 + static_cast<double>(ge)) / (1.0 + static_cast<double>(perms.size()));
  r.reject = r.p_value <= cfg.alpha;
  return r;
}

void check_rows(const Column& u, const Column& v, std::size_t min_rows, const char* who) {
  if (u.size() != v.size()) throw std::invalid_argument(std::string(who) + ": column lengths differ");
  if (u.size() < min_rows)
    throw std::invalid_argument(std::string(who) + ": need at least " + std::to_string(min_rows) + " rows, got " +
                                std::to_string(u.size()));
}

bool constant_column(const Column& c) {
  auto sorted = [](Cell x) {
    std::sort(x.begin(), x.end());
    return x;
  };
  const Cell first = sorted(c.front());
  return std::all_of(c.begin(), c.end(), [&](const Cell& x) { return sorted(x) == first; });
}

}  // namespace

TestResult marginal_test(const Column& u, const Column& v, const CiConfig& cfg, std::uint64_t seed) {
  check_rows(u, v, 10, "marginal_test");
  const Eigen::MatrixXd a = centered_factor(u, cfg);
  const Eigen::MatrixXd b = centered_factor(v, cfg);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(cfg.n_perm));
  for (auto& p : perms) {
    p.resize(u.size());
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
  }
  return finish(a, b, perms, cfg);
}

TestResult KernelConditionalTest::run(const Column& u, const Column& v, std::span<const Column> w,
                                      const CiConfig& cfg, std::uint64_t seed) const {
  if (w.empty()) return marginal_test(u, v, cfg, seed);
  check_rows(u, v, 20, "conditional_test");
  for (const auto& c : w)
    if (c.size() != u.size()) throw std::invalid_argument("conditional_test: conditioning column length differs");
  if (std::all_of(w.begin(), w.end(), constant_column)) {
    TestResult r = marginal_test(u, v, cfg, seed);
    r.fallback_marginal = true;
    return r;
  }
  const auto n = static_cast<Eigen::Index>(u.size());
  std::vector<CellKernel> wk;
  wk.reserve(w.size());
  for (const auto& c : w) wk.emplace_back(c, cfg.median_cap);
  std::vector<const CellKernel*> ptrs;
  for (const auto& k : wk) ptrs.push_back(&k);
  Eigen::MatrixXd gw = incomplete_cholesky(ptrs, cfg.icl_tol, cfg.icl_max_rank, cfg.parallel);

  // kernel ridge smoother S = Gw (Gw^T Gw + lambda I)^-1 Gw^T; residuals (I - S) X
  const double lambda = cfg.ridge * static_cast<double>(n);
  Eigen::MatrixXd gram = gw.transpose() * gw;
  gram.diagonal().array() += lambda;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  auto residualize = [&](Eigen::MatrixXd x) {
    x -= gw * llt.solve(gw.transpose() * x);
    return x;
  };
  const Eigen::MatrixXd a = residualize(centered_factor(u, cfg));
  const Eigen::MatrixXd b = residualize(centered_factor(v, cfg));

  const auto blocks = detail::neighbor_blocks(gw, cfg.block_size);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(cfg.n_perm));
  std::vector<int> shuffled;
  for (auto& p : perms) {
    p.resize(u.size());
    for (const auto& blk : blocks) {
      shuffled = blk;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      for (std::size_t k = 0; k < blk.size(); ++k) p[static_cast<std::size_t>(blk[k])] = shuffled[k];
    }
  }
  return finish(a, b, perms, cfg);
}

TestResult conditional_test(const Column& u, const Column& v, std::span<const Column> w, const CiConfig& cfg,
                            std::uint64_t seed) {
  return KernelConditionalTest{}.run(u, v, w, cfg, seed);
}

}  // namespace relcd
