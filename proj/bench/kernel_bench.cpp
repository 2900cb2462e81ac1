// Serial vs OpenMP versions of the kernel hot paths.

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "relcd/citest.hpp"
#include "relcd/kernel.hpp"

using namespace relcd;

namespace {

Column set_column(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<> g;
  Column c(n);
  for (auto& cell : c) {
    const std::size_t k = 1 + rng() % 3;
    for (std::size_t i = 0; i < k; ++i) cell.push_back(g(rng));
  }
  return c;
}

template <Eigen::MatrixXd (*Gram)(const CellKernel&)>
void BM_gram(benchmark::State& state) {
  const Column c = set_column(static_cast<std::size_t>(state.range(0)), 1);
  const CellKernel k(c);
  for (auto _ : state) benchmark::DoNotOptimize(Gram(k));
  state.SetComplexityN(state.range(0));
}

template <bool Parallel>
void BM_incomplete_cholesky(benchmark::State& state) {
  const Column c = set_column(static_cast<std::size_t>(state.range(0)), 2);
  const CellKernel k(c);
  for (auto _ : state) benchmark::DoNotOptimize(incomplete_cholesky(k, 1e-6, 100, Parallel));
}

template <bool Parallel>
void BM_permuted_hsic(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, 40), b = Eigen::MatrixXd::Random(n, 40);
  detail::center(a);
  detail::center(b);
  std::mt19937_64 rng(3);
  std::vector<std::vector<int>> perms(200, std::vector<int>(static_cast<std::size_t>(n)));
  for (auto& p : perms) {
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
  }
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(detail::permuted_hsic_parallel(a, b, perms));
    else
      benchmark::DoNotOptimize(detail::permuted_hsic_serial(a, b, perms));
  }
}

}  // namespace

BENCHMARK(BM_gram<gram_serial>)->Name("gram/serial")->Arg(200)->Arg(500)->Arg(1000);
BENCHMARK(BM_gram<gram_parallel>)->Name("gram/parallel")->Arg(200)->Arg(500)->Arg(1000);
BENCHMARK(BM_incomplete_cholesky<false>)->Name("icl/serial")->Arg(500)->Arg(2000);
BENCHMARK(BM_incomplete_cholesky<true>)->Name("icl/parallel")->Arg(500)->Arg(2000);
BENCHMARK(BM_permuted_hsic<false>)->Name("permuted_hsic/serial")->Arg(200)->Arg(500);
BENCHMARK(BM_permuted_hsic<true>)->Name("permuted_hsic/parallel")->Arg(200)->Arg(500);

BENCHMARK_MAIN();
