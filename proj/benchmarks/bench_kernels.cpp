// SPDX-License-Identifier: Apache-2.0
//
// Micro benchmarks of the hot kernels at desk sizes.

#include "xlris/codebook.hpp"
#include "xlris/hybrid.hpp"
#include "xlris/multiuser_im.hpp"
#include "xlris/solvers.hpp"
#include "xlris/wmmse.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace xlris;

namespace {

CMat gauss(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  CMat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = cplx(n(rng), n(rng));
  return m;
}

void BM_Cmdpp(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const CVec k = gauss(rng, 4096, 1).col(0);
  const int bits = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cmdpp_project(k, bits));
  state.SetItemsProcessed(state.iterations() * k.size());
}
BENCHMARK(BM_Cmdpp)->Arg(1)->Arg(2)->Arg(3);

void BM_Ipdd(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = state.range(0);
  const auto q = QuadraticForm::from_residual(gauss(rng, n, n / 2), gauss(rng, n / 2, 1).col(0));
  IpddConfig cfg;
  cfg.multistart = state.range(1) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ipdd_quadratic_discrete(q, cfg, DiscretePhaseVector::zeros(cfg.bits, static_cast<std::size_t>(n))));
  }
}
BENCHMARK(BM_Ipdd)->Args({32, 0})->Args({128, 0})->Args({128, 1})->Unit(benchmark::kMillisecond);

void BM_DesignGram(benchmark::State& state) {
  const auto geom = SystemGeometry::half_wavelength(0.03, 32, 4, 4);
  const auto grid = make_sampling_grid({-30.0, 30.0}, {15.0, 75.0}, 64, 16, 1);
  const DesignChannels ch(geom, grid);
  const CVec w = CVec::Ones(4);
  benchmark::DoNotOptimize(ch.gram(w));  // first call builds the correlation
  for (auto _ : state) benchmark::DoNotOptimize(ch.gram(w));
}
BENCHMARK(BM_DesignGram)->Unit(benchmark::kMillisecond);

void BM_WmmseRound(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<CMat> ch;
  for (int k = 0; k < 3; ++k) ch.push_back(gauss(rng, 128, 8));
  const auto start = multiuser_start(ch, 10.0, 3);
  WmmseConfig cfg;
  cfg.max_iters = 1;
  cfg.ipdd.bits = 3;
  cfg.ipdd.multistart = false;
  for (auto _ : state) benchmark::DoNotOptimize(wmmse_sum_rate(ch, 10.0, 1e-3, start, cfg));
}
BENCHMARK(BM_WmmseRound)->Unit(benchmark::kMillisecond);

void BM_Hybrid(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const CVec w = gauss(rng, 16, 1).col(0);
  IpddConfig cfg;
  cfg.multistart = false;
  for (auto _ : state) benchmark::DoNotOptimize(hybrid_factorize(w, 4, cfg, 10.0, 5));
}
BENCHMARK(BM_Hybrid)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
