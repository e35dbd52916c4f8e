// Microbenchmarks for the hot paths: feature evaluation, statistic
// accumulation, the closed-form solve and importance sampling.
#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "tgp/learn.hpp"
#include "tgp/rng.hpp"
#include "tgp/sampling.hpp"
#include "tgp/suffstats.hpp"

namespace {

Eigen::MatrixXd random_rows(int n, int d, std::uint64_t seed) {
  tgp::Rng rng(seed);
  Eigen::MatrixXd rows(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) rows(i, j) = rng.normal();
  return rows;
}

void BM_PhiBlock(benchmark::State& state) {
  const int s_count = static_cast<int>(state.range(0));
  const tgp::RffBasis basis = tgp::RffBasis::sample(2, s_count, 1.0, 1);
  const Eigen::MatrixXd rows = random_rows(4096, 2, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(basis.phi_block(rows));
  }
  state.SetItemsProcessed(state.iterations() * rows.rows());
}
BENCHMARK(BM_PhiBlock)->Arg(128)->Arg(512)->Arg(1000);

void BM_Accumulate(benchmark::State& state) {
  const int s_count = static_cast<int>(state.range(0));
  const tgp::RffBasis basis = tgp::RffBasis::sample(2, s_count, 1.0, 1);
  const Eigen::MatrixXd rows = random_rows(8192, 2, 3);
  const tgp::BaseMeasure base = tgp::empirical_base(rows);
  for (auto _ : state) {
    tgp::SuffStats stats(basis, base, tgp::NoiseGrid::zero_only());
    stats.accumulate(rows);
    benchmark::DoNotOptimize(stats.n());
  }
  state.SetItemsProcessed(state.iterations() * rows.rows());
}
BENCHMARK(BM_Accumulate)->Arg(128)->Arg(512)->Arg(1000);

void BM_FitClosedForm(benchmark::State& state) {
  const int s_count = static_cast<int>(state.range(0));
  const tgp::RffBasis basis = tgp::RffBasis::sample(2, s_count, 1.0, 1);
  const Eigen::MatrixXd rows = random_rows(8192, 2, 4);
  const tgp::BaseMeasure base = tgp::empirical_base(rows);
  tgp::SuffStats stats(basis, base, tgp::NoiseGrid::zero_only());
  stats.accumulate(rows);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tgp::fit_fd(stats, 0.1));
  }
}
BENCHMARK(BM_FitClosedForm)->Arg(128)->Arg(512)->Arg(1000);

void BM_DrawWeighted(benchmark::State& state) {
  const int s_count = 512;
  const tgp::RffBasis basis = tgp::RffBasis::sample(2, s_count, 1.0, 1);
  const Eigen::MatrixXd rows = random_rows(8192, 2, 5);
  const tgp::BaseMeasure base = tgp::empirical_base(rows);
  tgp::SuffStats stats(basis, base, tgp::NoiseGrid::zero_only());
  stats.accumulate(rows);
  const tgp::TgpModel model = tgp::fit_fd(stats, 1.0);
  const int n_samples = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tgp::draw_weighted(model, n_samples, 9));
  }
  state.SetItemsProcessed(state.iterations() * n_samples);
}
BENCHMARK(BM_DrawWeighted)->Arg(10000)->Arg(50000);

}  // namespace

BENCHMARK_MAIN();
