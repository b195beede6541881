// Microbenchmarks for the hot paths: stable sampling, special-function
// evaluation per routing regime, clock inversion, and a full solver pass.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "tcsde/mittag_leffler.hpp"
#include "tcsde/rng.hpp"
#include "tcsde/sde.hpp"
#include "tcsde/timechange.hpp"

namespace {

void BM_StableIncrement(benchmark::State& state) {
  const tcsde::StableParams params(static_cast<double>(state.range(0)) /
                                   100.0);
  tcsde::RngStream rng(1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tcsde::sample_stable_increment(params, 1.0, rng));
  }
}
BENCHMARK(BM_StableIncrement)->Arg(30)->Arg(50)->Arg(80);

// argument is 10 * z, so -5 exercises the series, -80 the quadrature
// midrange and -400 the asymptotic tail
void BM_MlEval(benchmark::State& state) {
  const double z = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tcsde::ml_eval(0.5, z, 1e-10));
  }
}
BENCHMARK(BM_MlEval)->Arg(-5)->Arg(-80)->Arg(-400);

void BM_InvertSubordinator(benchmark::State& state) {
  const tcsde::StableParams params(0.5);
  tcsde::RngStream rng(2, 1);
  const tcsde::GridPath u =
      tcsde::build_covering_subordinator_path(params, 1e-3, 1.0, rng);
  const std::size_t count = 1001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tcsde::invert_subordinator(u, 0.0, 1e-3, count));
  }
}
BENCHMARK(BM_InvertSubordinator);

void BM_DirectSolve(benchmark::State& state) {
  tcsde::SystemSpec spec;
  spec.a = Eigen::MatrixXd::Constant(1, 1, -1.0);
  spec.linear_clock = tcsde::LinearClock::operational;
  spec.perturbation = tcsde::Perturbation::diffusion_in_clock_brownian;
  spec.g = tcsde::GFunction::exp_decay(1.0, 1.0);
  spec.x0 = Eigen::VectorXd::Ones(1);
  const tcsde::StableParams params(0.5);
  tcsde::RngStream clock_rng(3, 1);
  const tcsde::TimeChange tc =
      tcsde::make_time_change(params, 0.005, 0.01, 1.0, clock_rng);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    tcsde::RngStream noise(3, 1000 + stream++);
    benchmark::DoNotOptimize(
        tcsde::solve_time_changed_direct(spec, tc, noise));
  }
}
BENCHMARK(BM_DirectSolve);

}  // namespace

BENCHMARK_MAIN();
