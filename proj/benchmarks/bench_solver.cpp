#include <benchmark/benchmark.h>

#include "ssc/simulate.hpp"
#include "ssc/solver.hpp"

#include <cmath>

using namespace ssc;

namespace {

Matrix fig7_data(int d, double sigma) {
  const auto spec = sim::ModelSpec::uniform(sim::ModelKind::fully_random, 100, d, 3, 5.0,
                                            {sim::NoiseKind::gaussian, sigma});
  return sim::generate(spec, RngSpec{11, {}}).data.values();
}

void run_solver(benchmark::State& state, solver::SolveMode mode, bool polish) {
  const Matrix x = fig7_data(static_cast<int>(state.range(0)), 0.2);
  solver::SolveConfig cfg;
  cfg.lambda = static_cast<double>(state.range(1));
  cfg.mode = mode;
  cfg.polish = polish;
  int iterations = 0;
  for (auto _ : state) {
    const auto sol = solver::solve_self_expression(x, cfg);
    iterations = sol.iterations;
    benchmark::DoNotOptimize(sol.objective);
  }
  state.counters["N"] = static_cast<double>(x.cols());
  state.counters["admm_iters"] = iterations;
}

void BM_SolveMatrix(benchmark::State& state) { run_solver(state, solver::SolveMode::matrix, true); }
void BM_SolveColumn(benchmark::State& state) { run_solver(state, solver::SolveMode::column, true); }
void BM_SolveMatrixNoPolish(benchmark::State& state) { run_solver(state, solver::SolveMode::matrix, false); }

// One lambda sweep with warm starts, as the experiment grid runs it.
void BM_LambdaSweep(benchmark::State& state) {
  const Matrix x = fig7_data(4, 0.2);
  solver::SolveConfig cfg;
  for (auto _ : state) {
    std::optional<Matrix> prev;
    for (int k = 0; k < 25; ++k) {
      cfg.lambda = 0.1 * std::pow(1e5, k / 24.0);
      auto sol = solver::solve_matrix(x, cfg, prev ? &*prev : nullptr);
      prev = sol.coefficients.values();
    }
    benchmark::DoNotOptimize(prev);
  }
}

}  // namespace

BENCHMARK(BM_SolveMatrix)->Args({4, 10})->Args({4, 100})->Args({16, 10})->Args({32, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveColumn)->Args({4, 10})->Args({4, 100})->Args({16, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveMatrixNoPolish)->Args({4, 10})->Args({16, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LambdaSweep)->Unit(benchmark::kMillisecond);
