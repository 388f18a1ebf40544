#include <benchmark/benchmark.h>

#include "ssc/geometry.hpp"
#include "ssc/simulate.hpp"

using namespace ssc;

namespace {

// Samples of one random d-dimensional subspace of R^50.
struct Instance {
  Matrix basis;
  Matrix points;
};

Instance instance(int d, int count) {
  Rng rng(RngSpec{12, {static_cast<std::uint64_t>(d)}});
  Instance out;
  out.basis = sim::random_subspace(50, d, rng);
  out.points.resize(50, count);
  for (int j = 0; j < count; ++j) out.points.col(j) = out.basis * rng.unit_vector(d);
  return out;
}

void BM_Inradius(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto inst = instance(d, 5 * d);
  geometry::InradiusOptions opts;
  opts.budget = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::estimate_inradius(inst.points, inst.basis, RngSpec{1, {}}, opts));
  }
}

void BM_LeaveOneOutInradius(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto inst = instance(d, 5 * d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::leave_one_out_inradius(inst.points, inst.basis, RngSpec{1, {}}));
  }
}

void BM_Incoherence(benchmark::State& state) {
  const auto spec = sim::ModelSpec::uniform(sim::ModelKind::fully_random, 100, 4, 3, 5.0);
  const auto ds = sim::generate(spec, RngSpec{13, {}});
  solver::SolveConfig cfg;
  cfg.lambda = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(geometry::subspace_incoherence(ds, cfg).mu);
}

}  // namespace

BENCHMARK(BM_Inradius)->Args({2, 0})->Args({4, 2000})->Args({4, 20000})->Args({8, 20000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeaveOneOutInradius)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Incoherence)->Unit(benchmark::kMillisecond);
