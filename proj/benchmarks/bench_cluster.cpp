#include <benchmark/benchmark.h>

#include "ssc/cluster.hpp"
#include "ssc/rng.hpp"

using namespace ssc;

namespace {

// Block-diagonal coefficients with a little off-block mass.
CoefficientMatrix blocks(int num_blocks, int size) {
  const int n = num_blocks * size;
  Rng rng(RngSpec{14, {}});
  Matrix c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double scale = (i / size == j / size) ? 1.0 : 0.01;
      c(i, j) = i == j ? 0.0 : scale * rng.uniform();
    }
  }
  return CoefficientMatrix(c);
}

std::vector<int> block_labels(int num_blocks, int size) {
  std::vector<int> labels;
  for (int l = 0; l < num_blocks; ++l) labels.insert(labels.end(), size, l);
  return labels;
}

void BM_SpectralCluster(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto c = blocks(k, static_cast<int>(state.range(1)));
  const auto graph = cluster::build_affinity(c);
  for (auto _ : state) benchmark::DoNotOptimize(cluster::spectral_cluster(graph, k, RngSpec{2, {}}).assignments);
}

void BM_Evaluate(benchmark::State& state) {
  const auto c = blocks(3, 20);
  const auto labels = block_labels(3, 20);
  for (auto _ : state) benchmark::DoNotOptimize(cluster::evaluate(c, labels, 3, RngSpec{3, {}}).accuracy);
}

void BM_Hungarian(benchmark::State& state) {
  const auto n = state.range(0);
  Rng rng(RngSpec{15, {}});
  Matrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(cluster::hungarian(cost));
}

}  // namespace

BENCHMARK(BM_SpectralCluster)->Args({3, 20})->Args({10, 20})->Args({100, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Hungarian)->Arg(10)->Arg(100);
