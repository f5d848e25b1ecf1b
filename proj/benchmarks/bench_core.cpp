#include <benchmark/benchmark.h>

#include <numeric>

#include "nnxml/autoencoder.hpp"
#include "nnxml/lime.hpp"
#include "nnxml/matrix.hpp"
#include "nnxml/nmf.hpp"
#include "nnxml/parallel.hpp"
#include "nnxml/rng.hpp"

using namespace nnxml;

namespace {

DenseMatrix random_dense(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(RngSeed{seed});
  DenseMatrix m(r, c);
  for (double& x : m.values()) x = rng.uniform();
  return m;
}

// Binary label matrix with roughly density * n * p positives.
LabelMatrix random_labels(std::size_t n, std::size_t p, double density, std::uint64_t seed) {
  Rng rng(RngSeed{seed});
  std::vector<LabelEntry> entries;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (rng.bernoulli(density)) entries.push_back({i, j, 1.0});
  return LabelMatrix(n, p, std::move(entries));
}

EncoderStack random_stack(std::size_t p, std::vector<std::size_t> dims, std::uint64_t seed) {
  std::vector<DenseMatrix> layers;
  std::size_t in = p;
  for (std::size_t k : dims) {
    layers.push_back(random_dense(in, k, seed++));
    in = k;
  }
  return EncoderStack(p, std::move(layers));
}

}  // namespace

static void BM_DenseMatmul(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto a = random_dense(n, n, 1), b = random_dense(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * std::int64_t(2 * n * n * n));
}
BENCHMARK(BM_DenseMatmul)->Arg(64)->Arg(256);

static void BM_SparseTimesDense(benchmark::State& state) {
  const auto v = random_labels(3379, 708, 0.02, 3);
  const auto e = random_dense(708, std::size_t(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(v.times(e));
}
BENCHMARK(BM_SparseTimesDense)->Arg(16)->Arg(64);

static void BM_ReconstructionLoss(benchmark::State& state) {
  const auto v = random_labels(3379, 708, 0.02, 5);
  const auto stack = random_stack(708, {64, 16}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruction_loss(v, stack));
}
BENCHMARK(BM_ReconstructionLoss)->Unit(benchmark::kMillisecond);

static void BM_AutoencoderGradients(benchmark::State& state) {
  set_num_threads(std::size_t(state.range(0)));
  const auto v = random_labels(3379, 708, 0.02, 7);
  const auto stack = random_stack(708, {64, 16}, 8);
  for (auto _ : state) benchmark::DoNotOptimize(ae_gradients(v, stack));
  set_num_threads(0);
}
BENCHMARK(BM_AutoencoderGradients)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_NmfIterations(benchmark::State& state) {
  const auto v = random_labels(3379, 708, 0.02, 9);
  NmfConfig cfg;
  cfg.k = std::size_t(state.range(0));
  cfg.max_iters = 10;
  cfg.rel_tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(nmf_factorize(v, cfg));
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_NmfIterations)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_LimeExplain(benchmark::State& state) {
  const std::size_t d = std::size_t(state.range(0));
  std::vector<double> coef(d);
  std::iota(coef.begin(), coef.end(), 1.0);
  const std::vector<double> x(d, 1.0);
  LimeConfig cfg;
  cfg.num_samples = 1000;
  cfg.k_features = 6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lime_explain(
        x,
        [&](std::span<const double> z) {
          return std::inner_product(z.begin(), z.end(), coef.begin(), 0.0);
        },
        cfg));
  }
}
BENCHMARK(BM_LimeExplain)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
