#include <benchmark/benchmark.h>

#include "iikl/baselines/baselines.hpp"
#include "iikl/data/data.hpp"
#include "iikl/geometry/jacobi.hpp"
#include "iikl/geometry/metric.hpp"
#include "iikl/losses/losses.hpp"
#include "iikl/neighborhood/knn.hpp"
#include "iikl/trainer/trainer.hpp"

namespace {

using namespace iikl;

Matrix roll(int n) {
  return data::synth_generate(data::SynthKind::kSwissRoll, n, {}, 7).data.X;
}

trainer::Networks nets_for(int ambient) {
  trainer::TrainConfig cfg;
  return trainer::make_networks(ambient, cfg);
}

void BM_DecoderForwardBatch(benchmark::State& state) {
  const auto nets = nets_for(3);
  const Matrix z = Matrix::Random(2, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nets.decoder.forward_batch(z));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecoderForwardBatch)->Arg(100)->Arg(1000);

void BM_JacobianBatch(benchmark::State& state) {
  const auto nets = nets_for(3);
  const Matrix z = Matrix::Random(2, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nets.pullback.jacobian_batch(z));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_JacobianBatch)->Arg(100)->Arg(1000);

void BM_PullbackMetrics(benchmark::State& state) {
  const auto nets = nets_for(3);
  const Matrix z = Matrix::Random(2, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(geometry::pullback_metrics(nets.pullback, z));
}
BENCHMARK(BM_PullbackMetrics)->Arg(100)->Arg(1000);

void BM_KnnIndex(benchmark::State& state) {
  const Matrix x = roll(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(neighborhood::knn_index(x, 8));
}
BENCHMARK(BM_KnnIndex)->Arg(500)->Arg(2000);

void BM_IsometricLoss(benchmark::State& state) {
  const int n = 100;
  const auto nets = nets_for(3);
  const Matrix x = roll(n);
  const Matrix latents = nets.encoder.forward_batch(x.transpose()).transpose();
  const auto index = neighborhood::knn_index(x, 8);
  std::vector<neighborhood::SamplingSet> sets;
  for (int h = 0; h < n; ++h) sets.push_back(neighborhood::sampling_set(latents, index, h));
  const auto mode = state.range(0) == 0 ? losses::PushMode::kSecant : losses::PushMode::kJvp;
  for (auto _ : state) {
    benchmark::DoNotOptimize(losses::isometric_loss(nets.pullback, nets.decoder, latents, sets, mode));
  }
}
BENCHMARK(BM_IsometricLoss)->Arg(0)->Arg(1);

void BM_SymmetricEigen(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix a = Matrix::Random(n, n);
  const Matrix s = a + a.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(geometry::symmetric_eigen(s));
}
BENCHMARK(BM_SymmetricEigen)->Arg(3)->Arg(16)->Arg(64);

void BM_TrainIterations(benchmark::State& state) {
  const Matrix x = roll(500);
  trainer::TrainConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trainer::train(x, cfg));
}
BENCHMARK(BM_TrainIterations)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Isomap(benchmark::State& state) {
  const Matrix x = roll(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(baselines::isomap_embed(x, 8, 2));
}
BENCHMARK(BM_Isomap)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
