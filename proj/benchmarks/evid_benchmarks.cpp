#include <benchmark/benchmark.h>

#include <random>

#include "evid/active_sampler.hpp"
#include "evid/edl_losses.hpp"
#include "evid/enn_trainer.hpp"
#include "evid/evidential_core.hpp"
#include "evid/special_functions.hpp"

namespace {

evid::DirichletPrediction random_prediction(std::size_t classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 20.0);
  evid::Vector a(static_cast<Eigen::Index>(classes));
  for (auto& v : a) v = u(rng);
  return evid::DirichletPrediction(a);
}

void BM_Digamma(benchmark::State& state) {
  double x = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evid::digamma(x));
    x = x < 50.0 ? x + 0.731 : 0.37;
  }
}
BENCHMARK(BM_Digamma);

void BM_CovarianceBundle(benchmark::State& state) {
  const auto p = random_prediction(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(evid::covariance_bundle(p));
}
BENCHMARK(BM_CovarianceBundle)->Arg(5)->Arg(20)->Arg(100);

void BM_Quantify(benchmark::State& state) {
  const auto p = random_prediction(static_cast<std::size_t>(state.range(0)), 2);
  const auto mode = state.range(1) == 0 ? evid::QuantMode::variance : evid::QuantMode::entropy;
  for (auto _ : state) benchmark::DoNotOptimize(evid::quantify(p, mode));
}
BENCHMARK(BM_Quantify)->Args({5, 0})->Args({5, 1})->Args({100, 0})->Args({100, 1});

void BM_LossGradients(benchmark::State& state) {
  const auto p = random_prediction(10, 3);
  const evid::OneHotLabel label(4, 10);
  evid::LossConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evid::loss_gradients(p, label, cfg));
    benchmark::DoNotOptimize(evid::loss_gradients(p, std::nullopt, cfg));
  }
}
BENCHMARK(BM_LossGradients);

void BM_ForwardBatch(benchmark::State& state) {
  const auto model = evid::EvidentialMLP::glorot({2, 64, 64, 5}, 4);
  const evid::Matrix x = evid::Matrix::Random(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(evid::forward_batch(model, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Arg(32)->Arg(2000);

void BM_TrainStep(benchmark::State& state) {
  auto model = evid::EvidentialMLP::glorot({2, 64, 64, 5}, 5);
  evid::SgdMomentum opt(model, 0.9, 1e-3);
  evid::MiniBatch batch;
  batch.supervised_inputs = evid::Matrix::Random(32, 2);
  batch.labels.assign(32, 0);
  for (std::size_t i = 0; i < 32; ++i) batch.labels[i] = i % 5;
  batch.unlabeled_inputs = evid::Matrix::Random(32, 2);
  evid::LossConfig cfg;
  cfg.mode = evid::QuantMode::variance;
  cfg.lambda_e = 50.0;
  for (auto _ : state) benchmark::DoNotOptimize(evid::backward_and_step(model, opt, batch, cfg, 1e-3));
}
BENCHMARK(BM_TrainStep);

void BM_SelectRound(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<evid::ScoredSample> scores;
  for (std::size_t i = 0; i < 2000; ++i) scores.push_back({i, u(rng), u(rng), i % 5});
  const evid::RoundPlan plan{1, 20, 100, 10};
  for (auto _ : state) benchmark::DoNotOptimize(evid::select_round(scores, plan, {}, 5));
}
BENCHMARK(BM_SelectRound);

}  // namespace

BENCHMARK_MAIN();
