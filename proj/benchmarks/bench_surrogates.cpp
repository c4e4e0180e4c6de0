#include <benchmark/benchmark.h>

#include "evoter/environments.hpp"
#include "evoter/esp.hpp"
#include "evoter/rng.hpp"

using namespace evoter;

namespace {

std::vector<DecisionSample> cartpole_samples(OutcomeKind kind, int n) {
  CartPoleEnv env;
  CollectParams params;
  params.n_prescriptors = 10;
  params.episodes = 2;
  params.samples = n;
  params.outcome = kind;
  params.seed = 5;
  params.genome.initial_rules = 2;
  params.genome.initial_conditions = 1;
  return collect_env(env, params);
}

}  // namespace

static void BM_KnnPredict(benchmark::State& state) {
  CartPoleEnv env;
  KnnPredictor knn(env.schema(), 5);
  knn.fit(cartpole_samples(OutcomeKind::SurvivalHorizon, static_cast<int>(state.range(0))));
  const std::vector<double> ctx{0.01, 0.2, -0.03, 0.1};
  for (auto _ : state) {
    auto out = knn.predict(ctx, "LEFT");
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_KnnPredict)->Arg(100)->Arg(400);

static void BM_RidgeFit(benchmark::State& state) {
  CartPoleEnv env;
  const auto samples = cartpole_samples(OutcomeKind::NextStateDelta, 100);
  for (auto _ : state) {
    RidgePredictor ridge(env.schema());
    ridge.fit(samples);
    benchmark::DoNotOptimize(ridge);
  }
}
BENCHMARK(BM_RidgeFit);

static void BM_ModelRolloutFitness(benchmark::State& state) {
  CartPoleEnv env;
  RidgePredictor model(env.schema());
  model.fit(cartpole_samples(OutcomeKind::NextStateDelta, 100));

  EspSetup setup;
  RolloutSpec rollout;
  rollout.horizon = 400;
  for (int i = 0; i < 50; ++i) {
    CartPoleEnv boot;
    boot.reset(static_cast<std::uint64_t>(i));
    rollout.starts.push_back(boot.features());
  }
  setup.rollout = rollout;

  RandomSource rng(21);
  GenomeParams params;
  params.initial_rules = 2;
  params.initial_conditions = 1;
  const RuleSet rs = random_ruleset(env.schema(), params, rng);
  const auto schema = env.schema();
  for (auto _ : state) {
    const double fitness = predicted_outcome(model, schema, {}, rs, setup);
    benchmark::DoNotOptimize(fitness);
  }
}
BENCHMARK(BM_ModelRolloutFitness);
