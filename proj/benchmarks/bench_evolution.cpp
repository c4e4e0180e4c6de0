#include <benchmark/benchmark.h>

#include "evoter/environments.hpp"
#include "evoter/evolution.hpp"
#include "evoter/rng.hpp"

using namespace evoter;

static void BM_Mutate(benchmark::State& state) {
  FeatureSchema schema({{"a", 0.0, 1.0, FeatureKind::Continuous},
                        {"b", -3.0, 3.0, FeatureKind::Continuous}},
                       {"X", "Y"}, 3);
  GenomeParams params;
  params.max_lag = 3;
  params.initial_rules = 6;
  RandomSource rng(7);
  RuleSet rs = random_ruleset(schema, params, rng);
  for (auto _ : state) {
    rs = mutate(rs, schema, params, rng);
    if (rs.rules.empty()) rs = random_ruleset(schema, params, rng);
    benchmark::DoNotOptimize(rs);
  }
}
BENCHMARK(BM_Mutate);

static void BM_CartPoleEpisode(benchmark::State& state) {
  CartPoleEnv env;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    env.reset(seed++);
    double reward = 0.0;
    while (!env.done())
      reward += env.step(env.features()[2] > 0 ? "LEFT" : "RIGHT");
    benchmark::DoNotOptimize(reward);
  }
}
BENCHMARK(BM_CartPoleEpisode);

static void BM_FlappyEpisode(benchmark::State& state) {
  FlappyEnv env;
  RandomSource rng(9);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    env.reset(seed++);
    int frames = 0;
    while (!env.done() && frames < 1000) {
      env.step(rng.chance(0.1) ? "FLAP" : "NO FLAP");
      ++frames;
    }
    benchmark::DoNotOptimize(frames);
  }
}
BENCHMARK(BM_FlappyEpisode);

static void BM_EvolveGeneration(benchmark::State& state) {
  // one full generation step on a cheap synthetic objective
  FeatureSchema schema({{"a", 0.0, 1.0, FeatureKind::Continuous},
                        {"b", -3.0, 3.0, FeatureKind::Continuous}},
                       {"X", "Y"}, 0);
  auto evaluator = [](const RuleSet& rs) {
    Evaluation ev;
    ev.counters.reset(rs.rules.size());
    ev.objectives = {static_cast<double>(rs.condition_count())};
    return ev;
  };
  EvoParams params;
  params.population_size = 100;
  params.generations = 1;
  for (auto _ : state) {
    params.seed++;
    auto result = evolve(evaluator, params, schema);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_EvolveGeneration);
