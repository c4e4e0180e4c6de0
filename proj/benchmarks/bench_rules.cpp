#include <benchmark/benchmark.h>

#include "evoter/evolution.hpp"
#include "evoter/parser.hpp"
#include "evoter/rng.hpp"

using namespace evoter;

namespace {

FeatureSchema bench_schema() {
  return FeatureSchema({{"a", 0.0, 1.0, FeatureKind::Continuous},
                        {"b", -3.0, 3.0, FeatureKind::Continuous},
                        {"c", 0.0, 192.0, FeatureKind::Continuous},
                        {"d", 0.0, 1.0, FeatureKind::Binary}},
                       {"X", "Y", "Z"}, 0);
}

RuleSet genome_of_size(int rules, RandomSource& rng) {
  const auto schema = bench_schema();
  GenomeParams params;
  params.initial_rules = rules;
  params.initial_conditions = 3;
  RuleSet rs = random_ruleset(schema, params, rng);
  while (static_cast<int>(rs.rules.size()) < rules) {
    RuleSet more = random_ruleset(schema, params, rng);
    for (auto& r : more.rules) {
      rs.rules.push_back(std::move(r));
      if (static_cast<int>(rs.rules.size()) == rules) break;
    }
  }
  return rs;
}

}  // namespace

static void BM_EvalRuleset(benchmark::State& state) {
  const auto schema = bench_schema();
  RandomSource rng(1);
  const RuleSet rs = genome_of_size(static_cast<int>(state.range(0)), rng);
  std::vector<std::vector<double>> history{{0.4, -1.0, 80.0, 1.0}};
  const InputFrame frame{history};
  for (auto _ : state) {
    auto out = eval_ruleset(rs, frame, EvalMode::FirstMatch);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EvalRuleset)->Arg(2)->Arg(8)->Arg(32);

static void BM_EvalRulesetHardMax(benchmark::State& state) {
  const auto schema = bench_schema();
  RandomSource rng(2);
  const RuleSet rs = genome_of_size(static_cast<int>(state.range(0)), rng);
  std::vector<std::vector<double>> history{{0.4, -1.0, 80.0, 1.0}};
  const InputFrame frame{history};
  EvalCounters counters;
  for (auto _ : state) {
    auto out = eval_ruleset(rs, frame, EvalMode::HardMax, &counters);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_EvalRulesetHardMax)->Arg(8)->Arg(32);

static void BM_ParseRenderRoundTrip(benchmark::State& state) {
  const auto schema = bench_schema();
  RandomSource rng(3);
  const RuleSet rs = genome_of_size(16, rng);
  const std::string text = render(rs);
  for (auto _ : state) {
    auto back = parse(text, schema);
    benchmark::DoNotOptimize(back);
  }
  state.SetBytesProcessed(state.iterations() * text.size());
}
BENCHMARK(BM_ParseRenderRoundTrip);

static void BM_Prune(benchmark::State& state) {
  const auto schema = bench_schema();
  RandomSource rng(4);
  const RuleSet rs = genome_of_size(16, rng);
  for (auto _ : state) {
    auto pruned = prune(rs, schema);
    benchmark::DoNotOptimize(pruned);
  }
}
BENCHMARK(BM_Prune);

BENCHMARK_MAIN();
