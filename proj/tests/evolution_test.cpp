#include <doctest.h>

#include <cmath>
#include <set>

#include "evoter/errors.hpp"
#include "evoter/evolution.hpp"
#include "evoter/parser.hpp"
#include "helpers.hpp"

using namespace evoter;

namespace {

Candidate candidate_with_fitness(double f, std::uint64_t id) {
  Candidate c;
  c.objectives = {f};
  c.id = id;
  return c;
}

RuleSet named_rules(const FeatureSchema& schema, const std::vector<std::string>& actions,
                    const std::string& default_action) {
  // distinct single-condition rules, one per requested action tag
  RuleSet rs;
  RandomSource rng(1);
  GenomeParams params;
  for (const auto& a : actions) {
    Rule r;
    r.conditions.push_back(random_condition(schema, params, rng));
    r.action = {a, 1.0};
    rs.rules.push_back(std::move(r));
  }
  rs.default_action = {default_action, 1.0};
  return rs;
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("tournament: exhaustive k returns the global best") {
  std::vector<Candidate> pop;
  for (int i = 0; i < 10; ++i) pop.push_back(candidate_with_fitness(i * 0.1, i + 1));
  RandomSource rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Candidate& c = tournament_select(pop, 64, rng);  // k >> population, no ties
    CHECK(c.objectives[0] == doctest::Approx(0.9));
  }
}

TEST_CASE("tournament: k=1 is uniform sampling") {
  std::vector<Candidate> pop;
  for (int i = 0; i < 4; ++i) pop.push_back(candidate_with_fitness(i, i + 1));
  RandomSource rng(17);
  std::vector<int> counts(4, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i)
    ++counts[static_cast<int>(tournament_select(pop, 1, rng).objectives[0])];
  for (int c : counts) {
    // each within 5 sigma of n/4
    const double sigma = std::sqrt(n * 0.25 * 0.75);
    CHECK(std::abs(c - n / 4.0) < 5 * sigma);
  }
}

TEST_CASE("tournament: P(best of {1,2,3} with k=2) = 5/9") {
  // oracle: enumerate the 9 ordered draws; 5 of them contain fitness 3
  int wins = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (std::max(a, b) == 2) ++wins;
  const double expected = wins / 9.0;
  CHECK(expected == doctest::Approx(5.0 / 9.0));

  std::vector<Candidate> pop{candidate_with_fitness(1, 1), candidate_with_fitness(2, 2),
                             candidate_with_fitness(3, 3)};
  RandomSource rng(23);
  const int n = 90000;
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (tournament_select(pop, 2, rng).objectives[0] == 3.0) ++hits;
  const double sigma = std::sqrt(n * expected * (1 - expected));
  CHECK(std::abs(hits - n * expected) < 5 * sigma);

  CHECK_THROWS_AS(tournament_select({}, 2, rng), EmptyPopulation);
}

TEST_CASE("splice_at: stated construction") {
  const auto xy = test::xy_schema();
  const RuleSet a = named_rules(xy, {"A", "A", "A"}, "A");   // r1 r2 r3
  const RuleSet b = named_rules(xy, {"B", "B"}, "B");        // s1 s2
  const RuleSet child = splice_at(a, b, 1, 0, 50);
  REQUIRE(child.rules.size() == 3);
  CHECK(child.rules[0] == a.rules[0]);
  CHECK(child.rules[1] == b.rules[0]);
  CHECK(child.rules[2] == b.rules[1]);
  CHECK(child.default_action.name == "A");
}

TEST_CASE("splice: empty first parent copies the second, keeps a's default") {
  const auto xy = test::xy_schema();
  RuleSet a;
  a.default_action = {"A", 1.0};
  const RuleSet b = named_rules(xy, {"B"}, "B");
  RandomSource rng(4);
  const RuleSet child = crossover_splice(a, b, 50, rng);
  REQUIRE(child.rules.size() == 1);
  CHECK(child.rules[0] == b.rules[0]);
  CHECK(child.default_action.name == "A");
}

TEST_CASE("splice: identical parents donate only their own rules") {
  const auto xy = test::xy_schema();
  const RuleSet a = named_rules(xy, {"A", "B", "A"}, "A");
  RandomSource rng(9);
  for (int i = 0; i < 100; ++i) {
    const RuleSet child = crossover_splice(a, a, 50, rng);
    for (const auto& r : child.rules) {
      bool found = false;
      for (const auto& orig : a.rules) found = found || r == orig;
      CHECK(found);
    }
  }
}

TEST_CASE("splice respects the rule cap") {
  const auto xy = test::xy_schema();
  const RuleSet a = named_rules(xy, {"A", "A", "A", "A"}, "A");
  const RuleSet b = named_rules(xy, {"B", "B", "B", "B"}, "B");
  RandomSource rng(12);
  for (int i = 0; i < 50; ++i)
    CHECK(crossover_splice(a, b, 5, rng).rules.size() <= 5);
}

TEST_CASE("product: cartesian construction and caps") {
  const auto xy = test::xy_schema();
  const RuleSet a = named_rules(xy, {"A", "A"}, "A");
  const RuleSet b = named_rules(xy, {"B", "B", "B"}, "B");
  RandomSource rng(31);
  const RuleSet child = crossover_product(a, b, 50, 10, rng);
  REQUIRE(child.rules.size() == 6);
  CHECK(child.default_action.name == "B");
  for (std::size_t i = 0; i < 6; ++i) {
    const Rule& r = child.rules[i];
    CHECK(r.conditions.size() == a.rules[0].conditions.size() + b.rules[0].conditions.size());
    CHECK(r.action.name == "B");  // action from the second parent
    CHECK(r.conditions.front() == a.rules[i / 3].conditions.front());
    CHECK(r.conditions.back() == b.rules[i % 3].conditions.front());
  }

  // |a|=|b|=1: one merged rule
  const RuleSet one = crossover_product(named_rules(xy, {"A"}, "A"), named_rules(xy, {"B"}, "B"),
                                        50, 10, rng);
  CHECK(one.rules.size() == 1);

  // cap on pairs
  const RuleSet capped = crossover_product(a, b, 4, 10, rng);
  CHECK(capped.rules.size() == 4);
  // condition cap
  const RuleSet squeezed = crossover_product(a, b, 50, 1, rng);
  for (const auto& r : squeezed.rules) CHECK(r.conditions.size() == 1);

  RuleSet empty;
  empty.default_action = {"A", 1.0};
  CHECK_THROWS_AS(crossover_product(empty, b, 50, 10, rng), EmptyParent);
}

TEST_CASE("mutation applicability") {
  const auto xy = test::xy_schema();
  GenomeParams params;
  RuleSet empty;
  empty.default_action = {"A", 1.0};
  const auto kinds = applicable_mutations(empty, xy, params);
  REQUIRE(kinds.size() == 1);
  CHECK(kinds[0] == MutationKind::ChangeDefault);

  const RuleSet two = named_rules(xy, {"A", "B"}, "A");
  const auto more = applicable_mutations(two, xy, params);
  CHECK(more.size() == 8);
}

TEST_CASE("mutate: empty rule set can only change its default") {
  const auto xy = test::xy_schema();
  GenomeParams params;
  RuleSet empty;
  empty.default_action = {"A", 1.0};
  RandomSource rng(8);
  for (int i = 0; i < 20; ++i) {
    const RuleSet m = mutate(empty, xy, params, rng);
    CHECK(m.rules.empty());
    CHECK(m.default_action.name == "B");
  }
}

TEST_CASE("mutate: removing the last condition removes the rule") {
  const auto xy = test::xy_schema();
  GenomeParams params;
  RuleSet rs = named_rules(xy, {"A"}, "B");
  REQUIRE(rs.rules[0].conditions.size() == 1);
  RandomSource rng(15);
  bool saw_rule_removal = false;
  for (int i = 0; i < 400 && !saw_rule_removal; ++i) {
    const RuleSet m = mutate(rs, xy, params, rng);
    // whatever mutation hit, a 1-condition rule never becomes 0-condition
    for (const auto& r : m.rules) CHECK(!r.conditions.empty());
    saw_rule_removal = saw_rule_removal || m.rules.empty();
  }
  CHECK(saw_rule_removal);
}

TEST_CASE("mutate: 10k mutants re-parse from their own render") {
  const auto xy = test::xy_schema(3);
  GenomeParams params;
  params.max_lag = 3;
  params.with_certainty = true;
  params.initial_rules = 5;
  RandomSource rng(77);
  RuleSet rs = random_ruleset(xy, params, rng);
  for (int i = 0; i < 10000; ++i) {
    rs = mutate(rs, xy, params, rng);
    if (i % 20 == 0) {
      const RuleSet back = parse(render(rs), xy);
      CHECK(back == rs);
    }
    if (rs.rules.empty()) rs = random_ruleset(xy, params, rng);
    CHECK(rs.rules.size() <= 50);
    for (const auto& r : rs.rules) CHECK(r.conditions.size() <= 10);
  }
}

TEST_CASE("reproduce: no crossover, no mutation is pruned clone of a") {
  const auto xy = test::xy_schema();
  EvoParams params;
  params.crossover_probability = 0.0;
  params.mutation_rate = 0.0;
  RandomSource rng(21);
  Candidate a, b;
  a.genome = test::dirty_ruleset(xy, params.genome, rng);
  b.genome = random_ruleset(xy, params.genome, rng);
  a.counters.reset(a.genome.rules.size());
  for (auto& h : a.counters.rule_hits) h = 1;  // everything active
  b.counters.reset(b.genome.rules.size());
  const ReproduceResult rep = reproduce(a, b, xy, params, rng);
  CHECK(rep.style == CrossoverStyle::None);
  CHECK_FALSE(rep.mutated);
  CHECK(rep.offspring == prune(a.genome, xy));
}

TEST_CASE("reproduce: fully inactive parent donates nothing to splice") {
  const auto xy = test::xy_schema();
  EvoParams params;
  params.crossover_probability = 1.0;
  params.mutation_rate = 0.0;
  RandomSource rng(33);
  Candidate a, b;
  a.genome = named_rules(xy, {"A", "A", "A"}, "A");
  a.counters.reset(3);  // all zero: inactive
  b.genome = named_rules(xy, {"B", "B"}, "B");
  b.counters.reset(2);
  for (auto& h : b.counters.rule_hits) h = 5;
  for (int i = 0; i < 60; ++i) {
    const ReproduceResult rep = reproduce(a, b, xy, params, rng);
    for (const auto& r : rep.offspring.rules) CHECK(r.action.name == "B");
  }
}

TEST_CASE("reproduce: style split is close to 50/50") {
  const auto xy = test::xy_schema();
  EvoParams params;
  params.crossover_probability = 1.0;
  params.mutation_rate = 0.0;
  RandomSource rng(55);
  Candidate a, b;
  a.genome = named_rules(xy, {"A", "A"}, "A");
  b.genome = named_rules(xy, {"B", "B"}, "B");
  a.counters.reset(2);
  b.counters.reset(2);
  for (auto& h : a.counters.rule_hits) h = 1;
  for (auto& h : b.counters.rule_hits) h = 1;
  int splices = 0;
  for (int i = 0; i < 1000; ++i)
    if (reproduce(a, b, xy, params, rng).style == CrossoverStyle::Splice) ++splices;
  CHECK(splices >= 420);  // binomial 99% interval
  CHECK(splices <= 580);
}

TEST_CASE("evolve: deterministic, monotone, archive-fed") {
  const auto xy = test::xy_schema();
  EvoParams params;
  params.population_size = 30;
  params.generations = 15;
  params.seed = 424242;
  params.genome.initial_rules = 3;

  // positive-x share under first-match: deterministic toy objective
  auto evaluator = [&](const RuleSet& rs) {
    Evaluation ev;
    ev.counters.reset(rs.rules.size());
    RandomSource frames_rng(1234);  // same frames for every candidate
    auto frames = test::random_frames(xy, 64, frames_rng);
    double hits = 0;
    for (const auto& hist : frames) {
      const InputFrame f{hist};
      const auto out = eval_ruleset(rs, f, EvalMode::FirstMatch, &ev.counters);
      if ((out.primary().name == "A") == (hist[0][0] > 0.5)) hits += 1.0;
    }
    ev.objectives = {hits / 64.0};
    return ev;
  };

  const RunResult r1 = evolve(evaluator, params, xy);
  const RunResult r2 = evolve(evaluator, params, xy);
  REQUIRE(r1.records.size() == 16);
  CHECK(render(r1.champion.genome) == render(r2.champion.genome));
  CHECK(r1.champion.objectives[0] == r2.champion.objectives[0]);
  for (std::size_t g = 1; g < r1.records.size(); ++g)
    CHECK(r1.records[g].best[0] >= r1.records[g - 1].best[0] - 1e-12);
  CHECK(r1.records.back().archive_size >= 1);
  CHECK(r1.evaluations == 30u + 15u * 29u);  // elite carried, not re-evaluated

  // generations = 0: stats only, champion is the best random genome
  EvoParams zero = params;
  zero.generations = 0;
  const RunResult r0 = evolve(evaluator, zero, xy);
  CHECK(r0.records.size() == 1);
  CHECK(r0.evaluations == 30u);
}

TEST_CASE("evolve: evaluator failure surfaces as EvaluatorFailure") {
  const auto xy = test::xy_schema();
  EvoParams params;
  params.population_size = 4;
  params.generations = 2;
  auto broken = [](const RuleSet&) -> Evaluation { throw Error("boom"); };
  CHECK_THROWS_AS(evolve(broken, params, xy), EvaluatorFailure);
}

TEST_CASE("evolve: early stop through the callback") {
  const auto xy = test::xy_schema();
  EvoParams params;
  params.population_size = 10;
  params.generations = 50;
  auto evaluator = [](const RuleSet& rs) {
    Evaluation ev;
    ev.counters.reset(rs.rules.size());
    ev.objectives = {static_cast<double>(rs.rules.size())};
    return ev;
  };
  int calls = 0;
  const RunResult r = evolve(
      evaluator, params, xy,
      [&](const GenRecord&, std::span<const Candidate>) { return ++calls < 3; });
  CHECK(r.stopped_early);
  CHECK(calls == 3);
}

TEST_CASE("param validation") {
  const auto xy = test::xy_schema();
  EvoParams p;
  p.population_size = 1;
  CHECK_THROWS_AS(p.validate(xy), InvalidParams);
  p.population_size = 10;
  p.elitism_count = 10;
  CHECK_THROWS_AS(p.validate(xy), InvalidParams);
  p.elitism_count = 1;
  p.genome.max_conditions = 0;
  CHECK_THROWS_AS(p.validate(xy), InvalidParams);
}

}  // TEST_SUITE

TEST_SUITE("evolution.properties") {

TEST_CASE("offspring are grammar-valid and within caps") {
  const auto xy = test::xy_schema(2);
  EvoParams params;
  params.genome.max_rules = 6;
  params.genome.max_conditions = 4;
  params.genome.max_lag = 2;
  params.genome.initial_rules = 4;
  params.genome.initial_conditions = 3;
  RandomSource rng(808);

  // parents with mixed activity snapshots
  auto make_parent = [&](std::uint64_t id) {
    Candidate c;
    c.genome = random_ruleset(xy, params.genome, rng);
    c.id = id;
    c.counters.reset(c.genome.rules.size());
    for (auto& h : c.counters.rule_hits) h = rng.chance(0.7) ? 3 : 0;
    return c;
  };
  for (int i = 0; i < 2000; ++i) {
    const Candidate a = make_parent(1), b = make_parent(2);
    const ReproduceResult rep = reproduce(a, b, xy, params, rng);
    const RuleSet& child = rep.offspring;
    CHECK(child.rules.size() <= 6);
    for (const auto& rule : child.rules) {
      CHECK(!rule.conditions.empty());
      CHECK(rule.conditions.size() <= 4);
    }
    CHECK(parse(render(child), xy) == child);
  }
}

TEST_CASE("surrogate evolution keeps the elitism guarantee") {
  // synthetic deterministic objective standing in for a fitted predictor
  const auto xy = test::xy_schema();
  EvoParams params;
  params.population_size = 20;
  params.generations = 12;
  params.seed = 31337;
  auto evaluator = [&](const RuleSet& rs) {
    Evaluation ev;
    ev.counters.reset(rs.rules.size());
    double score = 0.0;
    for (const auto& r : rs.rules) score += r.action.name == "A" ? 1.0 : -0.25;
    ev.objectives = {score};
    return ev;
  };
  const RunResult run = evolve(evaluator, params, xy);
  for (std::size_t g = 1; g < run.records.size(); ++g)
    CHECK(run.records[g].best[0] >= run.records[g - 1].best[0]);
}

}  // TEST_SUITE
