#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "evoter/dataset.hpp"
#include "evoter/errors.hpp"
#include "evoter/esp.hpp"
#include "evoter/parser.hpp"
#include "helpers.hpp"

using namespace evoter;

namespace {

FeatureSchema tiny_schema() {
  return FeatureSchema({{"x", 0.0, 1.0, FeatureKind::Continuous}}, {"GO", "STOP"}, 0);
}

std::vector<DecisionSample> tiny_samples() {
  // outcome = 1 when the action matches the side of x
  std::vector<DecisionSample> s;
  for (int i = 0; i < 20; ++i) {
    const double x = (i % 10) / 10.0;
    const bool right_side = x >= 0.5;
    const std::string action = i < 10 ? "GO" : "STOP";
    const double outcome = (right_side == (action == "GO")) ? 1.0 : 0.0;
    s.push_back({{x}, action, {outcome}});
  }
  return s;
}

}  // namespace

TEST_SUITE("esp") {

TEST_CASE("knn: exact recall with k=1") {
  KnnPredictor knn(tiny_schema(), 1);
  const auto samples = tiny_samples();
  knn.fit(samples);
  for (const auto& s : samples)
    CHECK(knn.predict(s.context, s.action)[0] == doctest::Approx(s.outcome[0]));
}

TEST_CASE("knn: k = N collapses to the global mean") {
  const auto samples = tiny_samples();
  KnnPredictor knn(tiny_schema(), static_cast<int>(samples.size()));
  knn.fit(samples);
  double mean = 0.0;
  for (const auto& s : samples) mean += s.outcome[0];
  mean /= static_cast<double>(samples.size());
  CHECK(knn.predict({0.31}, "GO")[0] == doctest::Approx(mean));
  CHECK(knn.predict({0.99}, "STOP")[0] == doctest::Approx(mean));
}

TEST_CASE("knn: unweighted mean of two neighbours at distances 1 and 2") {
  FeatureSchema wide({{"x", 0.0, 10.0, FeatureKind::Continuous}}, {}, 0);
  KnnPredictor knn(wide, 2);
  knn.fit({{{4.0}, "", {0.0}}, {{7.0}, "", {1.0}}});  // distances 1 and 2 from x=5
  CHECK(knn.predict({5.0}, "")[0] == doctest::Approx(0.5));
}

TEST_CASE("knn: ties break by insertion order") {
  FeatureSchema wide({{"x", 0.0, 10.0, FeatureKind::Continuous}}, {}, 0);
  KnnPredictor knn(wide, 1);
  knn.fit({{{4.0}, "", {0.0}}, {{6.0}, "", {1.0}}});  // both at distance 1 from x=5
  CHECK(knn.predict({5.0}, "")[0] == doctest::Approx(0.0));
}

TEST_CASE("knn: guards") {
  KnnPredictor knn(tiny_schema(), 5);
  CHECK_THROWS_AS(knn.predict({0.5}, "GO"), NotFitted);
  CHECK_THROWS_AS(knn.fit({{{0.5}, "GO", {1.0}}}), TooFewSamples);
  CHECK_THROWS_AS(KnnPredictor(tiny_schema(), 0), InvalidParams);
  KnnPredictor one(tiny_schema(), 1);
  one.fit({{{0.5}, "GO", {1.0}}});
  CHECK_THROWS_AS(one.predict({0.5}, "LAUNCH"), UnknownAction);
}

TEST_CASE("knn: serialization round-trips predictions") {
  KnnPredictor knn(tiny_schema(), 3);
  knn.fit(tiny_samples());
  const auto path = (std::filesystem::temp_directory_path() / "evoter_knn.json").string();
  knn.save(path);
  const KnnPredictor back = KnnPredictor::load(path);
  CHECK(back.k() == 3);
  for (double x : {0.05, 0.42, 0.77}) {
    CHECK(back.predict({x}, "GO")[0] == doctest::Approx(knn.predict({x}, "GO")[0]));
    CHECK(back.predict({x}, "STOP")[0] == doctest::Approx(knn.predict({x}, "STOP")[0]));
  }
}

TEST_CASE("collect_env: deterministic policy visits exactly its own trace") {
  CartPoleEnv env;
  CollectParams params;
  params.n_prescriptors = 1;
  params.episodes = 1;
  params.samples = 100000;  // no subsampling
  params.seed = 3;
  const auto samples = collect_env(env, params);
  CHECK(!samples.empty());
  // replay: the recorded actions come from one fixed policy and seed
  const auto again = collect_env(env, params);
  REQUIRE(samples.size() == again.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].action == again[i].action);
    CHECK(samples[i].context == again[i].context);
    CHECK(samples[i].outcome == again[i].outcome);
  }
  // outcomes are clamped to the horizon
  for (const auto& s : samples) {
    CHECK(s.outcome[0] >= 0.0);
    CHECK(s.outcome[0] <= params.horizon);
  }
}

TEST_CASE("collect_env: 100-sample cap and dying-run outcomes") {
  CartPoleEnv env;
  CollectParams params;
  params.n_prescriptors = 10;
  params.episodes = 2;
  params.samples = 100;
  params.seed = 11;
  const auto samples = collect_env(env, params);
  CHECK(samples.size() == 100);
  // random prescriptors mostly die: some outcomes must be below the horizon
  int below = 0;
  for (const auto& s : samples)
    if (s.outcome[0] < params.horizon) ++below;
  CHECK(below > 0);
}

TEST_CASE("collect_table: one sample per row with the numeric label") {
  const Table t = make_heart_failure_table();
  const auto samples = collect_table(t);
  REQUIRE(samples.size() == t.rows.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].context == t.rows[i]);
    CHECK(samples[i].action.empty());
    CHECK(samples[i].outcome[0] == (t.labels[i] == "1" ? 1.0 : 0.0));
  }
  Table unlabeled;
  unlabeled.schema = t.schema;
  unlabeled.rows = t.rows;
  CHECK_THROWS_AS(collect_table(unlabeled), MissingLabel);
}

TEST_CASE("surrogate evaluator: constant predictor makes every candidate tie") {
  struct ConstantPredictor : Predictor {
    void fit(const std::vector<DecisionSample>&) override {}
    std::vector<double> predict(const std::vector<double>&, const std::string&) const override {
      return {0.5};
    }
  };
  ConstantPredictor flat;
  const auto schema = tiny_schema();
  std::vector<std::vector<double>> contexts{{0.1}, {0.5}, {0.9}};
  EspSetup setup;
  const auto evaluator = make_surrogate_evaluator(flat, schema, contexts, setup);
  RandomSource rng(2);
  GenomeParams params;
  for (int i = 0; i < 20; ++i) {
    const auto ev = evaluator(random_ruleset(schema, params, rng));
    CHECK(ev.objectives[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("surrogate fitness is deterministic and separates good from bad") {
  KnnPredictor knn(tiny_schema(), 1);
  knn.fit(tiny_samples());
  std::vector<std::vector<double>> contexts;
  for (int i = 0; i < 10; ++i) contexts.push_back({i / 10.0});
  EspSetup setup;

  // the known-perfect policy: GO iff x >= 0.5
  const auto schema = tiny_schema();
  const RuleSet good = parse("1. 1.00*x >= 0.5 [0..1] -> GO\nDEFAULT -> STOP\n", schema);
  const RuleSet bad = parse("1. 1.00*x >= 0.5 [0..1] -> STOP\nDEFAULT -> GO\n", schema);
  const double good_fit = predicted_outcome(knn, tiny_schema(), contexts, good, setup);
  const double bad_fit = predicted_outcome(knn, tiny_schema(), contexts, bad, setup);
  CHECK(good_fit == doctest::Approx(1.0));
  CHECK(bad_fit == doctest::Approx(0.0));
  CHECK(predicted_outcome(knn, tiny_schema(), contexts, good, setup) == good_fit);
}

TEST_CASE("interventions pin a feature before the query") {
  // predictor trained on death as a function of x alone
  FeatureSchema s({{"x", 0.0, 1.0, FeatureKind::Continuous}}, {"fix.x", "leave"}, 0);
  KnnPredictor knn(s, 1);
  std::vector<DecisionSample> samples;
  for (int i = 0; i <= 10; ++i) samples.push_back({{i / 10.0}, "", {i / 10.0}});
  knn.fit(samples);

  EspSetup setup;
  setup.mode = EvalMode::HardMax;
  setup.direction = OutcomeDirection::Minimize;
  InterventionMap iv;
  iv.by_action["fix.x"] = {0, 0.0};   // treat: set x to 0
  iv.by_action["leave"] = {0, 1.0};   // sham: set x to 1
  setup.interventions = iv;

  const RuleSet fixer = parse("DEFAULT -> fix.x\n", s);
  const RuleSet leaver = parse("DEFAULT -> leave\n", s);
  std::vector<std::vector<double>> contexts{{0.3}, {0.8}};
  CHECK(predicted_outcome(knn, s, contexts, fixer, setup) == doctest::Approx(0.0));
  CHECK(predicted_outcome(knn, s, contexts, leaver, setup) == doctest::Approx(1.0));

  const auto evaluator = make_surrogate_evaluator(knn, s, contexts, setup);
  // minimization: the engine-facing objective is negated
  CHECK(evaluator(fixer).objectives[0] == doctest::Approx(0.0));
  CHECK(evaluator(leaver).objectives[0] == doctest::Approx(-1.0));
}

TEST_CASE("random baseline sits between the best and worst policy") {
  KnnPredictor knn(tiny_schema(), 1);
  knn.fit(tiny_samples());
  std::vector<std::vector<double>> contexts;
  for (int i = 0; i < 10; ++i) contexts.push_back({i / 10.0});
  EspSetup setup;
  GenomeParams genome;
  const double baseline = random_prescriptor_baseline(knn, contexts, tiny_schema(), genome,
                                                      setup, 20, 5);
  CHECK(baseline > 0.05);
  CHECK(baseline < 0.95);
}

TEST_CASE("predictor MCC on a separable toy problem") {
  FeatureSchema s({{"x", 0.0, 1.0, FeatureKind::Continuous}}, {}, 0);
  KnnPredictor knn(s, 1);
  std::vector<DecisionSample> samples;
  for (int i = 0; i <= 10; ++i) samples.push_back({{i / 10.0}, "", {i >= 5 ? 1.0 : 0.0}});
  knn.fit(samples);
  Table holdout;
  holdout.schema = s;
  for (int i = 0; i <= 20; ++i) {
    holdout.rows.push_back({i / 20.0});
    holdout.labels.push_back(i >= 10 ? "1" : "0");
  }
  CHECK(predictor_mcc(knn, holdout) > 0.8);
}

}  // TEST_SUITE

TEST_SUITE("esp.model") {

TEST_CASE("ridge: recovers an exact linear rule per action") {
  FeatureSchema s({{"x", 0.0, 10.0, FeatureKind::Continuous},
                   {"y", 0.0, 10.0, FeatureKind::Continuous}},
                  {"up", "down"}, 0);
  RidgePredictor ridge(s, 1e-9);
  std::vector<DecisionSample> samples;
  RandomSource rng(31);
  for (int i = 0; i < 40; ++i) {
    const double x = rng.uniform(0.0, 10.0), y = rng.uniform(0.0, 10.0);
    // up: delta = (2x + 1, -y); down: delta = (y - x, 3)
    samples.push_back({{x, y}, "up", {2 * x + 1, -y}});
    samples.push_back({{x, y}, "down", {y - x, 3.0}});
  }
  ridge.fit(samples);
  const auto up = ridge.predict({4.0, 2.0}, "up");
  CHECK(up[0] == doctest::Approx(9.0));
  CHECK(up[1] == doctest::Approx(-2.0));
  const auto down = ridge.predict({4.0, 2.0}, "down");
  CHECK(down[0] == doctest::Approx(-2.0));
  CHECK(down[1] == doctest::Approx(3.0));

  CHECK_THROWS_AS(ridge.predict({1.0, 1.0}, "sideways"), UnknownAction);
  RidgePredictor unfitted(s);
  CHECK_THROWS_AS(unfitted.predict({1.0, 1.0}, "up"), NotFitted);
}

TEST_CASE("ridge: serialization round-trips predictions") {
  FeatureSchema s({{"x", 0.0, 1.0, FeatureKind::Continuous}}, {"a"}, 0);
  RidgePredictor ridge(s);
  std::vector<DecisionSample> samples;
  for (int i = 0; i <= 10; ++i) samples.push_back({{i / 10.0}, "a", {3.0 * i / 10.0 - 1.0}});
  ridge.fit(samples);
  const auto path = (std::filesystem::temp_directory_path() / "evoter_ridge.json").string();
  ridge.save(path);
  const RidgePredictor back = RidgePredictor::load(path);
  for (double x : {0.1, 0.5, 0.9})
    CHECK(back.predict({x}, "a")[0] == doctest::Approx(ridge.predict({x}, "a")[0]));
}

TEST_CASE("next-state collection drops terminal transitions") {
  CartPoleEnv env;
  CollectParams params;
  params.n_prescriptors = 6;
  params.episodes = 2;
  params.samples = 100000;  // keep everything
  params.outcome = OutcomeKind::NextStateDelta;
  params.seed = 4;
  const auto samples = collect_env(env, params);
  REQUIRE(!samples.empty());
  const auto& schema = env.schema();
  for (const auto& s : samples) {
    REQUIRE(s.outcome.size() == schema.width());
    // applying the recorded delta lands inside the declared ranges: the
    // clamped terminal step was dropped
    for (std::size_t i = 0; i < schema.width(); ++i) {
      const double next = s.context[i] + s.outcome[i];
      CHECK(next >= schema.feature(i).min - 1e-9);
      CHECK(next <= schema.feature(i).max + 1e-9);
    }
  }
}

TEST_CASE("model rollout: fitted dynamics keep the reference policy alive") {
  CartPoleEnv env;
  CollectParams params;
  params.n_prescriptors = 10;
  params.episodes = 2;
  params.samples = 100;
  params.outcome = OutcomeKind::NextStateDelta;
  params.seed = 2;
  params.genome.initial_rules = 2;
  params.genome.initial_conditions = 1;
  const auto samples = collect_env(env, params);
  RidgePredictor model(env.schema());
  model.fit(samples);

  EspSetup setup;
  RolloutSpec rollout;
  rollout.horizon = 300;
  for (int i = 0; i < 20; ++i) {
    CartPoleEnv boot;
    boot.reset(mix_seed(11, static_cast<std::uint64_t>(i)));
    rollout.starts.push_back(boot.features());
  }
  setup.rollout = rollout;

  const auto schema = env.schema();
  const RuleSet balancer = parse_file(test::data_path("figures/fig3.rules"), schema);
  RuleSet faller;
  faller.default_action = {"LEFT", 1.0};

  const double good = predicted_outcome(model, schema, {}, balancer, setup);
  const double bad = predicted_outcome(model, schema, {}, faller, setup);
  CHECK(good > 200.0);
  CHECK(bad < 60.0);
  CHECK(good == predicted_outcome(model, schema, {}, balancer, setup));  // deterministic

  const auto evaluator = make_surrogate_evaluator(model, schema, {}, setup);
  CHECK(evaluator(balancer).objectives[0] == doctest::Approx(good));
}

}  // TEST_SUITE
