#include <doctest.h>

#include "evoter/errors.hpp"
#include "evoter/parser.hpp"
#include "evoter/rules.hpp"
#include "helpers.hpp"

using namespace evoter;

namespace {

FeatureSchema cartpole_schema() { return FeatureSchema::load(test::data_path("schemas/cartpole.json")); }

RuleSet figure3(const FeatureSchema& schema) {
  return parse_file(test::data_path("figures/fig3.rules"), schema);
}

}  // namespace

TEST_SUITE("rules") {

TEST_CASE("eval_term: coefficient, power and identity") {
  const auto schema = cartpole_schema();
  // 0.11 * velocity^3 at velocity = 1.0
  const Term t = Term::make(0.11, "velocity.of.cart", 3, 0, schema);
  std::vector<std::vector<double>> h{{0.0, 1.0, 0.0, 0.0}};
  CHECK(eval_term(t, test::frame_of(h)) == doctest::Approx(0.11));

  // identity coefficient and power
  const auto xy = test::xy_schema();
  const Term id = Term::make(1.0, "x", 1, 0, xy);
  std::vector<std::vector<double>> h2{{0.5, 0.0}};
  CHECK(eval_term(id, test::frame_of(h2)) == doctest::Approx(0.5));

  // odd power keeps the sign
  std::vector<std::vector<double>> h3{{0.0, -2.0, 0.0, 0.0}};
  CHECK(eval_term(t, test::frame_of(h3)) == doctest::Approx(0.11 * -8.0));
}

TEST_CASE("eval_term: lag addressing and insufficient history") {
  const auto xy = test::xy_schema(4);
  const Term lagged = Term::make(1.0, "x", 1, 4, xy);
  std::vector<std::vector<double>> three{{0.1, 0}, {0.2, 0}, {0.3, 0}};
  CHECK_THROWS_AS(eval_term(lagged, test::frame_of(three)), InsufficientHistory);

  std::vector<std::vector<double>> five{{0.1, 0}, {0.2, 0}, {0.3, 0}, {0.4, 0}, {0.5, 0}};
  CHECK(eval_term(lagged, test::frame_of(five)) == doctest::Approx(0.1));  // 4 back from last
  const Term now = Term::make(1.0, "x", 1, 0, xy);
  CHECK(eval_term(now, test::frame_of(five)) == doctest::Approx(0.5));
}

TEST_CASE("eval_condition: figure-3 comparison and reflexivity") {
  const auto schema = cartpole_schema();
  const RuleSet rs = figure3(schema);
  REQUIRE(rs.rules.size() == 1);
  // velocity = 0, angle = 0.1: 0 < 0.087
  std::vector<std::vector<double>> h{{0.0, 0.0, 0.1, 0.0}};
  CHECK(eval_condition(rs.rules[0].conditions[0], test::frame_of(h)));

  const auto xy = test::xy_schema();
  Condition refl;
  refl.leading = Term::make(0.5, "x", 1, 0, xy);
  refl.op = CompareOp::LessEq;
  refl.trailing = refl.leading;
  for (double x : {0.0, 0.3, 1.0}) {
    std::vector<std::vector<double>> hx{{x, 0.0}};
    CHECK(eval_condition(refl, test::frame_of(hx)));
  }
}

TEST_CASE("eval_condition: constant comparison from figure 2") {
  // (Mean[0] < 72.75) with Mean = 80 is false
  FeatureSchema bp({{"Mean[0]", 20.0, 200.0, FeatureKind::Continuous}}, {"Low", "Normal"}, 0);
  Condition c;
  c.leading = Term::make(1.0, "Mean[0]", 1, 0, bp);
  c.op = CompareOp::Less;
  c.trailing = Constant{72.75, 20.0, 200.0};
  std::vector<std::vector<double>> h{{80.0}};
  CHECK_FALSE(eval_condition(c, test::frame_of(h)));
  h[0][0] = 70.0;
  CHECK(eval_condition(c, test::frame_of(h)));
}

TEST_CASE("eval_ruleset: figure 3 picks LEFT, empty rules fall to default") {
  const auto schema = cartpole_schema();
  const RuleSet rs = figure3(schema);
  std::vector<std::vector<double>> h{{0.0, 0.0, 0.1, 0.0}};
  CHECK(eval_ruleset(rs, test::frame_of(h), EvalMode::FirstMatch).primary().name == "LEFT");

  RuleSet empty;
  empty.default_action = {"RIGHT", 1.0};
  for (auto mode : {EvalMode::FirstMatch, EvalMode::HardMax, EvalMode::AllMatched})
    CHECK(eval_ruleset(empty, test::frame_of(h), mode).primary().name == "RIGHT");
}

TEST_CASE("eval_ruleset: hard-max selects the higher certainty") {
  const auto xy = test::xy_schema();
  // both rules match everything; certainties from figure 6 rules 1-2
  Condition always;
  always.leading = Term::make(1.0, "x", 1, 0, xy);
  always.op = CompareOp::GreaterEq;
  always.trailing = Constant{-1.0, 0.0, 1.0};

  RuleSet rs;
  rs.rules.push_back({{always}, {"A", 0.21}});
  rs.rules.push_back({{always}, {"B", 0.59}});
  rs.default_action = {"A", 0.13};
  std::vector<std::vector<double>> h{{0.5, 0.5}};
  const auto out = eval_ruleset(rs, test::frame_of(h), EvalMode::HardMax);
  CHECK(out.primary().name == "B");
  CHECK(out.primary().certainty == doctest::Approx(0.59));
}

TEST_CASE("eval_ruleset: hard-max ties go to the earliest rule") {
  const auto xy = test::xy_schema();
  Condition always;
  always.leading = Term::make(1.0, "x", 1, 0, xy);
  always.op = CompareOp::GreaterEq;
  always.trailing = Constant{-1.0, 0.0, 1.0};
  RuleSet rs;
  rs.rules.push_back({{always}, {"B", 0.5}});
  rs.rules.push_back({{always}, {"A", 0.5}});
  rs.default_action = {"A", 0.5};
  std::vector<std::vector<double>> h{{0.5, 0.5}};
  CHECK(eval_ruleset(rs, test::frame_of(h), EvalMode::HardMax).primary().name == "B");

  // equal certainties everywhere reduce hard-max to first-match
  RandomSource rng(11);
  GenomeParams params;
  params.initial_rules = 5;
  for (int i = 0; i < 200; ++i) {
    RuleSet random = random_ruleset(xy, params, rng);
    auto frames = test::random_frames(xy, 20, rng);
    for (const auto& hist : frames) {
      const InputFrame f{hist};
      CHECK(eval_ruleset(random, f, EvalMode::HardMax) ==
            eval_ruleset(random, f, EvalMode::FirstMatch));
    }
  }
}

TEST_CASE("eval_ruleset: all_matched returns distinct actions, default last") {
  const auto xy = test::xy_schema();
  Condition always;
  always.leading = Term::make(1.0, "x", 1, 0, xy);
  always.op = CompareOp::GreaterEq;
  always.trailing = Constant{-1.0, 0.0, 1.0};
  Condition never = always;
  never.op = CompareOp::Less;

  RuleSet rs;
  rs.rules.push_back({{always}, {"A", 1.0}});
  rs.rules.push_back({{never}, {"B", 1.0}});
  rs.rules.push_back({{always}, {"A", 1.0}});  // duplicate action, matched again
  rs.default_action = {"B", 1.0};
  std::vector<std::vector<double>> h{{0.5, 0.5}};
  const auto out = eval_ruleset(rs, test::frame_of(h), EvalMode::AllMatched);
  REQUIRE(out.actions.size() == 2);
  CHECK(out.actions[0].name == "A");
  CHECK(out.actions[1].name == "B");
}

TEST_CASE("times_applied: first-match sums to the number of evaluations") {
  const auto xy = test::xy_schema();
  RandomSource rng(42);
  GenomeParams params;
  params.initial_rules = 6;
  const int n_frames = 500;
  for (int trial = 0; trial < 20; ++trial) {
    RuleSet rs = random_ruleset(xy, params, rng);
    EvalCounters counters;
    counters.reset(rs.rules.size());
    auto frames = test::random_frames(xy, n_frames, rng);
    for (const auto& hist : frames)
      eval_ruleset(rs, InputFrame{hist}, EvalMode::FirstMatch, &counters);
    CHECK(counters.total() == n_frames);
  }
}

TEST_CASE("times_applied: shadowed rules still count matches in hard-max") {
  const auto xy = test::xy_schema();
  Condition always;
  always.leading = Term::make(1.0, "x", 1, 0, xy);
  always.op = CompareOp::GreaterEq;
  always.trailing = Constant{-1.0, 0.0, 1.0};
  RuleSet rs;
  rs.rules.push_back({{always}, {"A", 0.9}});
  rs.rules.push_back({{always}, {"B", 0.1}});
  rs.default_action = {"A", 0.05};
  EvalCounters counters;
  std::vector<std::vector<double>> h{{0.5, 0.5}};
  eval_ruleset(rs, test::frame_of(h), EvalMode::HardMax, &counters);
  CHECK(counters.rule_hits[0] == 1);
  CHECK(counters.rule_hits[1] == 1);  // matched even though it lost
  CHECK(counters.default_hits == 0);

  eval_ruleset(rs, test::frame_of(h), EvalMode::FirstMatch, &counters);
  CHECK(counters.rule_hits[0] == 2);
  CHECK(counters.rule_hits[1] == 1);  // first-match never reached it
}

TEST_CASE("order sensitivity in first-match") {
  const auto xy = test::xy_schema();
  Condition low;  // x < 0.5
  low.leading = Term::make(1.0, "x", 1, 0, xy);
  low.op = CompareOp::Less;
  low.trailing = Constant{0.5, 0.0, 1.0};
  Condition high = low;  // x < 0.9
  high.trailing = Constant{0.9, 0.0, 1.0};

  RuleSet ab;
  ab.rules.push_back({{low}, {"A", 1.0}});
  ab.rules.push_back({{high}, {"B", 1.0}});
  ab.default_action = {"B", 1.0};
  RuleSet ba = ab;
  std::swap(ba.rules[0], ba.rules[1]);

  std::vector<std::vector<double>> h{{0.3, 0.0}};
  CHECK(eval_ruleset(ab, test::frame_of(h), EvalMode::FirstMatch).primary().name == "A");
  CHECK(eval_ruleset(ba, test::frame_of(h), EvalMode::FirstMatch).primary().name == "B");

  // a single rule plus default is permutation-proof (nothing to permute)
  RuleSet single;
  single.rules.push_back({{low}, {"A", 1.0}});
  single.default_action = {"B", 1.0};
  CHECK(eval_ruleset(single, test::frame_of(h), EvalMode::FirstMatch).primary().name == "A");
}

TEST_CASE("determinism: same frame, same outcome") {
  const auto xy = test::xy_schema();
  RandomSource rng(7);
  GenomeParams params;
  RuleSet rs = random_ruleset(xy, params, rng);
  auto frames = test::random_frames(xy, 50, rng);
  for (const auto& hist : frames) {
    const InputFrame f{hist};
    for (auto mode : {EvalMode::FirstMatch, EvalMode::HardMax, EvalMode::AllMatched})
      CHECK(eval_ruleset(rs, f, mode) == eval_ruleset(rs, f, mode));
  }
}

TEST_CASE("coefficient quantization and range checks") {
  const auto xy = test::xy_schema();
  CHECK_THROWS_AS(Term::make(0.0, "x", 1, 0, xy), CoefficientOutOfRange);
  CHECK_THROWS_AS(Term::make(1.2, "x", 1, 0, xy), CoefficientOutOfRange);
  CHECK_THROWS_AS(Term::make(0.004, "x", 1, 0, xy), CoefficientOutOfRange);
  CHECK(Term::make(1.0, "x", 1, 0, xy).coefficient == 1.0);
  CHECK(Term::make(0.333, "x", 1, 0, xy).coefficient == doctest::Approx(0.33));
  CHECK_THROWS_AS(Term::make(0.5, "z", 1, 0, xy), UnknownFeature);
}

}  // TEST_SUITE
