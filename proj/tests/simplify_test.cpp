#include <doctest.h>

#include "evoter/parser.hpp"
#include "evoter/simplify.hpp"
#include "helpers.hpp"

using namespace evoter;

namespace {

bool equivalent(const RuleSet& a, const RuleSet& b, const FeatureSchema& schema,
                std::size_t n_frames, std::uint64_t seed) {
  RandomSource rng(seed);
  const auto frames = test::random_frames(schema, n_frames, rng);
  for (const auto& hist : frames) {
    const InputFrame f{hist};
    for (auto mode : {EvalMode::FirstMatch, EvalMode::HardMax, EvalMode::AllMatched})
      if (!(eval_ruleset(a, f, mode) == eval_ruleset(b, f, mode))) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("simplify") {

TEST_CASE("figure 3 is already minimal") {
  const auto schema = FeatureSchema::load(test::data_path("schemas/cartpole.json"));
  const RuleSet rs = parse_file(test::data_path("figures/fig3.rules"), schema);
  SimplifyStats stats;
  const RuleSet out = simplify(rs, schema, 2000, 1, nullptr, &stats);
  CHECK(out == rs);
  CHECK(stats.rules_after == stats.rules_before);
  CHECK(stats.conditions_after == stats.conditions_before);
}

TEST_CASE("verbatim duplicate rule collapses to one copy") {
  const auto xy = test::xy_schema();
  const RuleSet rs = parse(
      "1. 0.50*x < 0.25 [0..1] -> A\n"
      "2. 0.50*x < 0.25 [0..1] -> A\n"
      "DEFAULT -> B\n",
      xy);
  SimplifyStats stats;
  const RuleSet out = simplify(rs, xy, 4000, 2, nullptr, &stats);
  CHECK(out.rules.size() == 1);
  CHECK(stats.removed_duplicates + stats.removed_unreachable == 1);
  CHECK(equivalent(rs, out, xy, 4000, 99));
}

TEST_CASE("same-feature bounds keep only the binding constraint") {
  const auto xy = test::xy_schema();
  // x <= 0.5 and x <= 0.7 with the same scaling: keep the tighter
  const RuleSet rs = parse(
      "1. 1.00*x <= 0.5 [0..1] & 1.00*x <= 0.7 [0..1] -> A\n"
      "DEFAULT -> B\n",
      xy);
  SimplifyStats stats;
  const RuleSet out = simplify(rs, xy, 4000, 3, nullptr, &stats);
  REQUIRE(out.rules.size() == 1);
  REQUIRE(out.rules[0].conditions.size() == 1);
  CHECK(std::get<Constant>(out.rules[0].conditions[0].trailing).value == doctest::Approx(0.5));
  CHECK(stats.removed_subsumed_conditions == 1);
  CHECK(equivalent(rs, out, xy, 4000, 98));
}

TEST_CASE("figure-4 style paired player.y constraints shrink") {
  const auto flappy = FeatureSchema::load(test::data_path("schemas/flappy.json"));
  const RuleSet fig4 = parse_file(test::data_path("figures/fig4.rules"), flappy);
  SimplifyStats stats;
  const RuleSet out = simplify(fig4, flappy, 6000, 4, nullptr, &stats);
  CHECK(out.condition_count() < fig4.condition_count());
  CHECK(out.rules.size() <= fig4.rules.size());
  CHECK(equivalent(fig4, out, flappy, 6000, 97));
  // the known figure-4 redundancies: the tautological 0.17*top.y <= 84.48 goes
  // by pruning, the looser player.y bound by subsumption
  CHECK(stats.removed_taut_conditions >= 2);
  CHECK(stats.removed_subsumed_conditions >= 1);
}

TEST_CASE("shadowed later rule is unreachable and dropped") {
  const auto xy = test::xy_schema();
  const RuleSet rs = parse(
      "1. 1.00*x <= 0.8 [0..1] -> A\n"
      "2. 1.00*x <= 0.5 [0..1] & 1.00*y < 0.9 [0..1] -> A\n"
      "DEFAULT -> B\n",
      xy);
  SimplifyStats stats;
  const RuleSet out = simplify(rs, xy, 6000, 5, nullptr, &stats);
  CHECK(out.rules.size() == 1);
  CHECK(stats.removed_unreachable == 1);
  CHECK(equivalent(rs, out, xy, 6000, 96));
}

TEST_CASE("shadowed rule with a different action stays (hard-max could differ)") {
  const auto xy = test::xy_schema();
  RuleSet rs = parse(
      "1. 1.00*x <= 0.8 [0..1] -> 0.30*A\n"
      "2. 1.00*x <= 0.5 [0..1] -> 0.90*B\n"
      "DEFAULT -> 0.10*A\n",
      xy);
  const RuleSet out = simplify(rs, xy, 6000, 6);
  CHECK(out.rules.size() == 2);  // deletion would change hard-max; rolled back
}

TEST_CASE("inactive-rule removal only with an explicit corpus") {
  const auto xy = test::xy_schema();
  const RuleSet rs = parse(
      "1. 1.00*x < 0.5 [0..1] -> A\n"
      "2. 1.00*y < 0.5 [0..1] -> A\n"
      "DEFAULT -> B\n",
      xy);
  // corpus where rule 2 never matches (y always high) but rule 1 does
  std::vector<std::vector<double>> corpus;
  for (int i = 0; i < 50; ++i) corpus.push_back({i / 50.0, 0.95});

  const RuleSet untouched = simplify(rs, xy, 3000, 7);
  CHECK(untouched.rules.size() == 2);

  SimplifyStats stats;
  const RuleSet trimmed = simplify(rs, xy, 3000, 7, &corpus, &stats);
  CHECK(trimmed.rules.size() == 1);
  CHECK(stats.removed_inactive == 1);
  CHECK(trimmed.rules[0].conditions[0].leading.feature == "x");
}

TEST_CASE("idempotence and monotone counts on dirty random sets") {
  const auto xy = test::xy_schema();
  RandomSource rng(314);
  GenomeParams params;
  params.initial_rules = 6;
  for (int i = 0; i < 120; ++i) {
    const RuleSet rs = test::dirty_ruleset(xy, params, rng);
    const std::uint64_t seed = 1000 + i;
    const RuleSet once = simplify(rs, xy, 800, seed);
    CHECK(once.rules.size() <= rs.rules.size());
    CHECK(once.condition_count() <= rs.condition_count());
    CHECK(equivalent(rs, once, xy, 800, seed * 31));
    const RuleSet twice = simplify(once, xy, 800, seed);
    CHECK(twice == once);
  }
}

TEST_CASE("render_plain: figure-3 template and default-only") {
  const auto schema = FeatureSchema::load(test::data_path("schemas/cartpole.json"));
  const RuleSet rs = parse_file(test::data_path("figures/fig3.rules"), schema);
  Vocabulary vocab = Vocabulary::from_json_text(R"({
    "features": {
      "velocity.of.cart": {"phrase": "cart velocity"},
      "angle.of.pole": {"phrase": "pole angle"}
    },
    "actions": {"LEFT": "push LEFT", "RIGHT": "push RIGHT"}
  })");
  const std::string text = render_plain(rs, schema, vocab);
  CHECK(text ==
        "If 0.11*(cart velocity)^3 < 0.87*(pole angle) then push LEFT.\n"
        "If none of the above, push RIGHT.\n");

  RuleSet only_default;
  only_default.default_action = {"RIGHT", 1.0};
  CHECK(render_plain(only_default, schema, {}) == "If none of the above, RIGHT.\n");
}

TEST_CASE("render_plain: binary conditions fold to phrases") {
  FeatureSchema s({{"race.Asian", 0.0, 1.0, FeatureKind::Binary},
                   {"admission.Emergency.Room", 0.0, 1.0, FeatureKind::Binary}},
                  {"15", "8"}, 0);
  const RuleSet rs = parse(
      "1. 0.38*race.Asian <= 0.18 [0..1] & 0.76*admission.Emergency.Room > 0.03 [0..1] -> 15\n"
      "DEFAULT -> 8\n",
      s);
  Vocabulary vocab = Vocabulary::from_json_text(R"({
    "race.Asian": {"phrase": "is Asian", "negated_phrase": "is not Asian"},
    "admission.Emergency.Room": {"phrase": "was admitted in emergency"},
    "actions": {"15": "prescribe Insulin", "8": "prescribe Glipizide"}
  })");
  const std::string text = render_plain(rs, s, vocab);
  CHECK(text.find("is not Asian") != std::string::npos);
  CHECK(text.find("was admitted in emergency") != std::string::npos);
  CHECK(text.find("prescribe Insulin") != std::string::npos);

  // without a vocabulary the fold still happens, on raw names
  const std::string raw = render_plain(rs, s, {});
  CHECK(raw.find("not race.Asian") != std::string::npos);
  CHECK(raw.find("admission.Emergency.Room") != std::string::npos);
}

}  // TEST_SUITE
