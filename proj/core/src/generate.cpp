#include "evoter/generate.hpp"

#include <algorithm>

#include "evoter/errors.hpp"
#include "evoter/interval.hpp"

namespace evoter {

void GenomeParams::validate(const FeatureSchema& schema) const {
  if (max_rules < 0) throw InvalidParams("max_rules must be >= 0");
  if (max_conditions < 1) throw InvalidParams("max_conditions must be >= 1");
  if (initial_rules < 0) throw InvalidParams("initial_rules must be >= 0");
  if (initial_conditions < 1) throw InvalidParams("initial_conditions must be >= 1");
  if (max_lag < 0 || max_lag > schema.max_lag())
    throw InvalidParams("max_lag outside 0..schema max_lag");
  if (schema.features().empty()) throw InvalidParams("schema declares no features");
  if (schema.actions().empty()) throw InvalidParams("schema declares no actions");
}

double random_coefficient(RandomSource& rng) {
  // canonical two-decimal grid, (0, 1]
  return static_cast<double>(rng.between(1, 100)) / 100.0;
}

Term random_term(const FeatureSchema& schema, const GenomeParams& params, RandomSource& rng) {
  Term t;
  t.coefficient = random_coefficient(rng);
  t.feature_index = rng.below(schema.width());
  t.feature = schema.feature(t.feature_index).name;
  t.power = static_cast<int>(rng.between(1, 3));
  t.lag = params.max_lag > 0 ? static_cast<int>(rng.between(0, params.max_lag)) : 0;
  return t;
}

namespace {

CompareOp random_op(RandomSource& rng) {
  switch (rng.below(4)) {
    case 0: return CompareOp::Less;
    case 1: return CompareOp::LessEq;
    case 2: return CompareOp::Greater;
    default: return CompareOp::GreaterEq;
  }
}

Condition constant_condition(const FeatureSchema& schema, const GenomeParams& params,
                             RandomSource& rng) {
  Condition cond;
  cond.leading = random_term(schema, params, rng);
  cond.op = random_op(rng);
  const Interval reach = term_interval(cond.leading, schema);
  // strictly inside the reachable interval: satisfiable and falsifiable for
  // every operator
  const double u = 0.02 + 0.96 * rng.uniform();
  Constant c;
  c.value = reach.lo + u * (reach.hi - reach.lo);
  const auto& spec = schema.feature(cond.leading.feature_index);
  c.range_min = spec.min;
  c.range_max = spec.max;
  cond.trailing = c;
  return cond;
}

}  // namespace

Condition random_condition(const FeatureSchema& schema, const GenomeParams& params,
                           RandomSource& rng) {
  // try term-vs-term first when the coin says so; fall back to a constant
  // comparison, which is contingent by construction
  if (rng.chance(0.5)) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      Condition cond;
      cond.leading = random_term(schema, params, rng);
      cond.op = random_op(rng);
      cond.trailing = random_term(schema, params, rng);
      if (condition_status(cond, schema) == ConditionStatus::Contingent) return cond;
    }
  }
  for (int attempt = 0; attempt < 16; ++attempt) {
    Condition cond = constant_condition(schema, params, rng);
    if (condition_status(cond, schema) == ConditionStatus::Contingent) return cond;
  }
  throw InvalidParams("could not generate a contingent condition; degenerate schema ranges?");
}

Action random_action(const FeatureSchema& schema, const GenomeParams& params,
                     RandomSource& rng) {
  Action a;
  a.name = rng.pick(schema.actions());
  a.certainty = params.with_certainty ? random_coefficient(rng) : 1.0;
  return a;
}

RuleSet random_ruleset(const FeatureSchema& schema, const GenomeParams& params,
                       RandomSource& rng) {
  params.validate(schema);
  RuleSet rs;
  const int budget = std::min(params.initial_rules, params.max_rules);
  const int n_rules = budget > 0 ? static_cast<int>(rng.between(1, budget)) : 0;
  for (int i = 0; i < n_rules; ++i) {
    Rule rule;
    const int n_conds = static_cast<int>(
        rng.between(1, std::min(params.initial_conditions, params.max_conditions)));
    for (int c = 0; c < n_conds; ++c)
      rule.conditions.push_back(random_condition(schema, params, rng));
    rule.action = random_action(schema, params, rng);
    rs.rules.push_back(std::move(rule));
  }
  rs.default_action = random_action(schema, params, rng);
  return rs;
}

}  // namespace evoter
