#pragma once

#include "evoter/rng.hpp"
#include "evoter/rules.hpp"
#include "evoter/schema.hpp"

namespace evoter {

/// Shape limits shared by random genome generation and mutation.
struct GenomeParams {
  int max_rules = 50;
  int max_conditions = 10;
  int initial_rules = 4;       // upper bound on rules in a fresh random genome
  int initial_conditions = 3;  // upper bound on conditions per fresh rule
  int max_lag = 0;             // must not exceed the schema's max_lag
  bool with_certainty = false;

  void validate(const FeatureSchema& schema) const;
};

/// Grammar-valid random rule set. Every generated condition is contingent
/// under interval arithmetic over the declared feature ranges, so the pruner
/// has nothing to remove from a fresh genome.
RuleSet random_ruleset(const FeatureSchema& schema, const GenomeParams& params,
                       RandomSource& rng);

Term random_term(const FeatureSchema& schema, const GenomeParams& params, RandomSource& rng);
Condition random_condition(const FeatureSchema& schema, const GenomeParams& params,
                           RandomSource& rng);
Action random_action(const FeatureSchema& schema, const GenomeParams& params, RandomSource& rng);

double random_coefficient(RandomSource& rng);

}  // namespace evoter
