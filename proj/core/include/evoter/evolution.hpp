#pragma once

#include <functional>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "evoter/generate.hpp"
#include "evoter/pareto.hpp"
#include "evoter/rng.hpp"
#include "evoter/rules.hpp"
#include "evoter/schema.hpp"

namespace evoter {

struct EvoParams {
  int population_size = 100;
  int generations = 100;
  int tournament_size = 2;
  int elitism_count = 1;
  double mutation_rate = 0.9;
  double crossover_probability = 0.9;
  int selection_objective = 0;
  int workers = 1;
  std::uint64_t seed = 0;
  GenomeParams genome;

  void validate(const FeatureSchema& schema) const;
};

// ---- selection ----

/// Best of k uniformly sampled candidates (with replacement), compared on the
/// configured objective; earliest draw wins ties.
const Candidate& tournament_select(const std::vector<Candidate>& population, int k,
                                   RandomSource& rng, int objective = 0);

// ---- crossover ----

/// Deterministic core of splice crossover: a.rules[0..i) ++ b.rules[j..),
/// default action from a. An empty a copies all of b's rules instead.
RuleSet splice_at(const RuleSet& a, const RuleSet& b, std::size_t i, std::size_t j,
                  int max_rules);

/// Splice with random indices i in [0, |a|), j in [0, |b|].
RuleSet crossover_splice(const RuleSet& a, const RuleSet& b, int max_rules, RandomSource& rng);

/// Logical product: each emitted rule concatenates one rule of a with one rule
/// of b (conditions capped), taking b's action; default from b. All |a|*|b|
/// pairs in (a-major) order, a uniform subset when that exceeds cap.
RuleSet crossover_product(const RuleSet& a, const RuleSet& b, int cap, int max_conditions,
                          RandomSource& rng);

// ---- mutation ----

enum class MutationKind {
  ConditionElement,
  AddCondition,
  RemoveCondition,
  ReplaceCondition,
  ChangeAction,
  RemoveRule,
  ChangeDefault,
  ReorderRules,
};

std::vector<MutationKind> applicable_mutations(const RuleSet& rs, const FeatureSchema& schema,
                                               const GenomeParams& params);

/// Applies exactly one mutation, drawn uniformly from the applicable kinds;
/// returns the genome unchanged when nothing applies. Results stay
/// grammar-valid; removing the last condition removes the whole rule.
RuleSet mutate(const RuleSet& rs, const FeatureSchema& schema, const GenomeParams& params,
               RandomSource& rng);

// ---- pruning ----

struct PruneReport {
  std::vector<Condition> removed_tautologies;
  std::vector<Condition> removed_falsehoods;
  int rules_removed = 0;
};

/// Drops tautological conditions and falsehood rules, judged by interval
/// arithmetic over declared feature ranges. A rule whose every condition is a
/// tautology keeps one so the conjunction stays nonempty (and still always
/// fires). Never changes evaluation on frames within the declared ranges.
RuleSet prune(const RuleSet& rs, const FeatureSchema& schema, PruneReport* report = nullptr);

// ---- reproduction ----

enum class CrossoverStyle { None, Splice, Product };

struct ReproduceResult {
  RuleSet offspring;
  CrossoverStyle style = CrossoverStyle::None;
  bool mutated = false;
};

/// One offspring from two tournament-selected parents: maybe crossover (style
/// picked uniformly), maybe mutation, then prune. Rules that never fired in a
/// parent's last evaluation are excluded from crossover donation.
ReproduceResult reproduce(const Candidate& a, const Candidate& b, const FeatureSchema& schema,
                          const EvoParams& params, RandomSource& rng);

// ---- generational loop ----

struct Evaluation {
  std::vector<double> objectives;
  EvalCounters counters;
};

/// Must be pure and thread-safe: same genome, same result, for the life of a
/// run. Seeding is the caller's business (bake the run seed into the closure).
using Evaluator = std::function<Evaluation(const RuleSet&)>;

struct GenRecord {
  int gen = 0;
  std::vector<double> best;
  std::vector<double> mean;
  std::vector<double> worst;
  int size_best = 0;        // rules in the generation's best genome
  double mean_rules = 0.0;
  double mean_conditions = 0.0;
  std::size_t archive_size = 0;
};

struct RunResult {
  std::vector<GenRecord> records;
  std::vector<Candidate> population;
  ParetoArchive archive;
  Candidate champion;  // best-ever on the selection objective
  std::uint64_t evaluations = 0;
  bool stopped_early = false;
};

/// Invoked after each generation's bookkeeping with the population sorted by
/// the selection objective (best first); return false to stop the run.
using GenerationCallback =
    std::function<bool(const GenRecord&, std::span<const Candidate>)>;

/// Runs the full loop: random init, evaluate, then per generation elitism plus
/// offspring from reproduce(). Every evaluated candidate is offered to the
/// archive. Throws EvaluatorFailure if the evaluator throws; per-generation
/// output already handed to the callback stands as partial results.
RunResult evolve(const Evaluator& evaluator, const EvoParams& params,
                 const FeatureSchema& schema, const GenerationCallback& on_generation = {});

}  // namespace evoter
