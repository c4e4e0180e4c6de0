#include "evoter/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>

#include "evoter/errors.hpp"
#include "evoter/interval.hpp"

namespace evoter {

void EvoParams::validate(const FeatureSchema& schema) const {
  if (population_size < 2) throw InvalidParams("population_size must be >= 2");
  if (generations < 0) throw InvalidParams("generations must be >= 0");
  if (tournament_size < 1) throw InvalidParams("tournament_size must be >= 1");
  if (elitism_count < 0 || elitism_count >= population_size)
    throw InvalidParams("elitism_count must be in [0, population_size)");
  if (mutation_rate < 0.0 || mutation_rate > 1.0)
    throw InvalidParams("mutation_rate must be in [0, 1]");
  if (crossover_probability < 0.0 || crossover_probability > 1.0)
    throw InvalidParams("crossover_probability must be in [0, 1]");
  if (selection_objective < 0) throw InvalidParams("selection_objective must be >= 0");
  if (workers < 1) throw InvalidParams("workers must be >= 1");
  genome.validate(schema);
}

const Candidate& tournament_select(const std::vector<Candidate>& population, int k,
                                   RandomSource& rng, int objective) {
  if (population.empty()) throw EmptyPopulation();
  const Candidate* best = nullptr;
  for (int i = 0; i < k; ++i) {
    const Candidate& pick = population[rng.below(population.size())];
    if (!best || pick.objectives.at(objective) > best->objectives.at(objective)) best = &pick;
  }
  return *best;
}

RuleSet splice_at(const RuleSet& a, const RuleSet& b, std::size_t i, std::size_t j,
                  int max_rules) {
  RuleSet out;
  out.default_action = a.default_action;
  if (a.rules.empty()) {
    out.rules = b.rules;
  } else {
    out.rules.assign(a.rules.begin(), a.rules.begin() + std::min(i, a.rules.size()));
    for (std::size_t r = j; r < b.rules.size(); ++r) out.rules.push_back(b.rules[r]);
  }
  if (out.rules.size() > static_cast<std::size_t>(max_rules)) out.rules.resize(max_rules);
  return out;
}

RuleSet crossover_splice(const RuleSet& a, const RuleSet& b, int max_rules, RandomSource& rng) {
  if (a.rules.empty()) return splice_at(a, b, 0, 0, max_rules);
  const std::size_t i = rng.below(a.rules.size());
  const std::size_t j = rng.below(b.rules.size() + 1);
  return splice_at(a, b, i, j, max_rules);
}

RuleSet crossover_product(const RuleSet& a, const RuleSet& b, int cap, int max_conditions,
                          RandomSource& rng) {
  if (a.rules.empty() || b.rules.empty()) throw EmptyParent();
  const std::size_t total = a.rules.size() * b.rules.size();
  std::vector<std::size_t> pair_ids(total);
  std::iota(pair_ids.begin(), pair_ids.end(), 0);
  if (total > static_cast<std::size_t>(cap)) {
    // reservoir-free uniform subset, order preserved
    std::vector<std::size_t> subset;
    std::size_t need = static_cast<std::size_t>(cap);
    for (std::size_t idx = 0; idx < total && need > 0; ++idx) {
      if (rng.below(total - idx) < need) {
        subset.push_back(idx);
        --need;
      }
    }
    pair_ids = std::move(subset);
  }
  RuleSet out;
  out.default_action = b.default_action;
  for (auto id : pair_ids) {
    const Rule& ra = a.rules[id / b.rules.size()];
    const Rule& rb = b.rules[id % b.rules.size()];
    Rule merged;
    merged.conditions = ra.conditions;
    merged.conditions.insert(merged.conditions.end(), rb.conditions.begin(),
                             rb.conditions.end());
    if (merged.conditions.size() > static_cast<std::size_t>(max_conditions))
      merged.conditions.resize(max_conditions);
    merged.action = rb.action;
    out.rules.push_back(std::move(merged));
  }
  return out;
}

std::vector<MutationKind> applicable_mutations(const RuleSet& rs, const FeatureSchema& schema,
                                               const GenomeParams& params) {
  std::vector<MutationKind> kinds;
  const bool has_rules = !rs.rules.empty();
  const bool action_changeable = schema.actions().size() >= 2 || params.with_certainty;
  if (has_rules) {
    kinds.push_back(MutationKind::ConditionElement);
    for (const auto& r : rs.rules) {
      if (r.conditions.size() < static_cast<std::size_t>(params.max_conditions)) {
        kinds.push_back(MutationKind::AddCondition);
        break;
      }
    }
    kinds.push_back(MutationKind::RemoveCondition);
    kinds.push_back(MutationKind::ReplaceCondition);
    if (action_changeable) kinds.push_back(MutationKind::ChangeAction);
    kinds.push_back(MutationKind::RemoveRule);
  }
  if (action_changeable) kinds.push_back(MutationKind::ChangeDefault);
  if (rs.rules.size() >= 2) kinds.push_back(MutationKind::ReorderRules);
  return kinds;
}

namespace {

Action different_action(const Action& current, const FeatureSchema& schema,
                        const GenomeParams& params, RandomSource& rng) {
  Action a;
  if (schema.actions().size() >= 2) {
    do {
      a.name = rng.pick(schema.actions());
    } while (a.name == current.name);
  } else {
    a.name = current.name;
  }
  a.certainty = params.with_certainty ? random_coefficient(rng) : 1.0;
  return a;
}

// one element of one condition: coefficient, feature, power, lag, operator or
// the whole trailing side
void mutate_condition_element(Condition& cond, const FeatureSchema& schema,
                              const GenomeParams& params, RandomSource& rng) {
  enum Element { Coefficient, Feature, Power, Lag, Operator, Trailing };
  std::vector<Element> options{Coefficient, Power, Operator, Trailing};
  if (schema.width() >= 2) options.push_back(Feature);
  if (params.max_lag > 0) options.push_back(Lag);

  Term* side = &cond.leading;
  const bool trailing_term = !cond.trailing_is_constant();
  switch (options[rng.below(options.size())]) {
    case Coefficient: {
      if (trailing_term && rng.chance(0.5)) side = &std::get<Term>(cond.trailing);
      if (rng.chance(0.5)) {
        side->coefficient = random_coefficient(rng);
      } else {
        // local step on the two-decimal grid
        const int steps = static_cast<int>(rng.between(1, 5)) * (rng.chance(0.5) ? 1 : -1);
        const double nudged = side->coefficient + steps / 100.0;
        side->coefficient = quantize_coefficient(std::clamp(nudged, 0.01, 1.0));
      }
      break;
    }
    case Feature: {
      if (trailing_term && rng.chance(0.5)) side = &std::get<Term>(cond.trailing);
      std::size_t idx;
      do {
        idx = rng.below(schema.width());
      } while (idx == side->feature_index);
      side->feature_index = idx;
      side->feature = schema.feature(idx).name;
      if (side == &cond.leading && cond.trailing_is_constant()) {
        // constants carry the leading feature's declared range
        auto& c = std::get<Constant>(cond.trailing);
        c.range_min = schema.feature(idx).min;
        c.range_max = schema.feature(idx).max;
      }
      break;
    }
    case Power: {
      if (trailing_term && rng.chance(0.5)) side = &std::get<Term>(cond.trailing);
      int p;
      do {
        p = static_cast<int>(rng.between(1, 3));
      } while (p == side->power);
      side->power = p;
      break;
    }
    case Lag: {
      if (trailing_term && rng.chance(0.5)) side = &std::get<Term>(cond.trailing);
      int lag;
      do {
        lag = static_cast<int>(rng.between(0, params.max_lag));
      } while (lag == side->lag);
      side->lag = lag;
      break;
    }
    case Operator: {
      CompareOp op;
      do {
        switch (rng.below(4)) {
          case 0: op = CompareOp::Less; break;
          case 1: op = CompareOp::LessEq; break;
          case 2: op = CompareOp::Greater; break;
          default: op = CompareOp::GreaterEq; break;
        }
      } while (op == cond.op);
      cond.op = op;
      break;
    }
    case Trailing: {
      const Interval reach = term_interval(cond.leading, schema);
      const auto& spec = schema.feature(cond.leading.feature_index);
      if (cond.trailing_is_constant() && rng.chance(0.5)) {
        // nudge the constant within the leading term's reachable span
        auto& c = std::get<Constant>(cond.trailing);
        const double step = (reach.hi - reach.lo) * rng.uniform(0.01, 0.05);
        c.value += rng.chance(0.5) ? step : -step;
        break;
      }
      if (rng.chance(0.5)) {
        Constant c;
        c.value = reach.lo + (0.02 + 0.96 * rng.uniform()) * (reach.hi - reach.lo);
        c.range_min = spec.min;
        c.range_max = spec.max;
        cond.trailing = c;
      } else {
        cond.trailing = random_term(schema, params, rng);
      }
      break;
    }
  }
}

}  // namespace

RuleSet mutate(const RuleSet& rs, const FeatureSchema& schema, const GenomeParams& params,
               RandomSource& rng) {
  auto kinds = applicable_mutations(rs, schema, params);
  if (kinds.empty()) return rs;
  RuleSet out = rs;
  switch (kinds[rng.below(kinds.size())]) {
    case MutationKind::ConditionElement: {
      Rule& rule = out.rules[rng.below(out.rules.size())];
      mutate_condition_element(rule.conditions[rng.below(rule.conditions.size())], schema,
                               params, rng);
      break;
    }
    case MutationKind::AddCondition: {
      std::vector<std::size_t> roomy;
      for (std::size_t i = 0; i < out.rules.size(); ++i)
        if (out.rules[i].conditions.size() < static_cast<std::size_t>(params.max_conditions))
          roomy.push_back(i);
      Rule& rule = out.rules[roomy[rng.below(roomy.size())]];
      rule.conditions.push_back(random_condition(schema, params, rng));
      break;
    }
    case MutationKind::RemoveCondition: {
      const std::size_t r = rng.below(out.rules.size());
      Rule& rule = out.rules[r];
      if (rule.conditions.size() == 1) {
        // a rule's condition list must stay nonempty
        out.rules.erase(out.rules.begin() + static_cast<std::ptrdiff_t>(r));
      } else {
        rule.conditions.erase(rule.conditions.begin() +
                              static_cast<std::ptrdiff_t>(rng.below(rule.conditions.size())));
      }
      break;
    }
    case MutationKind::ReplaceCondition: {
      Rule& rule = out.rules[rng.below(out.rules.size())];
      rule.conditions[rng.below(rule.conditions.size())] =
          random_condition(schema, params, rng);
      break;
    }
    case MutationKind::ChangeAction: {
      Rule& rule = out.rules[rng.below(out.rules.size())];
      rule.action = different_action(rule.action, schema, params, rng);
      break;
    }
    case MutationKind::RemoveRule:
      out.rules.erase(out.rules.begin() + static_cast<std::ptrdiff_t>(rng.below(out.rules.size())));
      break;
    case MutationKind::ChangeDefault:
      out.default_action = different_action(out.default_action, schema, params, rng);
      break;
    case MutationKind::ReorderRules: {
      const std::size_t from = rng.below(out.rules.size());
      std::size_t to;
      do {
        to = rng.below(out.rules.size());
      } while (to == from);
      Rule moved = std::move(out.rules[from]);
      out.rules.erase(out.rules.begin() + static_cast<std::ptrdiff_t>(from));
      out.rules.insert(out.rules.begin() + static_cast<std::ptrdiff_t>(to), std::move(moved));
      break;
    }
  }
  return out;
}

RuleSet prune(const RuleSet& rs, const FeatureSchema& schema, PruneReport* report) {
  RuleSet out;
  out.default_action = rs.default_action;
  for (const auto& rule : rs.rules) {
    Rule kept;
    kept.action = rule.action;
    bool falsehood = false;
    const Condition* last_tautology = nullptr;
    for (const auto& cond : rule.conditions) {
      switch (condition_status(cond, schema)) {
        case ConditionStatus::Falsehood:
          falsehood = true;
          if (report) report->removed_falsehoods.push_back(cond);
          break;
        case ConditionStatus::Tautology:
          last_tautology = &cond;
          if (report) report->removed_tautologies.push_back(cond);
          break;
        case ConditionStatus::Contingent:
          kept.conditions.push_back(cond);
          break;
      }
      if (falsehood) break;
    }
    if (falsehood) {
      if (report) ++report->rules_removed;
      continue;
    }
    if (kept.conditions.empty()) {
      // all conditions were tautologies: keep one so the rule still always
      // fires and the grammar stays valid
      kept.conditions.push_back(*last_tautology);
      if (report) report->removed_tautologies.pop_back();
    }
    out.rules.push_back(std::move(kept));
  }
  return out;
}

namespace {

RuleSet active_rules(const Candidate& parent) {
  RuleSet out;
  out.default_action = parent.genome.default_action;
  for (std::size_t i = 0; i < parent.genome.rules.size(); ++i) {
    const bool counted = i < parent.counters.rule_hits.size();
    if (!counted || parent.counters.rule_hits[i] > 0) out.rules.push_back(parent.genome.rules[i]);
  }
  return out;
}

}  // namespace

ReproduceResult reproduce(const Candidate& a, const Candidate& b, const FeatureSchema& schema,
                          const EvoParams& params, RandomSource& rng) {
  ReproduceResult result;
  if (rng.chance(params.crossover_probability)) {
    const RuleSet da = active_rules(a);
    const RuleSet db = active_rules(b);
    bool product = rng.chance(0.5);
    if (product && !da.rules.empty() && !db.rules.empty()) {
      result.style = CrossoverStyle::Product;
      result.offspring = crossover_product(da, db, params.genome.max_rules,
                                           params.genome.max_conditions, rng);
    } else {
      result.style = CrossoverStyle::Splice;
      result.offspring = crossover_splice(da, db, params.genome.max_rules, rng);
    }
  } else {
    result.offspring = a.genome;
  }
  if (rng.chance(params.mutation_rate)) {
    result.offspring = mutate(result.offspring, schema, params.genome, rng);
    result.mutated = true;
  }
  result.offspring = prune(result.offspring, schema);
  return result;
}

namespace {

struct StatsAccumulator {
  GenRecord record;

  void compute(const std::vector<Candidate>& population, int gen, int objective,
               std::size_t archive_size) {
    record = GenRecord{};
    record.gen = gen;
    record.archive_size = archive_size;
    const std::size_t width = population.front().objectives.size();
    record.best.assign(width, 0.0);
    record.worst.assign(width, 0.0);
    record.mean.assign(width, 0.0);
    const Candidate* best = &population.front();
    for (const auto& c : population)
      if (c.objectives[objective] > best->objectives[objective]) best = &c;
    for (std::size_t k = 0; k < width; ++k) {
      double lo = population.front().objectives[k], hi = lo, sum = 0.0;
      for (const auto& c : population) {
        lo = std::min(lo, c.objectives[k]);
        hi = std::max(hi, c.objectives[k]);
        sum += c.objectives[k];
      }
      record.best[k] = hi;
      record.worst[k] = lo;
      record.mean[k] = sum / static_cast<double>(population.size());
    }
    record.size_best = static_cast<int>(best->genome.rules.size());
    double rules = 0.0, conds = 0.0;
    for (const auto& c : population) {
      rules += static_cast<double>(c.genome.rules.size());
      conds += static_cast<double>(c.genome.condition_count());
    }
    record.mean_rules = rules / static_cast<double>(population.size());
    record.mean_conditions = conds / static_cast<double>(population.size());
  }
};

void evaluate_population(std::vector<Candidate>& fresh, const Evaluator& evaluator,
                         int workers) {
  auto run = [&](std::size_t i) {
    Evaluation ev = evaluator(fresh[i].genome);
    fresh[i].objectives = std::move(ev.objectives);
    fresh[i].counters = std::move(ev.counters);
  };
  if (workers <= 1 || fresh.size() <= 1) {
    for (std::size_t i = 0; i < fresh.size(); ++i) run(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const int n = std::min<int>(workers, static_cast<int>(fresh.size()));
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= fresh.size()) return;
        try {
          run(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

RunResult evolve(const Evaluator& evaluator, const EvoParams& params,
                 const FeatureSchema& schema, const GenerationCallback& on_generation) {
  params.validate(schema);
  RandomSource rng(params.seed);
  std::uint64_t next_id = 1;

  RunResult result;
  std::vector<Candidate> population;
  population.reserve(params.population_size);
  for (int i = 0; i < params.population_size; ++i) {
    Candidate c;
    c.genome = random_ruleset(schema, params.genome, rng);
    c.id = next_id++;
    c.generation_born = 0;
    population.push_back(std::move(c));
  }

  auto by_selection = [&](const Candidate& x, const Candidate& y) {
    if (x.objectives[params.selection_objective] != y.objectives[params.selection_objective])
      return x.objectives[params.selection_objective] > y.objectives[params.selection_objective];
    return x.id < y.id;  // stable across reruns
  };

  auto evaluate_and_record = [&](std::vector<Candidate>& fresh) {
    try {
      evaluate_population(fresh, evaluator, params.workers);
    } catch (const Error& e) {
      throw EvaluatorFailure(e.what());
    } catch (const std::exception& e) {
      throw EvaluatorFailure(e.what());
    }
    result.evaluations += fresh.size();
    for (const auto& c : fresh) result.archive.offer(c);
  };

  evaluate_and_record(population);

  StatsAccumulator stats;
  const Candidate* champion = nullptr;
  for (int gen = 0; gen <= params.generations; ++gen) {
    std::sort(population.begin(), population.end(),
              [&](const Candidate& x, const Candidate& y) { return by_selection(x, y); });
    champion = &population.front();
    if (!result.champion.id ||
        champion->objectives[params.selection_objective] >
            result.champion.objectives[params.selection_objective])
      result.champion = *champion;

    stats.compute(population, gen, params.selection_objective, result.archive.size());
    result.records.push_back(stats.record);
    if (on_generation &&
        !on_generation(stats.record, std::span<const Candidate>(population))) {
      result.stopped_early = true;
      break;
    }
    if (gen == params.generations) break;

    std::vector<Candidate> next_gen;
    next_gen.reserve(params.population_size);
    for (int e = 0; e < params.elitism_count; ++e) next_gen.push_back(population[e]);

    std::vector<Candidate> fresh;
    fresh.reserve(params.population_size - params.elitism_count);
    while (static_cast<int>(next_gen.size() + fresh.size()) < params.population_size) {
      const Candidate& pa =
          tournament_select(population, params.tournament_size, rng, params.selection_objective);
      const Candidate& pb =
          tournament_select(population, params.tournament_size, rng, params.selection_objective);
      ReproduceResult rep = reproduce(pa, pb, schema, params, rng);
      Candidate child;
      child.genome = std::move(rep.offspring);
      child.id = next_id++;
      child.parent_ids = {pa.id, pb.id};
      child.generation_born = gen + 1;
      fresh.push_back(std::move(child));
    }
    evaluate_and_record(fresh);
    for (auto& c : fresh) next_gen.push_back(std::move(c));
    population = std::move(next_gen);
  }

  std::sort(population.begin(), population.end(),
            [&](const Candidate& x, const Candidate& y) { return by_selection(x, y); });
  result.population = std::move(population);
  return result;
}

}  // namespace evoter
