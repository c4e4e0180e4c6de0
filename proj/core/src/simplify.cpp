#include "evoter/simplify.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "evoter/errors.hpp"
#include "evoter/evolution.hpp"
#include "evoter/interval.hpp"
#include "evoter/rng.hpp"

namespace evoter {

namespace {

/// Frames drawn uniformly from the declared ranges, with enough history for
/// every legal lag.
std::vector<std::vector<std::vector<double>>> sample_frames(const FeatureSchema& schema,
                                                            std::size_t n, RandomSource& rng) {
  std::vector<std::vector<std::vector<double>>> frames;
  frames.reserve(n);
  const std::size_t depth = static_cast<std::size_t>(schema.max_lag()) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<double>> history(depth);
    for (auto& h : history) {
      h.reserve(schema.width());
      for (const auto& f : schema.features()) {
        if (f.kind == FeatureKind::Binary)
          h.push_back(rng.chance(0.5) ? 1.0 : 0.0);
        else
          h.push_back(rng.uniform(f.min, f.max));
      }
    }
    frames.push_back(std::move(history));
  }
  return frames;
}

using Behavior = std::vector<ActionOutcome>;  // 3 modes per frame, flattened

Behavior behavior_of(const RuleSet& rs,
                     const std::vector<std::vector<std::vector<double>>>& frames) {
  Behavior out;
  out.reserve(frames.size() * 3);
  for (const auto& history : frames) {
    const InputFrame input{history};
    out.push_back(eval_ruleset(rs, input, EvalMode::FirstMatch));
    out.push_back(eval_ruleset(rs, input, EvalMode::HardMax));
    out.push_back(eval_ruleset(rs, input, EvalMode::AllMatched));
  }
  return out;
}

bool same_behavior(const RuleSet& candidate, const Behavior& baseline,
                   const std::vector<std::vector<std::vector<double>>>& frames) {
  std::size_t k = 0;
  for (const auto& history : frames) {
    const InputFrame input{history};
    if (!(eval_ruleset(candidate, input, EvalMode::FirstMatch) == baseline[k++])) return false;
    if (!(eval_ruleset(candidate, input, EvalMode::HardMax) == baseline[k++])) return false;
    if (!(eval_ruleset(candidate, input, EvalMode::AllMatched) == baseline[k++])) return false;
  }
  return true;
}

/// Every condition of `shadower` holds whenever `shadowed`'s conjunction does.
bool rule_shadows(const Rule& shadower, const Rule& shadowed, const FeatureSchema& schema) {
  for (const auto& needed : shadower.conditions) {
    bool implied = false;
    for (const auto& have : shadowed.conditions) {
      if (condition_implies(have, needed, schema)) {
        implied = true;
        break;
      }
    }
    if (!implied && condition_status(needed, schema) != ConditionStatus::Tautology) return false;
  }
  return true;
}

}  // namespace

RuleSet simplify(const RuleSet& rs, const FeatureSchema& schema, std::size_t sample_budget,
                 std::uint64_t seed, const std::vector<std::vector<double>>* activity_corpus,
                 SimplifyStats* stats) {
  SimplifyStats local;
  local.rules_before = static_cast<int>(rs.rules.size());
  local.conditions_before = static_cast<int>(rs.condition_count());

  RuleSet current = rs;

  // requested inactive-rule trim happens before any equivalence baseline
  if (activity_corpus && !current.rules.empty()) {
    EvalCounters counters;
    counters.reset(current.rules.size());
    std::vector<std::vector<double>> history(1);
    for (const auto& row : *activity_corpus) {
      history[0] = row;
      const InputFrame input{history};
      eval_ruleset(current, input, EvalMode::AllMatched, &counters);
    }
    RuleSet trimmed;
    trimmed.default_action = current.default_action;
    for (std::size_t i = 0; i < current.rules.size(); ++i) {
      if (counters.rule_hits[i] > 0)
        trimmed.rules.push_back(current.rules[i]);
      else
        ++local.removed_inactive;
    }
    current = std::move(trimmed);
  }

  RandomSource rng(seed);
  const auto frames = sample_frames(schema, sample_budget, rng);

  {
    PruneReport report;
    RuleSet pruned = prune(current, schema, &report);
    local.removed_taut_conditions += static_cast<int>(report.removed_tautologies.size());
    local.removed_false_rules += report.rules_removed;
    current = std::move(pruned);
  }

  Behavior baseline = behavior_of(current, frames);
  auto try_replace = [&](RuleSet&& candidate) {
    if (same_behavior(candidate, baseline, frames)) {
      current = std::move(candidate);
      return true;
    }
    ++local.rolled_back;
    return false;
  };

  bool changed = true;
  int sweeps = 0;
  while (changed && ++sweeps <= 100) {
    changed = false;

    // duplicate rules: drop the later verbatim copy
    for (std::size_t i = 0; i < current.rules.size(); ++i) {
      for (std::size_t j = current.rules.size(); j-- > i + 1;) {
        if (current.rules[i] == current.rules[j]) {
          RuleSet candidate = current;
          candidate.rules.erase(candidate.rules.begin() + static_cast<std::ptrdiff_t>(j));
          if (try_replace(std::move(candidate))) {
            ++local.removed_duplicates;
            changed = true;
          }
        }
      }
    }

    // within-rule subsumption: keep the binding constraint
    for (std::size_t r = 0; r < current.rules.size(); ++r) {
      for (std::size_t loose = current.rules[r].conditions.size(); loose-- > 0;) {
        const auto& conditions = current.rules[r].conditions;
        if (conditions.size() <= 1) break;
        bool implied = false;
        for (std::size_t tight = 0; tight < conditions.size(); ++tight) {
          if (tight != loose &&
              condition_implies(conditions[tight], conditions[loose], schema)) {
            implied = true;
            break;
          }
        }
        if (!implied) continue;
        RuleSet candidate = current;
        candidate.rules[r].conditions.erase(candidate.rules[r].conditions.begin() +
                                            static_cast<std::ptrdiff_t>(loose));
        if (try_replace(std::move(candidate))) {
          ++local.removed_subsumed_conditions;
          changed = true;
        }
      }
    }

    // rules unreachable in first-match order: an earlier rule fires whenever
    // they would
    for (std::size_t j = current.rules.size(); j-- > 1;) {
      bool shadowed = false;
      for (std::size_t i = 0; i < j && !shadowed; ++i)
        shadowed = rule_shadows(current.rules[i], current.rules[j], schema);
      if (!shadowed) continue;
      RuleSet candidate = current;
      candidate.rules.erase(candidate.rules.begin() + static_cast<std::ptrdiff_t>(j));
      if (try_replace(std::move(candidate))) {
        ++local.removed_unreachable;
        changed = true;
      }
    }
  }

  local.rules_after = static_cast<int>(current.rules.size());
  local.conditions_after = static_cast<int>(current.condition_count());
  if (stats) *stats = local;
  return current;
}

Vocabulary Vocabulary::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Vocabulary v;
  const nlohmann::json* feats = &j;
  if (j.contains("features")) feats = &j["features"];
  for (auto it = feats->begin(); it != feats->end(); ++it) {
    if (it.key() == "actions" || !it.value().is_object()) continue;
    Entry e;
    e.phrase = it.value().value("phrase", it.key());
    e.negated = it.value().value("negated_phrase", "not " + e.phrase);
    v.features[it.key()] = std::move(e);
  }
  if (j.contains("actions"))
    for (auto it = j["actions"].begin(); it != j["actions"].end(); ++it)
      v.actions[it.key()] = it.value().get<std::string>();
  return v;
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

namespace {

std::string plain_term(const Term& term, const Vocabulary& vocab) {
  std::string name = term.feature;
  if (auto it = vocab.features.find(term.feature); it != vocab.features.end())
    name = "(" + it->second.phrase + ")";
  std::string out;
  if (term.coefficient != 1.0) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f*", term.coefficient);
    out += buf;
  }
  out += name;
  if (term.power != 1) out += "^" + std::to_string(term.power);
  if (term.lag != 0) out += " " + std::to_string(term.lag) + " back";
  return out;
}

/// For a binary feature compared against a constant: which value(s) satisfy?
std::optional<bool> binary_truth(const Condition& cond, const FeatureSchema& schema) {
  if (!cond.trailing_is_constant()) return std::nullopt;
  if (schema.feature(cond.leading.feature_index).kind != FeatureKind::Binary)
    return std::nullopt;
  const double v = std::get<Constant>(cond.trailing).value;
  auto holds = [&](double x) {
    const double lhs = cond.leading.coefficient * x;  // 0^p = 0, 1^p = 1
    switch (cond.op) {
      case CompareOp::Less: return lhs < v;
      case CompareOp::LessEq: return lhs <= v;
      case CompareOp::Greater: return lhs > v;
      case CompareOp::GreaterEq: return lhs >= v;
    }
    return false;
  };
  const bool at0 = holds(0.0), at1 = holds(1.0);
  if (at0 == at1) return std::nullopt;  // tautology or falsehood; nothing to fold
  return at1;
}

std::string plain_condition(const Condition& cond, const FeatureSchema& schema,
                            const Vocabulary& vocab) {
  if (auto truth = binary_truth(cond, schema)) {
    const std::string& feature = cond.leading.feature;
    if (auto it = vocab.features.find(feature); it != vocab.features.end())
      return *truth ? it->second.phrase : it->second.negated;
    return *truth ? feature : "not " + feature;
  }
  std::string out = plain_term(cond.leading, vocab);
  out += " ";
  out += to_string(cond.op);
  out += " ";
  if (cond.trailing_is_constant())
    out += format_double(std::get<Constant>(cond.trailing).value);
  else
    out += plain_term(std::get<Term>(cond.trailing), vocab);
  return out;
}

std::string plain_action(const Action& action, const Vocabulary& vocab) {
  if (auto it = vocab.actions.find(action.name); it != vocab.actions.end()) return it->second;
  return action.name;
}

}  // namespace

std::string render_plain(const RuleSet& rs, const FeatureSchema& schema,
                         const Vocabulary& vocabulary) {
  std::string out;
  for (const auto& rule : rs.rules) {
    out += "If ";
    for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
      if (i) out += " and ";
      out += plain_condition(rule.conditions[i], schema, vocabulary);
    }
    out += " then " + plain_action(rule.action, vocabulary) + ".\n";
  }
  out += "If none of the above, " + plain_action(rs.default_action, vocabulary) + ".\n";
  return out;
}

}  // namespace evoter
