#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "evoter/schema.hpp"

namespace evoter {

/// Rounds to the canonical two-decimal precision of coefficients/certainties.
double quantize_coefficient(double value);

/// One side of a condition: coefficient * feature^power, optionally lagged.
/// The power applies to the raw feature value before the coefficient scales it.
struct Term {
  double coefficient = 1.0;  // in (0, 1], canonical two-decimal precision
  std::string feature;
  std::size_t feature_index = 0;  // resolved against the schema at construction
  int power = 1;                  // in {1, 2, 3}
  int lag = 0;                    // frames back; 0 = current frame

  static Term make(double coefficient, const std::string& feature, int power, int lag,
                   const FeatureSchema& schema);

  bool operator==(const Term& o) const {
    return coefficient == o.coefficient && feature == o.feature && power == o.power &&
           lag == o.lag;
  }
};

enum class CompareOp { Less, LessEq, Greater, GreaterEq };

const char* to_string(CompareOp op);

/// Constant right-hand side; carries the leading feature's declared range so a
/// rule set renders without schema access.
struct Constant {
  double value = 0.0;
  double range_min = 0.0;
  double range_max = 1.0;

  bool operator==(const Constant& o) const {
    return value == o.value && range_min == o.range_min && range_max == o.range_max;
  }
};

struct Condition {
  Term leading;
  CompareOp op = CompareOp::Less;
  std::variant<Term, Constant> trailing;

  bool trailing_is_constant() const { return std::holds_alternative<Constant>(trailing); }
  bool operator==(const Condition& o) const {
    return leading == o.leading && op == o.op && trailing == o.trailing;
  }
};

/// Consequence of a rule. The certainty doubles as the action coefficient the
/// hard-max filter ranks on; 1.0 when omitted in text form.
struct Action {
  std::string name;
  double certainty = 1.0;

  bool operator==(const Action& o) const { return name == o.name && certainty == o.certainty; }
};

struct Rule {
  std::vector<Condition> conditions;  // nonempty conjunction
  Action action;

  bool operator==(const Rule& o) const {
    return conditions == o.conditions && action == o.action;
  }
};

/// Ordered rule list plus a default action: the evolvable genome and the
/// deployable model. Immutable in use; evaluation counters live outside.
struct RuleSet {
  std::vector<Rule> rules;
  Action default_action;

  std::size_t condition_count() const;
  /// Distinct action names referenced, default included.
  std::vector<std::string> actions_used() const;

  bool operator==(const RuleSet& o) const {
    return rules == o.rules && default_action == o.default_action;
  }
};

/// Input to evaluation: feature vectors, most recent last. A term with lag t
/// reads history[size-1-t]; lag beyond the available history is an error, not
/// a clamp.
struct InputFrame {
  std::span<const std::vector<double>> history;

  double value_at(std::size_t feature_index, int lag) const;
};

enum class EvalMode { FirstMatch, HardMax, AllMatched };

/// Per-rule firing counters for one evaluation context. Owned by the caller so
/// concurrent evaluations of a shared RuleSet need no synchronization.
struct EvalCounters {
  std::vector<std::uint64_t> rule_hits;
  std::uint64_t default_hits = 0;

  void reset(std::size_t n_rules) {
    rule_hits.assign(n_rules, 0);
    default_hits = 0;
  }
  void merge(const EvalCounters& o);
  std::uint64_t total() const;
};

struct ActionOutcome {
  /// FirstMatch/HardMax: exactly one entry. AllMatched: distinct matched
  /// actions in firing order, the default appended when not already present.
  std::vector<Action> actions;

  const Action& primary() const { return actions.front(); }
  bool operator==(const ActionOutcome& o) const { return actions == o.actions; }
};

double eval_term(const Term& term, const InputFrame& frame);
bool eval_condition(const Condition& cond, const InputFrame& frame);

/// Evaluates a rule set against one frame.
///
/// FirstMatch stops at the first rule whose conjunction holds (so later rules
/// are not tested and not counted); HardMax and AllMatched test every rule.
/// Counters, when provided, record one hit per matched-and-tested rule, plus a
/// default hit when the default fires in FirstMatch/HardMax.
ActionOutcome eval_ruleset(const RuleSet& rs, const InputFrame& frame, EvalMode mode,
                           EvalCounters* counters = nullptr);

/// Canonical text form; parse(render(rs)) is structurally equal to rs.
std::string render(const RuleSet& rs);
std::string render(const Rule& rule, std::size_t index);
std::string render(const Condition& cond);
std::string render(const Term& term);

/// Shortest decimal text that reads back as exactly the same double.
std::string format_double(double v);

}  // namespace evoter
