#include "evoter/rules.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "evoter/errors.hpp"

namespace evoter {

double quantize_coefficient(double value) { return std::round(value * 100.0) / 100.0; }

Term Term::make(double coefficient, const std::string& feature, int power, int lag,
                const FeatureSchema& schema) {
  if (!(coefficient > 0.0) || coefficient > 1.0) throw CoefficientOutOfRange(coefficient);
  Term t;
  t.coefficient = quantize_coefficient(coefficient);
  if (t.coefficient <= 0.0) throw CoefficientOutOfRange(coefficient);
  auto idx = schema.index_of(feature);
  if (!idx) throw UnknownFeature(feature);
  t.feature = feature;
  t.feature_index = *idx;
  if (power < 1 || power > 3) throw InvalidSchema("power " + std::to_string(power) + " outside 1..3");
  t.power = power;
  if (lag < 0 || lag > schema.max_lag())
    throw InvalidSchema("lag " + std::to_string(lag) + " outside 0.." +
                        std::to_string(schema.max_lag()));
  t.lag = lag;
  return t;
}

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEq: return "<=";
    case CompareOp::Greater: return ">";
    case CompareOp::GreaterEq: return ">=";
  }
  return "?";
}

std::size_t RuleSet::condition_count() const {
  std::size_t n = 0;
  for (const auto& r : rules) n += r.conditions.size();
  return n;
}

std::vector<std::string> RuleSet::actions_used() const {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& r : rules)
    if (seen.insert(r.action.name).second) out.push_back(r.action.name);
  if (seen.insert(default_action.name).second) out.push_back(default_action.name);
  return out;
}

double InputFrame::value_at(std::size_t feature_index, int lag) const {
  if (lag < 0 || static_cast<std::size_t>(lag) >= history.size())
    throw InsufficientHistory(lag, history.size());
  const auto& frame = history[history.size() - 1 - static_cast<std::size_t>(lag)];
  if (feature_index >= frame.size())
    throw UnknownFeature("index " + std::to_string(feature_index) + " beyond frame width " +
                         std::to_string(frame.size()));
  return frame[feature_index];
}

void EvalCounters::merge(const EvalCounters& o) {
  if (rule_hits.size() < o.rule_hits.size()) rule_hits.resize(o.rule_hits.size(), 0);
  for (std::size_t i = 0; i < o.rule_hits.size(); ++i) rule_hits[i] += o.rule_hits[i];
  default_hits += o.default_hits;
}

std::uint64_t EvalCounters::total() const {
  std::uint64_t n = default_hits;
  for (auto h : rule_hits) n += h;
  return n;
}

double eval_term(const Term& term, const InputFrame& frame) {
  const double x = frame.value_at(term.feature_index, term.lag);
  double p = x;
  for (int i = 1; i < term.power; ++i) p *= x;
  return term.coefficient * p;
}

bool eval_condition(const Condition& cond, const InputFrame& frame) {
  const double lhs = eval_term(cond.leading, frame);
  const double rhs = cond.trailing_is_constant() ? std::get<Constant>(cond.trailing).value
                                                 : eval_term(std::get<Term>(cond.trailing), frame);
  switch (cond.op) {
    case CompareOp::Less: return lhs < rhs;
    case CompareOp::LessEq: return lhs <= rhs;
    case CompareOp::Greater: return lhs > rhs;
    case CompareOp::GreaterEq: return lhs >= rhs;
  }
  return false;
}

namespace {

bool rule_matches(const Rule& rule, const InputFrame& frame) {
  for (const auto& c : rule.conditions)
    if (!eval_condition(c, frame)) return false;
  return true;
}

void push_distinct(std::vector<Action>& actions, const Action& a) {
  for (const auto& have : actions)
    if (have.name == a.name) return;
  actions.push_back(a);
}

}  // namespace

ActionOutcome eval_ruleset(const RuleSet& rs, const InputFrame& frame, EvalMode mode,
                           EvalCounters* counters) {
  if (counters && counters->rule_hits.size() != rs.rules.size())
    counters->rule_hits.resize(rs.rules.size(), 0);

  ActionOutcome out;
  if (mode == EvalMode::FirstMatch) {
    for (std::size_t i = 0; i < rs.rules.size(); ++i) {
      if (rule_matches(rs.rules[i], frame)) {
        if (counters) ++counters->rule_hits[i];
        out.actions.push_back(rs.rules[i].action);
        return out;
      }
    }
    if (counters) ++counters->default_hits;
    out.actions.push_back(rs.default_action);
    return out;
  }

  // HardMax and AllMatched evaluate every rule.
  std::vector<std::size_t> matched;
  for (std::size_t i = 0; i < rs.rules.size(); ++i) {
    if (rule_matches(rs.rules[i], frame)) {
      matched.push_back(i);
      if (counters) ++counters->rule_hits[i];
    }
  }

  if (mode == EvalMode::HardMax) {
    // Default competes on its certainty; ties go to the earliest rule.
    const Rule* best = nullptr;
    for (auto i : matched) {
      if (!best || rs.rules[i].action.certainty > best->action.certainty) best = &rs.rules[i];
    }
    if (!best || rs.default_action.certainty > best->action.certainty) {
      if (counters) ++counters->default_hits;
      out.actions.push_back(rs.default_action);
    } else {
      out.actions.push_back(best->action);
    }
    return out;
  }

  // AllMatched: distinct actions in firing order, default appended last.
  for (auto i : matched) push_distinct(out.actions, rs.rules[i].action);
  push_distinct(out.actions, rs.default_action);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

std::string format_coeff(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void render_action(std::string& out, const Action& a) {
  if (a.certainty != 1.0) {
    out += format_coeff(a.certainty);
    out += '*';
  }
  out += a.name;
}

}  // namespace

std::string render(const Term& term) {
  std::string out = format_coeff(term.coefficient);
  out += '*';
  out += term.feature;
  if (term.power != 1) {
    out += '^';
    out += std::to_string(term.power);
  }
  if (term.lag != 0) {
    out += '(';
    out += std::to_string(term.lag);
    out += ')';
  }
  return out;
}

std::string render(const Condition& cond) {
  std::string out = render(cond.leading);
  out += ' ';
  out += to_string(cond.op);
  out += ' ';
  if (cond.trailing_is_constant()) {
    const auto& c = std::get<Constant>(cond.trailing);
    out += format_double(c.value);
    out += " [";
    out += format_double(c.range_min);
    out += "..";
    out += format_double(c.range_max);
    out += ']';
  } else {
    out += render(std::get<Term>(cond.trailing));
  }
  return out;
}

std::string render(const Rule& rule, std::size_t index) {
  std::string out = std::to_string(index) + ". ";
  for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
    if (i) out += " & ";
    out += render(rule.conditions[i]);
  }
  out += " -> ";
  render_action(out, rule.action);
  return out;
}

std::string render(const RuleSet& rs) {
  std::string out;
  for (std::size_t i = 0; i < rs.rules.size(); ++i) {
    out += render(rs.rules[i], i + 1);
    out += '\n';
  }
  out += "DEFAULT -> ";
  render_action(out, rs.default_action);
  out += '\n';
  return out;
}

}  // namespace evoter
