#include "evoter/interval.hpp"

#include <algorithm>
#include <cmath>

namespace evoter {

namespace {

Interval power_interval(double lo, double hi, int power) {
  if (power == 1) return {lo, hi};
  if (power == 3) return {lo * lo * lo, hi * hi * hi};  // odd, monotone
  // power == 2
  if (lo <= 0.0 && hi >= 0.0) return {0.0, std::max(lo * lo, hi * hi)};
  double a = lo * lo, b = hi * hi;
  return {std::min(a, b), std::max(a, b)};
}

bool same_base(const Term& a, const Term& b) {
  return a.feature_index == b.feature_index && a.power == b.power && a.lag == b.lag;
}

bool identical_term(const Term& a, const Term& b) {
  return same_base(a, b) && a.coefficient == b.coefficient;
}

}  // namespace

Interval term_interval(const Term& term, const FeatureSchema& schema) {
  const auto& f = schema.feature(term.feature_index);
  Interval p = power_interval(f.min, f.max, term.power);
  return {term.coefficient * p.lo, term.coefficient * p.hi};
}

ConditionStatus condition_status(const Condition& cond, const FeatureSchema& schema) {
  if (!cond.trailing_is_constant()) {
    const Term& rhs = std::get<Term>(cond.trailing);
    if (identical_term(cond.leading, rhs)) {
      switch (cond.op) {
        case CompareOp::LessEq:
        case CompareOp::GreaterEq: return ConditionStatus::Tautology;
        case CompareOp::Less:
        case CompareOp::Greater: return ConditionStatus::Falsehood;
      }
    }
  }

  const Interval lhs = term_interval(cond.leading, schema);
  Interval rhs;
  if (cond.trailing_is_constant()) {
    const double v = std::get<Constant>(cond.trailing).value;
    rhs = {v, v};
  } else {
    rhs = term_interval(std::get<Term>(cond.trailing), schema);
  }

  switch (cond.op) {
    case CompareOp::Less:
      if (lhs.hi < rhs.lo) return ConditionStatus::Tautology;
      if (lhs.lo >= rhs.hi) return ConditionStatus::Falsehood;
      break;
    case CompareOp::LessEq:
      if (lhs.hi <= rhs.lo) return ConditionStatus::Tautology;
      if (lhs.lo > rhs.hi) return ConditionStatus::Falsehood;
      break;
    case CompareOp::Greater:
      if (lhs.lo > rhs.hi) return ConditionStatus::Tautology;
      if (lhs.hi <= rhs.lo) return ConditionStatus::Falsehood;
      break;
    case CompareOp::GreaterEq:
      if (lhs.lo >= rhs.hi) return ConditionStatus::Tautology;
      if (lhs.hi < rhs.lo) return ConditionStatus::Falsehood;
      break;
  }
  return ConditionStatus::Contingent;
}

namespace {

bool is_less_family(CompareOp op) { return op == CompareOp::Less || op == CompareOp::LessEq; }
bool is_strict(CompareOp op) { return op == CompareOp::Less || op == CompareOp::Greater; }

// u OP1 b1 implies u OP2 b2, for bounds on the same scaled quantity u.
bool bound_implies(CompareOp op1, double b1, CompareOp op2, double b2, bool less_family) {
  if (less_family) {
    if (b1 < b2) return true;
    if (b1 == b2) return !(is_strict(op2) && !is_strict(op1));
    return false;
  }
  if (b1 > b2) return true;
  if (b1 == b2) return !(is_strict(op2) && !is_strict(op1));
  return false;
}

}  // namespace

bool condition_implies(const Condition& tight, const Condition& loose,
                       const FeatureSchema& schema) {
  if (condition_status(loose, schema) == ConditionStatus::Tautology) return true;
  if (tight == loose) return true;
  if (!same_base(tight.leading, loose.leading)) return false;
  if (is_less_family(tight.op) != is_less_family(loose.op)) return false;
  const bool less = is_less_family(tight.op);

  // Normalize both to: u OP bound, with u = feature^power and bound scaled by
  // the (positive) leading coefficient.
  if (tight.trailing_is_constant() && loose.trailing_is_constant()) {
    const double b1 = std::get<Constant>(tight.trailing).value / tight.leading.coefficient;
    const double b2 = std::get<Constant>(loose.trailing).value / loose.leading.coefficient;
    return bound_implies(tight.op, b1, loose.op, b2, less);
  }
  if (!tight.trailing_is_constant() && !loose.trailing_is_constant()) {
    const Term& t1 = std::get<Term>(tight.trailing);
    const Term& t2 = std::get<Term>(loose.trailing);
    if (!same_base(t1, t2)) return false;
    // Both read: u OP r·w with r = trailing/leading coefficient ratio and w
    // the shared trailing base. Implication needs the bound gap to keep one
    // sign over w's whole range.
    Term base = t2;
    base.coefficient = 1.0;
    const Interval w = term_interval(base, schema);
    const double r1 = t1.coefficient / tight.leading.coefficient;
    const double r2 = t2.coefficient / loose.leading.coefficient;
    if (r1 == r2) return !(is_strict(loose.op) && !is_strict(tight.op));
    const double gap = less ? (r2 - r1) : (r1 - r2);
    const bool nonneg_everywhere = (gap > 0.0 && w.lo >= 0.0) || (gap < 0.0 && w.hi <= 0.0);
    if (!nonneg_everywhere) return false;
    if (is_strict(loose.op) && !is_strict(tight.op)) {
      const bool positive_everywhere = (gap > 0.0 && w.lo > 0.0) || (gap < 0.0 && w.hi < 0.0);
      if (!positive_everywhere) return false;
    }
    return true;
  }
  return false;
}

}  // namespace evoter
