#pragma once

#include "evoter/rules.hpp"
#include "evoter/schema.hpp"

namespace evoter {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Reachable values of a term over its feature's declared range. Lag is
/// irrelevant here: a lagged value has the same range as the current one.
Interval term_interval(const Term& term, const FeatureSchema& schema);

enum class ConditionStatus { Contingent, Tautology, Falsehood };

/// Classifies a condition over the product of the declared feature ranges:
/// tautology = holds at every point, falsehood = holds at none. The two sides
/// are treated as independent (the cross product), except that literally
/// identical terms are resolved symbolically (x <= x is a tautology, x < x a
/// falsehood). This makes both removals sound, merely conservative for other
/// same-feature comparisons.
ConditionStatus condition_status(const Condition& cond, const FeatureSchema& schema);

/// True when `tight` holding guarantees `loose` holds, decided symbolically
/// for same-leading-base conditions (same feature/power/lag on the left and,
/// for term trailings, on the right). Conservative: false when unsure.
bool condition_implies(const Condition& tight, const Condition& loose,
                       const FeatureSchema& schema);

}  // namespace evoter
