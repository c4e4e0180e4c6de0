#pragma once

#include <string>

#include "evoter/rules.hpp"
#include "evoter/schema.hpp"

namespace evoter {

/// Parses rule text into a RuleSet.
///
/// Accepted line format, one rule per line (later rules are OR-alternatives):
///
///   [N.] COND [& COND]* -> [CERT*]ACTION
///   DEFAULT -> [CERT*]ACTION          (required, last; "Default Action" also ok)
///
///   COND  = [COEFF*]NAME[^POW][(LAG)] OP ([COEFF*]NAME[^POW][(LAG)] | VALUE)
///   OP    = < | <= | > | >=
///
/// `#` starts a comment. Conditions may be wrapped in parentheses. A VALUE may
/// carry a glued unit suffix ("72.75mmHg") and/or a range note ("[0..192.0]");
/// both are accepted and discarded — the canonical range note is regenerated
/// from the schema. Coefficients omitted in the input default to 1.00 and are
/// quantized to two decimals, so the canonical render always re-parses to a
/// structurally equal rule set.
RuleSet parse(const std::string& text, const FeatureSchema& schema);

/// Reads and parses a rule file.
RuleSet parse_file(const std::string& path, const FeatureSchema& schema);

}  // namespace evoter
