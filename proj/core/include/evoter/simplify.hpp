#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evoter/rules.hpp"
#include "evoter/schema.hpp"

namespace evoter {

struct SimplifyStats {
  int rules_before = 0, rules_after = 0;
  int conditions_before = 0, conditions_after = 0;
  int removed_taut_conditions = 0;
  int removed_false_rules = 0;
  int removed_duplicates = 0;
  int removed_subsumed_conditions = 0;
  int removed_unreachable = 0;
  int removed_inactive = 0;
  int rolled_back = 0;
};

/// Semantics-preserving cleanup, run to fixpoint: interval prune, within-rule
/// condition subsumption (keep the binding constraint), duplicate-rule
/// removal, and removal of rules a preceding rule shadows in first-match
/// order. Every candidate deletion beyond the interval-proven prune is
/// verified on sample_budget random frames in all three evaluation modes and
/// rolled back on any behavioral difference — conservative by construction.
///
/// When an activity corpus is supplied, rules that never matched on it are
/// dropped first. That step intentionally changes behavior off-corpus and is
/// never applied implicitly; the equivalence guarantee covers everything after
/// it.
RuleSet simplify(const RuleSet& rs, const FeatureSchema& schema, std::size_t sample_budget,
                 std::uint64_t seed,
                 const std::vector<std::vector<double>>* activity_corpus = nullptr,
                 SimplifyStats* stats = nullptr);

/// Phrase substitutions for render_plain. The JSON form is either a flat
/// {feature: {"phrase":..., "negated_phrase":...}} map or an object with
/// "features" and "actions" sections.
struct Vocabulary {
  struct Entry {
    std::string phrase;
    std::string negated;
  };
  std::map<std::string, Entry> features;
  std::map<std::string, std::string> actions;

  static Vocabulary from_json_text(const std::string& text);
  static Vocabulary load(const std::string& path);
};

/// One sentence per rule: "If <conditions> then <action>." Conditions on
/// binary features compared against constants fold to the positive or negated
/// phrase; the default renders as "If none of the above".
std::string render_plain(const RuleSet& rs, const FeatureSchema& schema,
                         const Vocabulary& vocabulary = {});

}  // namespace evoter
