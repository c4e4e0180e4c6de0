#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "evoter/generate.hpp"
#include "evoter/rng.hpp"
#include "evoter/rules.hpp"
#include "evoter/schema.hpp"

namespace test {

inline std::string data_path(const std::string& rel) {
  return std::string(EVOTER_DATA_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Two continuous features on [0, 1] and  actions A/B; the workhorse schema.
inline evoter::FeatureSchema xy_schema(int max_lag = 0) {
  return evoter::FeatureSchema({{"x", 0.0, 1.0, evoter::FeatureKind::Continuous},
                                {"y", 0.0, 1.0, evoter::FeatureKind::Continuous}},
                               {"A", "B"}, max_lag);
}

inline evoter::InputFrame frame_of(const std::vector<std::vector<double>>& history) {
  return evoter::InputFrame{history};
}

/// Uniform random frames within declared ranges, history depth = max_lag + 1.
inline std::vector<std::vector<std::vector<double>>> random_frames(
    const evoter::FeatureSchema& schema, std::size_t n, evoter::RandomSource& rng) {
  std::vector<std::vector<std::vector<double>>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<double>> history(schema.max_lag() + 1);
    for (auto& h : history)
      for (const auto& f : schema.features())
        h.push_back(f.kind == evoter::FeatureKind::Binary ? (rng.chance(0.5) ? 1.0 : 0.0)
                                                          : rng.uniform(f.min, f.max));
    out.push_back(std::move(history));
  }
  return out;
}

/// Random rule set that may contain tautologies, falsehoods and duplicate
/// conditions — exercise material for prune and simplify.
inline evoter::RuleSet dirty_ruleset(const evoter::FeatureSchema& schema,
                                     const evoter::GenomeParams& params,
                                     evoter::RandomSource& rng) {
  using namespace evoter;
  RuleSet rs = random_ruleset(schema, params, rng);
  for (auto& rule : rs.rules) {
    if (rng.chance(0.3)) {
      // constant pushed outside the reachable interval: tautology or falsehood
      Condition c = rule.conditions[rng.below(rule.conditions.size())];
      if (c.trailing_is_constant()) {
        auto& k = std::get<Constant>(c.trailing);
        k.value = rng.chance(0.5) ? k.value + 1000.0 : k.value - 1000.0;
      }
      rule.conditions.push_back(c);
    }
    if (rng.chance(0.2)) {
      // self-comparison: symbolic tautology or falsehood
      Condition c;
      c.leading = random_term(schema, params, rng);
      c.op = rng.chance(0.5) ? CompareOp::LessEq : CompareOp::Less;
      c.trailing = c.leading;
      rule.conditions.push_back(c);
    }
    if (rng.chance(0.25) && rule.conditions.size() >= 2) {
      rule.conditions.push_back(rule.conditions.front());  // duplicate condition
    }
  }
  if (!rs.rules.empty() && rng.chance(0.3)) rs.rules.push_back(rs.rules.front());
  return rs;
}

}  // namespace test
