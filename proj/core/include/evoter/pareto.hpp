#pragma once

#include <cstdint>
#include <vector>

#include "evoter/rules.hpp"

namespace evoter {

/// A rule set plus everything the engine tracked about it.
struct Candidate {
  RuleSet genome;
  std::vector<double> objectives;  // maximization convention, order fixed per run
  EvalCounters counters;           // times_applied snapshot from the last evaluation
  std::uint64_t id = 0;
  std::vector<std::uint64_t> parent_ids;
  int generation_born = 0;
};

/// a dominates b: at least as good everywhere, strictly better somewhere.
bool dominates(const std::vector<double>& a, const std::vector<double>& b);

/// Archive of mutually non-dominated candidates. Equal objective vectors from
/// distinct genomes are both retained; an exact duplicate (same genome, same
/// objectives) is dropped.
class ParetoArchive {
public:
  /// Inserts iff no member dominates the candidate, evicting members it
  /// dominates. Returns whether the candidate was added.
  bool offer(const Candidate& candidate);

  const std::vector<Candidate>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

private:
  std::vector<Candidate> members_;
};

}  // namespace evoter
