#include "evoter/pareto.hpp"

#include <algorithm>

#include "evoter/errors.hpp"

namespace evoter {

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly = true;
  }
  return strictly;
}

bool ParetoArchive::offer(const Candidate& candidate) {
  if (!members_.empty() && members_.front().objectives.size() != candidate.objectives.size())
    throw DimensionMismatch(members_.front().objectives.size(), candidate.objectives.size());

  for (const auto& m : members_) {
    if (dominates(m.objectives, candidate.objectives)) return false;
    if (m.objectives == candidate.objectives && m.genome == candidate.genome) return false;
  }
  std::erase_if(members_, [&](const Candidate& m) {
    return dominates(candidate.objectives, m.objectives);
  });
  members_.push_back(candidate);
  return true;
}

}  // namespace evoter
