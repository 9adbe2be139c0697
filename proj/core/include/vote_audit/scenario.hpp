#pragma once

#include <map>
#include <span>
#include <string>

#include "vote_audit/election_data.hpp"

namespace vote_audit::scenario {

/// What the proportional allocation is proportional to.
enum class AllocationBase {
  mail_total,  ///< each red district's mail total
  mail_c2,     ///< each red district's candidate-2 mail votes
};

struct ScenarioResult {
  ElectionDataset modified;
  std::map<std::string, Count> votes_moved_per_district;
  Count total_moved = 0;
  /// Candidate 1 total minus candidate 2 total, nationally, after the move.
  Count resulting_margin = 0;
};

/// Integer apportionment of `total` in proportion to `weights` by largest
/// remainder, each share capped at `capacity[i]`. Surplus from capped entries
/// is re-apportioned among the rest. Remainder ties go to the lower index, so
/// callers order entries by the desired tie-break. Throws CapacityError when
/// the capacities cannot absorb `total`.
std::vector<Count> apportion_capped(Count total, std::span<const Count> weights, std::span<const Count> capacity);

/// Counterfactual in which `votes_to_move` red-district mail votes counted for
/// candidate 2 are reassigned to candidate 1, spread proportionally over the
/// red districts. Green districts and all totals are left untouched.
ScenarioResult build_reversal_scenario(const ElectionDataset& dataset, std::span<const DistrictRecord> red,
                                       Count votes_to_move, AllocationBase base = AllocationBase::mail_total);

}  // namespace vote_audit::scenario
