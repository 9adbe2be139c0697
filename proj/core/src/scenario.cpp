#include "vote_audit/scenario.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "vote_audit/errors.hpp"

namespace vote_audit::scenario {

__extension__ using Wide = __int128;

std::vector<Count> apportion_capped(Count total, std::span<const Count> weights, std::span<const Count> capacity) {
  if (weights.size() != capacity.size()) throw DomainError("weights and capacities must have equal length");
  if (total < 0) throw DomainError("cannot apportion a negative total");
  const std::size_t n = weights.size();
  for (std::size_t i = 0; i < n; ++i)
    if (weights[i] < 0 || capacity[i] < 0) throw DomainError("weights and capacities must be non-negative");

  const Count room = std::accumulate(capacity.begin(), capacity.end(), Count{0});
  if (room < total)
    throw CapacityError("only " + std::to_string(room) + " votes can be moved; shortfall of " +
                            std::to_string(total - room),
                        total - room);

  std::vector<Count> alloc(n, 0);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i)
    if (capacity[i] > 0 && weights[i] > 0) active.push_back(i);

  Count remaining = total;
  while (remaining > 0) {
    Wide weight_sum = 0;
    for (auto i : active) weight_sum += weights[i];
    if (weight_sum == 0)
      throw CapacityError("no remaining district with positive weight can absorb " + std::to_string(remaining) +
                              " votes",
                          remaining);

    std::vector<Count> share(active.size());
    std::vector<Wide> remainder(active.size());
    Count assigned = 0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const Wide num = static_cast<Wide>(remaining) * weights[active[a]];
      share[a] = static_cast<Count>(num / weight_sum);
      remainder[a] = num % weight_sum;
      assigned += share[a];
    }
    std::vector<std::size_t> order(active.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return remainder[l] > remainder[r]; });
    for (Count k = 0; k < remaining - assigned; ++k) ++share[order[static_cast<std::size_t>(k)]];

    bool capped = false;
    for (std::size_t a = 0; a < active.size(); ++a)
      capped = capped || share[a] > capacity[active[a]] - alloc[active[a]];
    if (!capped) {
      for (std::size_t a = 0; a < active.size(); ++a) alloc[active[a]] += share[a];
      remaining = 0;
      break;
    }
    // Fix every over-allocated district at its capacity and re-apportion the
    // rest among the others.
    std::vector<std::size_t> still_active;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t i = active[a];
      if (share[a] > capacity[i] - alloc[i]) {
        remaining -= capacity[i] - alloc[i];
        alloc[i] = capacity[i];
      } else {
        still_active.push_back(i);
      }
    }
    active = std::move(still_active);
  }
  return alloc;
}

ScenarioResult build_reversal_scenario(const ElectionDataset& dataset, std::span<const DistrictRecord> red,
                                       Count votes_to_move, AllocationBase base) {
  if (votes_to_move < 0) throw DomainError("votes to move must be non-negative");

  // Deterministic tie-break: ascending district_id.
  std::vector<const DistrictRecord*> ordered;
  ordered.reserve(red.size());
  for (const auto& d : red) ordered.push_back(&d);
  std::sort(ordered.begin(), ordered.end(),
            [](const DistrictRecord* l, const DistrictRecord* r) { return l->district_id < r->district_id; });

  std::vector<Count> weights, capacity;
  for (const auto* d : ordered) {
    weights.push_back(base == AllocationBase::mail_total ? d->mail_total : d->mail_c2());
    capacity.push_back(d->mail_c2());
  }
  const std::vector<Count> alloc = apportion_capped(votes_to_move, weights, capacity);

  ScenarioResult result;
  std::unordered_map<std::string, Count> moves;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    result.votes_moved_per_district[ordered[i]->district_id] = alloc[i];
    moves[ordered[i]->district_id] = alloc[i];
    result.total_moved += alloc[i];
  }

  std::vector<DistrictRecord> districts(dataset.districts().begin(), dataset.districts().end());
  std::size_t matched = 0;
  for (auto& d : districts) {
    auto it = moves.find(d.district_id);
    if (it == moves.end()) continue;
    d.mail_c1 += it->second;
    ++matched;
  }
  if (matched != moves.size()) throw DomainError("contaminated district not present in the dataset");

  result.modified = ElectionDataset(std::move(districts));
  result.resulting_margin = -result.modified.margin_official();
  return result;
}

}  // namespace vote_audit::scenario
