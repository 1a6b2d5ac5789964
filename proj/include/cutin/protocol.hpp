#pragma once

// The cut-in coverage protocol.
//
// Each round an agent reports, for every target assigned to it, whether any
// agent it can hear covers that target. Receivers fold those reports into a
// tri-valued per-target memory. An agent that owns no target then pursues
// the nearest target it remembers as uncovered, and failing that the nearest
// target it has never heard about. The Lloyd baseline only ever pursues
// assigned targets.

#include <concepts>
#include <ranges>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cutin/assignment.hpp"
#include "cutin/core.hpp"

namespace cutin {

/// Coverage bits a sender publishes for its assigned targets. Targets not
/// listed are "null" for the receiver.
struct CoverageReport {
  AgentId sender = 0;
  std::vector<std::pair<TargetId, bool>> entries;  // ascending target id

  bool operator==(const CoverageReport&) const = default;
};

enum class ReferenceTier : unsigned char { Assigned, UncoveredMemory, Unknown, Hold };

constexpr std::string_view to_string(ReferenceTier t) {
  switch (t) {
    case ReferenceTier::Assigned: return "assigned";
    case ReferenceTier::UncoveredMemory: return "uncovered";
    case ReferenceTier::Unknown: return "unknown";
    case ReferenceTier::Hold: break;
  }
  return "hold";
}

struct ReferenceChoice {
  ReferenceTier tier = ReferenceTier::Hold;
  std::optional<TargetId> target;  // present unless tier == Hold

  static ReferenceChoice hold() { return {ReferenceTier::Hold, std::nullopt}; }
  bool operator==(const ReferenceChoice&) const = default;
};

/// Evaluates the sender's assigned targets against the footprints of every
/// agent the sender can hear (itself included).
inline CoverageReport evaluate_coverage(const AssignedTargets& assigned,
                                        std::span<const Vec2> positions,
                                        const NeighborSet& neighbors, const TargetSet& targets,
                                        const SensorFootprint& footprint) {
  CoverageReport report{assigned.owner, {}};
  report.entries.reserve(assigned.targets.size());
  for (TargetId l : assigned.targets) {
    bool covered = false;
    for (AgentId j : neighbors.members) {
      if (covers(positions[j], targets[l], footprint)) {
        covered = true;
        break;
      }
    }
    report.entries.emplace_back(l, covered);
  }
  return report;
}

/// Per-target list of agents whose footprint contains it, for one snapshot.
/// Lets a round evaluate every report without repeating footprint tests.
class CoverageIndex {
 public:
  CoverageIndex(std::span<const Vec2> positions, const TargetSet& targets,
                const SensorFootprint& footprint)
      : coverers_(targets.size()) {
    for (TargetId l = 0; l < targets.size(); ++l)
      for (AgentId j = 0; j < positions.size(); ++j)
        if (covers(positions[j], targets[l], footprint)) coverers_[l].push_back(j);
  }

  const std::vector<AgentId>& coverers(TargetId l) const { return coverers_[l]; }
  bool covered(TargetId l) const { return !coverers_[l].empty(); }

  bool covered_by_any_of(TargetId l, const NeighborSet& agents) const {
    for (AgentId j : coverers_[l])
      if (agents.contains(j)) return true;
    return false;
  }

 private:
  std::vector<std::vector<AgentId>> coverers_;
};

inline CoverageReport evaluate_coverage(const AssignedTargets& assigned,
                                        const NeighborSet& neighbors, const CoverageIndex& index) {
  CoverageReport report{assigned.owner, {}};
  report.entries.reserve(assigned.targets.size());
  for (TargetId l : assigned.targets)
    report.entries.emplace_back(l, index.covered_by_any_of(l, neighbors));
  return report;
}

/// Folds one round of reports into memory. Targets nobody reported keep
/// their previous mark. When two reports disagree on a target, Covered wins.
template <std::ranges::input_range Reports>
  requires std::convertible_to<std::ranges::range_reference_t<Reports>, const CoverageReport&>
std::vector<CoverageMark> update_memory(std::vector<CoverageMark> memory, Reports&& reports) {
  std::vector<unsigned char> seen(memory.size(), 0);  // bit0: uncovered, bit1: covered
  for (const auto& r : reports)
    for (const auto& [l, bit] : r.entries) seen[l] |= bit ? 2 : 1;
  for (std::size_t l = 0; l < memory.size(); ++l) {
    if (seen[l] & 2)
      memory[l] = CoverageMark::Covered;
    else if (seen[l] & 1)
      memory[l] = CoverageMark::Uncovered;
  }
  return memory;
}

struct UnresolvedTargets {
  std::vector<TargetId> uncovered;  // remembered as uncovered
  std::vector<TargetId> unknown;    // never reported
};

inline UnresolvedTargets uncovered_sets(std::span<const CoverageMark> memory) {
  UnresolvedTargets out;
  for (TargetId l = 0; l < memory.size(); ++l) {
    if (memory[l] == CoverageMark::Uncovered)
      out.uncovered.push_back(l);
    else if (memory[l] == CoverageMark::Null)
      out.unknown.push_back(l);
  }
  return out;
}

inline ReferenceChoice select_reference_proposed(const AssignedTargets& assigned,
                                                 const UnresolvedTargets& unresolved,
                                                 const TargetSet& targets, Vec2 x) {
  if (!assigned.empty())
    return {ReferenceTier::Assigned, nearest_target(assigned.targets, targets, x)};
  if (!unresolved.uncovered.empty())
    return {ReferenceTier::UncoveredMemory, nearest_target(unresolved.uncovered, targets, x)};
  if (!unresolved.unknown.empty())
    return {ReferenceTier::Unknown, nearest_target(unresolved.unknown, targets, x)};
  return ReferenceChoice::hold();
}

// An agent with no assigned target stays put: this is the local optimum the
// cut-in tiers exist to escape.
inline ReferenceChoice select_reference_lloyd(const AssignedTargets& assigned,
                                              const TargetSet& targets, Vec2 x) {
  if (assigned.empty()) return ReferenceChoice::hold();
  return {ReferenceTier::Assigned, nearest_target(assigned.targets, targets, x)};
}

struct CoverageRates {
  double p_cov = 0.0;
  double p_cov_lower = 0.0;
};

/// Centralised coverage measurement. Never fed back to agents.
///
/// `p_cov` is the fraction of targets inside any footprint. `p_cov_lower`
/// counts only covered targets that appear in some agent's assignment, each
/// target once, so p_cov_lower <= p_cov <= 1 always holds.
inline CoverageRates global_coverage(std::span<const Vec2> positions, const TargetSet& targets,
                                     const SensorFootprint& footprint,
                                     std::span<const AssignedTargets> assignments) {
  const std::size_t nt = targets.size();
  if (nt == 0) return {};
  std::vector<char> covered(nt, 0);
  std::vector<char> assigned(nt, 0);
  for (TargetId l = 0; l < nt; ++l)
    for (Vec2 p : positions)
      if (covers(p, targets[l], footprint)) {
        covered[l] = 1;
        break;
      }
  for (const auto& a : assignments)
    for (TargetId l : a.targets) assigned[l] = 1;
  std::size_t n_cov = 0, n_low = 0;
  for (TargetId l = 0; l < nt; ++l) {
    n_cov += covered[l];
    n_low += covered[l] && assigned[l];
  }
  return {static_cast<double>(n_cov) / static_cast<double>(nt),
          static_cast<double>(n_low) / static_cast<double>(nt)};
}

}  // namespace cutin
