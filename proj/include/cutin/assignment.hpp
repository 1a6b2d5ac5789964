#pragma once

// Communication neighbourhoods and Voronoi target assignment.
//
// Assignment is a pure distance comparison: a target belongs to agent i when
// no communicating neighbour is strictly closer to it. No cell polygons are
// ever built.

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "cutin/core.hpp"

namespace cutin {

/// Agents within communication range of `owner`, owner included, ascending.
struct NeighborSet {
  AgentId owner = 0;
  std::vector<AgentId> members;

  bool contains(AgentId j) const { return std::binary_search(members.begin(), members.end(), j); }
  bool operator==(const NeighborSet&) const = default;
};

/// Targets assigned to `owner` this round, ascending.
struct AssignedTargets {
  AgentId owner = 0;
  std::vector<TargetId> targets;

  bool empty() const { return targets.empty(); }
  bool contains(TargetId l) const { return std::binary_search(targets.begin(), targets.end(), l); }
  bool operator==(const AssignedTargets&) const = default;
};

inline NeighborSet neighbor_set(AgentId i, std::span<const Vec2> positions, double d_c) {
  NeighborSet out{i, {}};
  for (AgentId j = 0; j < positions.size(); ++j)
    if (j == i || distance(positions[j], positions[i]) <= d_c) out.members.push_back(j);
  return out;
}

inline std::vector<NeighborSet> neighbor_sets(std::span<const Vec2> positions, double d_c) {
  const std::size_t n = positions.size();
  std::vector<NeighborSet> out(n);
  for (AgentId i = 0; i < n; ++i) out[i].owner = i;
  for (AgentId i = 0; i < n; ++i) {
    out[i].members.push_back(i);
    for (AgentId j = i + 1; j < n; ++j) {
      if (distance(positions[j], positions[i]) <= d_c) {
        out[i].members.push_back(j);
        out[j].members.push_back(i);
      }
    }
  }
  for (auto& s : out) std::sort(s.members.begin(), s.members.end());
  return out;
}

/// Targets at least as close to agent i as to every neighbour. The comparison
/// is non-strict, so a target on a bisector belongs to both agents.
inline AssignedTargets assign_targets(AgentId i, std::span<const Vec2> positions,
                                      const TargetSet& targets, const NeighborSet& neighbors) {
  AssignedTargets out{i, {}};
  for (TargetId l = 0; l < targets.size(); ++l) {
    const double own = distance(targets[l], positions[i]);
    bool mine = true;
    for (AgentId j : neighbors.members) {
      if (distance(targets[l], positions[j]) < own) {
        mine = false;
        break;
      }
    }
    if (mine) out.targets.push_back(l);
  }
  return out;
}

/// Batched form of assign_targets for every agent of a snapshot. Shares one
/// target-to-agent distance table; results are identical to calling
/// assign_targets per agent.
inline std::vector<AssignedTargets> assign_all(std::span<const Vec2> positions,
                                               const TargetSet& targets,
                                               std::span<const NeighborSet> neighbors) {
  const std::size_t n = positions.size();
  const std::size_t nt = targets.size();
  std::vector<double> dist(nt * n);
  for (TargetId l = 0; l < nt; ++l)
    for (AgentId j = 0; j < n; ++j) dist[l * n + j] = distance(targets[l], positions[j]);

  std::vector<AssignedTargets> out(n);
  for (AgentId i = 0; i < n; ++i) {
    out[i].owner = i;
    const auto& members = neighbors[i].members;
    for (TargetId l = 0; l < nt; ++l) {
      const double* row = &dist[l * n];
      const double own = row[i];
      bool mine = true;
      for (AgentId j : members) {
        if (row[j] < own) {
          mine = false;
          break;
        }
      }
      if (mine) out[i].targets.push_back(l);
    }
  }
  return out;
}

/// Candidate closest to `x`; ties go to the lowest target id.
inline TargetId nearest_target(std::span<const TargetId> candidates, const TargetSet& targets,
                               Vec2 x) {
  if (candidates.empty()) throw std::invalid_argument("nearest_target: empty candidate set");
  TargetId best = candidates.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (TargetId l : candidates) {
    const double d = distance(targets[l], x);
    if (d < best_d || (d == best_d && l < best)) {
      best = l;
      best_d = d;
    }
  }
  return best;
}

}  // namespace cutin
