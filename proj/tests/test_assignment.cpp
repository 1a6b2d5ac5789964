#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "cutin/assignment.hpp"

namespace cutin {
namespace {

using Ids = std::vector<std::size_t>;

TEST(NeighborSet, RadiusAndSelf) {
  const std::vector<Vec2> p{{0, 0}, {3, 0}, {20, 0}};
  EXPECT_EQ(neighbor_set(0, p, 10.0).members, (Ids{0, 1}));
  EXPECT_EQ(neighbor_set(2, p, 10.0).members, (Ids{2}));
  const std::vector<Vec2> one{{4, 4}};
  EXPECT_EQ(neighbor_set(0, one, 0.1).members, (Ids{0}));
}

TEST(NeighborSet, RadiusIsInclusive) {
  const std::vector<Vec2> p{{0, 0}, {5, 0}};
  EXPECT_EQ(neighbor_set(0, p, 5.0).members, (Ids{0, 1}));
}

TEST(NeighborSet, FigureOneGeometry) {
  // agent i at the origin with two agents in range and one beyond it
  const std::vector<Vec2> p{{0, 0}, {2, 0}, {-2, 0}, {6, 0}};
  const auto n = neighbor_set(0, p, 5.0);
  EXPECT_TRUE(n.contains(0));
  EXPECT_TRUE(n.contains(1));
  EXPECT_TRUE(n.contains(2));
  EXPECT_FALSE(n.contains(3));
}

TEST(NeighborSet, SymmetricRandomised) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> p(30);
    for (auto& x : p) x = {u(rng), u(rng)};
    const auto all = neighbor_sets(p, 6.0);
    for (AgentId i = 0; i < p.size(); ++i) {
      EXPECT_EQ(all[i].members, neighbor_set(i, p, 6.0).members);
      for (AgentId j : all[i].members) EXPECT_TRUE(all[j].contains(i));
    }
  }
}

TEST(AssignTargets, BisectorSplit) {
  const std::vector<Vec2> p{{0, 0}, {4, 0}};
  const TargetSet t{{{1, 0}, {3, 0}}};
  const auto n = neighbor_sets(p, 10.0);
  EXPECT_EQ(assign_targets(0, p, t, n[0]).targets, (Ids{0}));
  EXPECT_EQ(assign_targets(1, p, t, n[1]).targets, (Ids{1}));
}

TEST(AssignTargets, TieOnBisectorGoesToBoth) {
  const std::vector<Vec2> p{{0, 0}, {4, 0}};
  const TargetSet t{{{1, 0}, {2, 0}}};
  const auto n = neighbor_sets(p, 10.0);
  EXPECT_TRUE(assign_targets(0, p, t, n[0]).contains(1));
  EXPECT_TRUE(assign_targets(1, p, t, n[1]).contains(1));
}

TEST(AssignTargets, EmptyWhenNeighboursAreCloserToEverything) {
  const std::vector<Vec2> p{{0, 0}, {2, 0}, {-2, 0}, {6, 0}};
  const TargetSet t{{{3.5, 0}, {-3.2, 0}, {7, 1}, {7, -1}}};
  const auto n = neighbor_sets(p, 5.0);
  EXPECT_TRUE(assign_targets(0, p, t, n[0]).empty());
}

TEST(AssignTargets, OutOfRangeAgentsDoNotCompete) {
  const std::vector<Vec2> p{{0, 0}, {8, 0}};
  const TargetSet t{{{7, 0}}};
  const auto n = neighbor_sets(p, 5.0);
  EXPECT_EQ(assign_targets(0, p, t, n[0]).targets, (Ids{0}));
  EXPECT_EQ(assign_targets(1, p, t, n[1]).targets, (Ids{0}));
}

TEST(AssignAll, MatchesPerAgentAssignment) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vec2> p(25);
    TargetSet t;
    t.positions.resize(40);
    for (auto& x : p) x = {u(rng), u(rng)};
    for (auto& x : t.positions) x = {u(rng), u(rng)};
    const auto n = neighbor_sets(p, 7.0);
    const auto all = assign_all(p, t, n);
    for (AgentId i = 0; i < p.size(); ++i)
      EXPECT_EQ(all[i].targets, assign_targets(i, p, t, n[i]).targets);
  }
}

TEST(NearestTarget, Examples) {
  const TargetSet a{{{5, 0}, {1, 0}}};
  EXPECT_EQ(nearest_target(Ids{0, 1}, a, {0, 0}), 1u);
  const TargetSet b{{{1, 0}, {-1, 0}}};
  EXPECT_EQ(nearest_target(Ids{0, 1}, b, {0, 0}), 0u);
  EXPECT_EQ(nearest_target(Ids{1, 0}, b, {0, 0}), 0u);
  TargetSet c;
  c.positions.assign(8, Vec2{});
  for (std::size_t l = 0; l < 8; ++l) c.positions[l] = {double(l), 3.0};
  EXPECT_EQ(nearest_target(Ids{6}, c, {-100, 50}), 6u);
}

TEST(NearestTarget, EmptyCandidatesThrow) {
  const TargetSet t{{{0, 0}}};
  EXPECT_THROW(nearest_target(Ids{}, t, {0, 0}), std::invalid_argument);
}

}  // namespace
}  // namespace cutin
