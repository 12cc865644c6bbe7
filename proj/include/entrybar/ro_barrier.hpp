#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "entrybar/cost.hpp"
#include "entrybar/ro_core.hpp"

namespace entrybar {

/// Expected reward of an (n+1)-th creator playing pure quality q against n
/// incumbents who keep their equilibrium strategy, paid by the enlarged
/// mechanism new_rewards. Ties (the atom at q = 1) are broken uniformly.
/// Requires new_rewards to have n+1 entries, new_i <= old_i for i <= n and a
/// zero last entry.
double entrant_expected_reward(const MixedEquilibriumRO& incumbents,
                               const RewardVector& new_rewards, double q);

struct BarrierReport {
  std::vector<double> grid;
  std::vector<double> incumbent_cdf;
  std::vector<double> entrant_reward;
  std::vector<double> cost;
  double max_margin = 0.0;       // max of entrant_reward - cost
  bool holds = false;            // max_margin <= 1e-12
  bool strict_interior = false;  // margin < -1e-12 wherever 0 < F(q) < 1
  bool cost_exceeds_one = false; // c(1) > 1; the guarantee assumes it
};

/// Default grid: 1001 uniform points on [0, 1] plus the support endpoints.
std::vector<double> barrier_grid(const MixedEquilibriumRO& incumbents);

/// Evaluates the entrant's margin g(q) - c(q) on `grid` (barrier_grid when
/// empty).
BarrierReport barrier_holds(const MixedEquilibriumRO& incumbents,
                            const RewardVector& new_rewards,
                            std::span<const double> grid = {});

struct EntrantSimulation {
  double mean = 0.0;
  double stderr_estimate = 0.0;
  std::size_t draws = 0;
};

/// Monte Carlo: incumbents sampled from their equilibrium, rank computed
/// directly with uniform tie-breaking.
EntrantSimulation simulate_entrant_reward(const MixedEquilibriumRO& incumbents,
                                          const RewardVector& new_rewards, double q,
                                          std::size_t draws, std::uint64_t seed);

/// c^{-1}(1/n), capped at 1: bound on the average quality of n creators
/// sharing a unit budget. Requires a convex cost.
double collapse_bound(const CostSpec& cost, std::size_t n);

}  // namespace entrybar
