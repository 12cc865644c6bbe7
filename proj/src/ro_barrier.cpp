#include "entrybar/ro_barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entrybar/error.hpp"
#include "entrybar/numerics.hpp"

namespace entrybar {

namespace {

constexpr double kSlack = 1e-12;

void check_entrant_mechanism(const MixedEquilibriumRO& eq, const RewardVector& next) {
  const std::size_t n = eq.creators();
  if (next.size() != n + 1) {
    throw PreconditionError("entrant mechanism must have n + 1 = " + std::to_string(n + 1) +
                            " ranks");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (next[i] > eq.rewards[i] + kSlack) {
      throw PreconditionError("entrant mechanism raises rank " + std::to_string(i + 1));
    }
  }
  if (next.bottom() != 0.0) {
    throw PreconditionError("entrant mechanism must pay nothing to the last rank");
  }
}

// Probabilities that one incumbent plays below / exactly at q.
std::pair<double, double> below_and_tied(const MixedEquilibriumRO& eq, double q) {
  if (eq.atom_mass > 0.0 && q >= 1.0) return {1.0 - eq.atom_mass, eq.atom_mass};
  if (eq.atom_mass == 0.0 && eq.support_max == 0.0) {
    // everyone plays 0
    return q > 0.0 ? std::pair{1.0, 0.0} : std::pair{0.0, 1.0};
  }
  return {cdf_eval(eq, q), 0.0};
}

}  // namespace

double entrant_expected_reward(const MixedEquilibriumRO& incumbents,
                               const RewardVector& new_rewards, double q) {
  check_entrant_mechanism(incumbents, new_rewards);
  if (!(q >= 0.0 && q <= 1.0)) throw PreconditionError("quality must lie in [0, 1]");
  const auto [lo, tie] = below_and_tied(incumbents, q);
  if (tie == 0.0) return rank_reward_expectation(new_rewards, lo);
  // Atoms sit at the top of the support, so nobody is strictly above and
  // the tied group averages its ranks.
  return rank_reward_expectation(cumulative_average_rewards(new_rewards), lo);
}

std::vector<double> barrier_grid(const MixedEquilibriumRO& incumbents) {
  auto grid = linspace(0.0, 1.0, 1001);
  grid.push_back(incumbents.support_max);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

BarrierReport barrier_holds(const MixedEquilibriumRO& incumbents, const RewardVector& new_rewards,
                            std::span<const double> grid) {
  check_entrant_mechanism(incumbents, new_rewards);
  BarrierReport r;
  if (grid.empty()) {
    r.grid = barrier_grid(incumbents);
  } else {
    r.grid.assign(grid.begin(), grid.end());
  }
  const std::size_t m = r.grid.size();
  r.incumbent_cdf.resize(m);
  r.entrant_reward.resize(m);
  r.cost.resize(m);
  parallel_for(m, [&](std::size_t i) {
    const double q = r.grid[i];
    r.incumbent_cdf[i] = cdf_eval(incumbents, q);
    r.entrant_reward[i] = entrant_expected_reward(incumbents, new_rewards, q);
    r.cost[i] = incumbents.cost.eval(q);
  });
  r.max_margin = -std::numeric_limits<double>::infinity();
  r.strict_interior = true;
  for (std::size_t i = 0; i < m; ++i) {
    const double margin = r.entrant_reward[i] - r.cost[i];
    r.max_margin = std::max(r.max_margin, margin);
    const double f = r.incumbent_cdf[i];
    if (f > 0.0 && f < 1.0 && !(margin < -kSlack)) r.strict_interior = false;
  }
  r.holds = r.max_margin <= kSlack;
  r.cost_exceeds_one = incumbents.cost.max_cost() > 1.0;
  return r;
}

EntrantSimulation simulate_entrant_reward(const MixedEquilibriumRO& incumbents,
                                          const RewardVector& new_rewards, double q,
                                          std::size_t draws, std::uint64_t seed) {
  check_entrant_mechanism(incumbents, new_rewards);
  if (draws < 2) throw PreconditionError("simulation needs at least 2 draws");
  const std::size_t n = incumbents.creators();
  const auto qs = sample(incumbents, seed, draws * n);
  UniformSource ties(splitmix64(seed));
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    std::size_t above = 0, tied = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = qs[d * n + k];
      if (x > q) ++above;
      else if (x == q) ++tied;
    }
    const auto offset = std::min(tied, static_cast<std::size_t>(ties.next() * static_cast<double>(tied + 1)));
    const double r = new_rewards[above + offset];
    sum += r;
    sum2 += r * r;
  }
  EntrantSimulation s;
  s.draws = draws;
  s.mean = sum / static_cast<double>(draws);
  const double var = std::max(0.0, sum2 / static_cast<double>(draws) - s.mean * s.mean);
  s.stderr_estimate = std::sqrt(var / static_cast<double>(draws - 1));
  return s;
}

double collapse_bound(const CostSpec& cost, std::size_t n) {
  if (n < 1) throw PreconditionError("collapse bound needs n >= 1");
  if (!cost.is_convex()) throw PreconditionError("collapse bound requires a convex cost");
  const double share = 1.0 / static_cast<double>(n);
  if (share >= cost.max_cost()) return 1.0;
  return cost.inverse(share);
}

}  // namespace entrybar
