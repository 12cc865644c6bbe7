#include "entrybar/pm_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "entrybar/error.hpp"
#include "entrybar/numerics.hpp"

namespace entrybar {

namespace {

constexpr double kExclusionSlack = 1e-10;
constexpr double kBetaCap = 1073741824.0;  // 2^30

void check_costs(std::span<const CostSpec> costs) {
  if (costs.size() < 2) throw PreconditionError("proportional mechanism needs at least 2 creators");
  for (const auto& c : costs) {
    if (!c.is_convex()) throw PreconditionError("proportional mechanism needs convex costs");
  }
}

double share_for(const CostSpec& c, double beta, bool& excluded, bool& capped) {
  excluded = beta * c.deriv(0.0) >= 1.0;
  capped = false;
  if (excluded) return 0.0;
  const double cap = std::min(1.0, 1.0 / beta);
  const auto g = [&](double x) { return x + beta * c.deriv(std::min(1.0, beta * x)); };
  if (g(cap) < 1.0) {
    capped = true;
    return cap;
  }
  return bisect_nondecreasing(g, 1.0, 0.0, cap);
}

double share_sum(std::span<const CostSpec> costs, double beta) {
  double s = 0.0;
  bool e = false, c = false;
  for (const auto& cost : costs) s += share_for(cost, beta, e, c);
  return s;
}

}  // namespace

ShareSolution shares_given_beta(std::span<const CostSpec> costs, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw PreconditionError("beta must be positive");
  ShareSolution s;
  s.shares.resize(costs.size());
  s.excluded.resize(costs.size());
  s.capped.resize(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) {
    bool e = false, c = false;
    s.shares[i] = share_for(costs[i], beta, e, c);
    s.excluded[i] = e;
    s.capped[i] = c;
  }
  return s;
}

PureEquilibriumPM solve_pm_ne(std::span<const CostSpec> costs, const PmSolveOptions& options) {
  check_costs(costs);
  if (!(options.bracket_scale > 0.0)) throw PreconditionError("bracket scale must be positive");
  const std::size_t n = costs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return costs[a].deriv(0.0) < costs[b].deriv(0.0);
  });

  for (std::size_t k = n; k >= 2; --k) {
    std::vector<CostSpec> prefix;
    double slope_sum = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      prefix.push_back(costs[order[r]]);
      slope_sum += costs[order[r]].deriv(0.0);
    }
    double hi = slope_sum > 0.0 ? static_cast<double>(k - 1) / slope_sum : 1.0;
    hi *= options.bracket_scale;
    while (share_sum(prefix, hi) > 1.0) {
      hi *= 2.0;
      if (hi > kBetaCap) throw ConvergenceError("no bracket for the aggregate quality");
    }
    const double beta = bisect_nondecreasing(
        [&](double b) { return -share_sum(prefix, b); }, -1.0, 0.0, hi);
    if (!(beta > 0.0)) continue;
    const auto sol = shares_given_beta(prefix, beta);
    const bool all_positive =
        std::all_of(sol.shares.begin(), sol.shares.end(), [](double x) { return x > 0.0; });
    if (!all_positive) continue;
    bool outsiders_ok = true;
    for (std::size_t r = k; r < n; ++r) {
      if (1.0 / beta > costs[order[r]].deriv(0.0) + kExclusionSlack) outsiders_ok = false;
    }
    if (!outsiders_ok) continue;
    if (std::any_of(sol.capped.begin(), sol.capped.end(), [](bool c) { return c; })) {
      throw PreconditionError("equilibrium quality would exceed 1; costs are too low");
    }

    PureEquilibriumPM eq;
    eq.aggregate = beta;
    eq.qualities.assign(n, 0.0);
    eq.shares.assign(n, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
      eq.shares[order[r]] = sol.shares[r];
      eq.qualities[order[r]] = beta * sol.shares[r];
      eq.contributing.push_back(order[r]);
    }
    std::sort(eq.contributing.begin(), eq.contributing.end());
    eq.utilities.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      eq.utilities[i] = eq.shares[i] - costs[i].eval(eq.qualities[i]);
    }
    return eq;
  }
  throw ConsistencyError("no contributing set satisfies the equilibrium conditions");
}

std::vector<std::size_t> contributing_set(std::span<const CostSpec> costs) {
  return solve_pm_ne(costs).contributing;
}

double barrier_level(const PureEquilibriumPM& eq) {
  if (!(eq.aggregate > 0.0)) throw PreconditionError("barrier level needs a positive aggregate");
  return 1.0 / eq.aggregate;
}

bool check_contributing_sufficient(std::span<const CostSpec> costs) {
  check_costs(costs);
  const std::size_t n = costs.size();
  if (n == 2) return true;
  double total = 0.0;
  for (const auto& c : costs) total += c.deriv(0.0);
  if (total == 0.0) return true;
  const double bound = 1.0 / static_cast<double>(n - 1);
  return std::all_of(costs.begin(), costs.end(),
                     [&](const CostSpec& c) { return c.deriv(0.0) / total < bound; });
}

bool equilibrium_ratio_condition(const PureEquilibriumPM& eq, std::span<const CostSpec> costs) {
  const std::size_t n = costs.size();
  if (n < 2 || eq.qualities.size() != n) throw PreconditionError("equilibrium and costs differ in size");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += costs[i].deriv(eq.qualities[i]);
  if (total == 0.0) return true;
  const double bound = 1.0 / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(costs[j].deriv(eq.qualities[j]) / total < bound)) return false;
  }
  return true;
}

double pm_utility(std::span<const CostSpec> costs, std::span<const double> profile,
                  std::size_t i, double q) {
  double others = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (j != i) others += profile[j];
  }
  const double total = others + q;
  const double reward = total > 0.0 ? q / total : 0.0;
  return reward - costs[i].eval(q);
}

double verify_pm_best_response(const PureEquilibriumPM& eq, std::span<const CostSpec> costs,
                               std::span<const double> grid) {
  check_costs(costs);
  if (eq.qualities.size() != costs.size()) {
    throw PreconditionError("equilibrium and costs differ in size");
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const double base = pm_utility(costs, eq.qualities, i, eq.qualities[i]);
    std::vector<double> own;
    if (grid.empty()) {
      const double cap = costs[i].max_cost() > 1.0 ? costs[i].inverse(1.0) : 1.0;
      own = linspace(0.0, cap, 2001);
    } else {
      own.assign(grid.begin(), grid.end());
    }
    for (double q : own) worst = std::max(worst, pm_utility(costs, eq.qualities, i, q) - base);
  }
  return worst;
}

}  // namespace entrybar
