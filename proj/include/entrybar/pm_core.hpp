#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "entrybar/cost.hpp"

namespace entrybar {

struct ShareSolution {
  std::vector<double> shares;
  std::vector<bool> excluded;  // beta * c_i'(0) >= 1: priced out at this beta
  std::vector<bool> capped;    // the root would need quality above 1
};

/// Solves x_i + beta * c_i'(beta * x_i) = 1 for each creator, x_i in [0, 1]
/// with beta * x_i <= 1. Bisection to 1e-14.
ShareSolution shares_given_beta(std::span<const CostSpec> costs, double beta);

/// Pure equilibrium of the proportional mechanism q_i / sum_j q_j.
struct PureEquilibriumPM {
  std::vector<double> qualities;
  double aggregate = 0.0;  // beta = sum q
  std::vector<double> shares;
  std::vector<std::size_t> contributing;  // 0-based, ascending
  std::vector<double> utilities;          // share - c_i(q_i)
};

struct PmSolveOptions {
  // Multiplies the initial upper bracket for beta; any positive value reaches
  // the same root.
  double bracket_scale = 1.0;
};

/// Tries contributing prefixes (creators sorted by c_i'(0), stable) from the
/// largest down and returns the first consistent one. Requires n >= 2 convex
/// costs and an equilibrium with every quality <= 1.
PureEquilibriumPM solve_pm_ne(std::span<const CostSpec> costs,
                              const PmSolveOptions& options = {});

std::vector<std::size_t> contributing_set(std::span<const CostSpec> costs);

/// 1 / beta: a creator with c'(0) at or above this level stays out.
double barrier_level(const PureEquilibriumPM& eq);

/// c_j'(0) / sum_i c_i'(0) < 1/(n-1) for all j, or all c_i'(0) = 0. Two
/// creators always both contribute.
bool check_contributing_sufficient(std::span<const CostSpec> costs);

/// Same ratio test on the equilibrium marginal costs c_j'(q_j). Diagnostic
/// only.
bool equilibrium_ratio_condition(const PureEquilibriumPM& eq,
                                 std::span<const CostSpec> costs);

/// Utility of creator i playing q against the others' qualities in
/// `profile`. The reward is 0 when every quality is 0.
double pm_utility(std::span<const CostSpec> costs, std::span<const double> profile,
                  std::size_t i, double q);

/// Max over creators and grid points of u_i(q, q_-i) - u_i(q_i). Default
/// grid: 2001 points on [0, min(1, c_i^{-1}(1))] per creator.
double verify_pm_best_response(const PureEquilibriumPM& eq,
                               std::span<const CostSpec> costs,
                               std::span<const double> grid = {});

}  // namespace entrybar
