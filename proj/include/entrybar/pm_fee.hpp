#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "entrybar/cost.hpp"
#include "entrybar/pm_core.hpp"

namespace entrybar {

/// ||q||_p for a nonnegative vector; p = infinity gives the max. Scaled by
/// the max entry so large p does not overflow.
double pnorm(std::span<const double> q, double p);

struct FeeSweepRow {
  double fee = 0.0;
  std::vector<std::size_t> survivors;  // 0-based, ascending
  std::vector<double> qualities;       // all n creators, 0 outside survivors
  std::vector<double> utilities;       // net of fee, survivors only meaningful
  std::vector<bool> contributing;
  std::vector<std::pair<double, double>> pnorms;  // (p, ||q||_p)
  // Fewer than two survivors: a lone creator wins the whole reward with any
  // positive quality, so its quality is reported as the 0 sentinel with
  // utility 1 - fee.
  bool degenerate = false;
};

/// Removes the creator with the lowest net utility (ties: highest index) and
/// re-solves until every remaining creator has u_i - fee >= -1e-10.
FeeSweepRow surviving_equilibrium(std::span<const CostSpec> costs, double fee,
                                  std::span<const double> p_list = {});

struct FeeSweep {
  std::vector<FeeSweepRow> rows;
  std::vector<std::pair<double, std::size_t>> argmax;  // (p, row index)
};

/// 60 log-spaced fees on [1e-4, 1].
std::vector<double> default_fee_grid();

/// Rows for an ascending fee grid, each solved from the full creator set.
FeeSweep fee_sweep(std::span<const CostSpec> costs, std::span<const double> fee_grid,
                   std::span<const double> p_list);

}  // namespace entrybar
