#include "entrybar/pm_fee.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "entrybar/error.hpp"
#include "entrybar/numerics.hpp"

namespace entrybar {

namespace {

constexpr double kUtilitySlack = 1e-10;

void attach_norms(FeeSweepRow& row, std::span<const double> p_list) {
  for (double p : p_list) row.pnorms.emplace_back(p, pnorm(row.qualities, p));
}

}  // namespace

double pnorm(std::span<const double> q, double p) {
  if (!(p >= 1.0)) throw PreconditionError("p-norm needs p >= 1");
  double mx = 0.0;
  for (double v : q) {
    if (!(v >= 0.0)) throw PreconditionError("p-norm expects nonnegative entries");
    mx = std::max(mx, v);
  }
  if (std::isinf(p) || mx == 0.0) return mx;
  double s = 0.0;
  for (double v : q) s += std::pow(v / mx, p);
  return mx * std::pow(s, 1.0 / p);
}

FeeSweepRow surviving_equilibrium(std::span<const CostSpec> costs, double fee,
                                  std::span<const double> p_list) {
  if (costs.size() < 2) throw PreconditionError("proportional mechanism needs at least 2 creators");
  if (!(fee >= 0.0) || !std::isfinite(fee)) throw PreconditionError("fee must be nonnegative");
  const std::size_t n = costs.size();
  FeeSweepRow row;
  row.fee = fee;
  row.qualities.assign(n, 0.0);
  row.utilities.assign(n, 0.0);
  row.contributing.assign(n, false);

  std::vector<std::size_t> alive(n);
  std::iota(alive.begin(), alive.end(), 0);
  while (alive.size() >= 2) {
    std::vector<CostSpec> sub;
    for (auto i : alive) sub.push_back(costs[i]);
    const auto eq = solve_pm_ne(sub);
    std::size_t worst = 0;
    for (std::size_t r = 1; r < alive.size(); ++r) {
      // later index wins ties, so scan with <=
      if (eq.utilities[r] <= eq.utilities[worst]) worst = r;
    }
    if (eq.utilities[worst] - fee >= -kUtilitySlack) {
      row.survivors = alive;
      for (std::size_t r = 0; r < alive.size(); ++r) {
        row.qualities[alive[r]] = eq.qualities[r];
        row.utilities[alive[r]] = eq.utilities[r] - fee;
        row.contributing[alive[r]] = eq.qualities[r] > 0.0;
      }
      attach_norms(row, p_list);
      return row;
    }
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  row.degenerate = true;
  if (alive.size() == 1 && 1.0 - fee >= -kUtilitySlack) {
    row.survivors = alive;
    row.utilities[alive[0]] = 1.0 - fee;
  }
  attach_norms(row, p_list);
  return row;
}

std::vector<double> default_fee_grid() { return logspace(1e-4, 1.0, 60); }

FeeSweep fee_sweep(std::span<const CostSpec> costs, std::span<const double> fee_grid,
                   std::span<const double> p_list) {
  if (!std::is_sorted(fee_grid.begin(), fee_grid.end())) {
    throw PreconditionError("fee grid must be ascending");
  }
  FeeSweep sweep;
  sweep.rows.resize(fee_grid.size());
  parallel_for(fee_grid.size(), [&](std::size_t i) {
    sweep.rows[i] = surviving_equilibrium(costs, fee_grid[i], p_list);
  });
  for (std::size_t j = 0; j < p_list.size(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
      if (sweep.rows[i].pnorms[j].second > sweep.rows[best].pnorms[j].second) best = i;
    }
    if (!sweep.rows.empty()) sweep.argmax.emplace_back(p_list[j], best);
  }
  return sweep;
}

}  // namespace entrybar
