#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entrybar/cost.hpp"
#include "entrybar/ro_core.hpp"
#include "entrybar/ro_metrics.hpp"

namespace entrybar {

/// alpha_i = 1/(n-1) for i < n, alpha_n = 0.
RewardVector final_elimination(std::size_t n);
RewardVector top1(std::size_t n);
/// Equal shares 1/k for the best k creators.
RewardVector topk(std::size_t n, std::size_t k);

/// Moves delta of reward from rank `loss` to rank `gain` (0-based). Throws
/// PreconditionError when the result is not descending and nonnegative.
RewardVector improvement_move(const RewardVector& rewards, std::size_t gain,
                              std::size_t loss, double delta);

/// All descending vectors of length n whose entries are multiples of
/// `resolution` and sum to 1. 1/resolution must be an integer.
std::vector<RewardVector> budget_exhausting_grid(std::size_t n, double resolution);

/// p = 1 gives l1, p = infinity gives linf, otherwise E[q^p].
double design_objective(const MixedEquilibriumRO& eq, double p);

struct LpSearchResult {
  RewardVector rewards{std::vector<double>{1.0}};
  double objective = 0.0;
  std::size_t evaluated = 0;
  bool exhaustive = true;
};

/// Best budget-exhausting grid mechanism for design_objective at p.
/// Exhaustive for n <= 4, otherwise seeded local search over
/// improvement_move steps of one grid unit with random restarts. Ties within
/// 1e-9 go to the lexicographically smallest vector. Requires c(1) >= 1 so
/// every candidate is an Interior equilibrium.
LpSearchResult lp_optimal_search(std::size_t n, const CostSpec& cost, double p,
                                 double resolution, std::uint64_t seed = 1);

enum class EfrmScheme { kMaxMin, kMaxMax };

std::string to_string(EfrmScheme scheme);
EfrmScheme efrm_scheme_from_string(const std::string& text);

struct EfrmOutcome {
  double entry_fee = 0.0;
  EfrmScheme scheme = EfrmScheme::kMaxMin;
  RewardVector original{std::vector<double>{1.0}};
  RewardVector reallocated{std::vector<double>{1.0}};     // may exceed the budget
  RewardVector net_equivalent{std::vector<double>{1.0}};  // reallocated - fee
  std::optional<MetricReport> metrics_before;
  std::optional<MetricReport> metrics_after;
  // Metrics of the symmetric equilibrium actually played under the
  // reallocated rewards. Equal to metrics_after when the bottom reward
  // lands exactly on the fee.
  std::optional<MetricReport> equilibrium_after;
};

/// Raises every rank to the fee, then water-fills the remaining fees from the
/// bottom rank upwards.
EfrmOutcome efrm_max_min(const RewardVector& rewards, double fee);
/// Raises every rank to the fee, then gives the remaining fees to rank 1.
EfrmOutcome efrm_max_max(const RewardVector& rewards, double fee);
EfrmOutcome efrm_reallocate(const RewardVector& rewards, double fee, EfrmScheme scheme);

struct EfrmValidation {
  bool valid = true;
  std::vector<std::string> violations;
};

/// abar_i >= max(fee, alpha_i), sum(abar - alpha) <= n * fee, abar
/// descending; 1e-12 slack.
EfrmValidation efrm_validate(const RewardVector& original,
                             const RewardVector& reallocated, double fee);

/// Reallocates and fills in metrics. Before and after use the quantile
/// objective int c^{-1}(h_n(A, u)) du on the original and the net-of-fee
/// vector; equilibrium_after is the equilibrium of the reallocated rewards.
EfrmOutcome efrm_evaluate(const RewardVector& rewards, const CostSpec& cost,
                          double fee, EfrmScheme scheme,
                          std::span<const double> p_list = {});

}  // namespace entrybar
