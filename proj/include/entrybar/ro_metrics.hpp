#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entrybar/ro_core.hpp"

namespace entrybar {

enum class MetricMethod { kQuadrature, kMonteCarlo };

std::string to_string(MetricMethod method);

struct LpEntry {
  double p = 1.0;
  double objective = 0.0;  // E[q^p]
  std::optional<double> stderr_estimate;

  /// (E[q^p])^{1/p}; reported for convenience, optimisation uses objective.
  double norm() const;
};

/// Quality benchmarks of a symmetric rank-order equilibrium.
struct MetricReport {
  double l1 = 0.0;    // E[q] per creator
  double linf = 0.0;  // E[max_i q_i] over the n creators
  std::vector<LpEntry> lp;
  MetricMethod method = MetricMethod::kQuadrature;
  std::optional<double> l1_stderr;
  std::optional<double> linf_stderr;
};

/// E[q] by quadrature of the quantile function; the atom at q = 1 (Split,
/// AllPerfect) contributes its mass exactly.
double l1_metric(const MixedEquilibriumRO& eq);
/// E[max] = n * int t^{n-1} Q(t) dt plus 1 - (1-y)^n for the atom.
double linf_metric(const MixedEquilibriumRO& eq);
/// E[q^p] = int Q(u)^p du plus the atom mass.
double lp_objective(const MixedEquilibriumRO& eq, double p);

MetricReport quadrature_metrics(const MixedEquilibriumRO& eq,
                                std::span<const double> p_list = {});

/// Monte Carlo oracle: `samples` independent n-creator profiles, split into a
/// fixed number of seeded chunks so results do not depend on the thread
/// count. Requires samples >= 1000.
MetricReport mc_metrics(const MixedEquilibriumRO& eq,
                        std::span<const double> p_list, std::size_t samples,
                        std::uint64_t seed);

/// Quantile-integral benchmarks of a reward vector taken as written:
/// Q(u) = c^{-1}(h_n(A, u)) with no bottom-reward shift. This is the
/// objective the mechanism-design results optimise; for alpha_n = 0 it equals
/// the equilibrium metrics. Requires alpha_1 <= c(1).
MetricReport reformulated_metrics(const RewardVector& rewards,
                                  const CostSpec& cost,
                                  std::span<const double> p_list = {});

}  // namespace entrybar
