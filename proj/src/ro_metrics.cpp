#include "entrybar/ro_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "entrybar/error.hpp"
#include "entrybar/numerics.hpp"

namespace entrybar {

namespace {

constexpr QuadratureOptions kMetricQuadrature{1e-8, 10000};

struct QuantileView {
  std::function<double(double)> quantile;
  double continuous_mass;  // 1 - y
  double atom_mass;        // y, located at q = 1
  std::size_t n;
};

QuantileView view_of(const MixedEquilibriumRO& eq) {
  return {[&eq](double u) { return quantile_eval(eq, u); },
          eq.regime == RoRegime::kAllPerfect ? 0.0 : 1.0 - eq.atom_mass,
          eq.regime == RoRegime::kAllPerfect ? 1.0 : eq.atom_mass,
          eq.creators()};
}

double moment(const QuantileView& v, double p) {
  double value = v.atom_mass;
  if (v.continuous_mass > 0.0) {
    value += integrate(
        [&](double u) { return p == 1.0 ? v.quantile(u) : std::pow(v.quantile(u), p); },
        0.0, v.continuous_mass, kMetricQuadrature);
  }
  return value;
}

double expected_max(const QuantileView& v) {
  const double n = static_cast<double>(v.n);
  double value = 1.0 - std::pow(v.continuous_mass, n);
  if (v.continuous_mass > 0.0) {
    value += n * integrate(
                     [&](double t) {
                       return std::pow(t, n - 1.0) * v.quantile(t);
                     },
                     0.0, v.continuous_mass, kMetricQuadrature);
  }
  return value;
}

MetricReport report_of(const QuantileView& v, std::span<const double> p_list) {
  MetricReport r;
  r.method = MetricMethod::kQuadrature;
  r.l1 = moment(v, 1.0);
  r.linf = expected_max(v);
  for (double p : p_list) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
      throw PreconditionError("lp objective needs finite p >= 1");
    }
    r.lp.push_back({p, moment(v, p), std::nullopt});
  }
  return r;
}

}  // namespace

std::string to_string(MetricMethod method) {
  return method == MetricMethod::kQuadrature ? "quadrature" : "monte_carlo";
}

double LpEntry::norm() const { return std::pow(objective, 1.0 / p); }

double l1_metric(const MixedEquilibriumRO& eq) { return moment(view_of(eq), 1.0); }

double linf_metric(const MixedEquilibriumRO& eq) {
  return expected_max(view_of(eq));
}

double lp_objective(const MixedEquilibriumRO& eq, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw PreconditionError("lp objective needs finite p >= 1");
  }
  return moment(view_of(eq), p);
}

MetricReport quadrature_metrics(const MixedEquilibriumRO& eq,
                                std::span<const double> p_list) {
  return report_of(view_of(eq), p_list);
}

MetricReport reformulated_metrics(const RewardVector& rewards,
                                  const CostSpec& cost,
                                  std::span<const double> p_list) {
  const double c1 = cost.max_cost();
  if (rewards.top() > c1 + 1e-12) {
    throw PreconditionError(
        "reformulated metrics need alpha_1 <= c(1) (interior regime)");
  }
  QuantileView v{[&](double u) {
                   return cost.inverse(
                       std::min(rank_reward_expectation(rewards, u), c1));
                 },
                 1.0, 0.0, rewards.size()};
  return report_of(v, p_list);
}

MetricReport mc_metrics(const MixedEquilibriumRO& eq,
                        std::span<const double> p_list, std::size_t samples,
                        std::uint64_t seed) {
  if (samples < 1000) {
    throw PreconditionError("Monte Carlo metrics need at least 1000 samples");
  }
  constexpr std::size_t kChunks = 64;
  const std::size_t n = eq.creators();
  const std::size_t np = p_list.size();

  struct Sums {
    double q = 0, q2 = 0, mx = 0, mx2 = 0;
    std::vector<double> qp, qp2;
  };
  std::vector<Sums> partial(kChunks);
  std::uint64_t seed_state = seed;
  std::vector<std::uint64_t> chunk_seeds(kChunks);
  for (auto& s : chunk_seeds) s = splitmix64(seed_state);

  parallel_for(kChunks, [&](std::size_t c) {
    const std::size_t begin = samples * c / kChunks;
    const std::size_t end = samples * (c + 1) / kChunks;
    UniformSource rng(chunk_seeds[c]);
    Sums s;
    s.qp.assign(np, 0.0);
    s.qp2.assign(np, 0.0);
    for (std::size_t k = begin; k < end; ++k) {
      double best = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double q = quantile_eval(eq, rng.next());
        s.q += q;
        s.q2 += q * q;
        for (std::size_t j = 0; j < np; ++j) {
          const double v = std::pow(q, p_list[j]);
          s.qp[j] += v;
          s.qp2[j] += v * v;
        }
        best = std::max(best, q);
      }
      s.mx += best;
      s.mx2 += best * best;
    }
    partial[c] = std::move(s);
  });

  Sums total;
  total.qp.assign(np, 0.0);
  total.qp2.assign(np, 0.0);
  for (const auto& s : partial) {
    total.q += s.q;
    total.q2 += s.q2;
    total.mx += s.mx;
    total.mx2 += s.mx2;
    for (std::size_t j = 0; j < np; ++j) {
      total.qp[j] += s.qp[j];
      total.qp2[j] += s.qp2[j];
    }
  }
  auto mean_and_se = [](double sum, double sum2, double count) {
    const double mean = sum / count;
    const double var = std::max(0.0, sum2 / count - mean * mean);
    return std::pair{mean, std::sqrt(var * count / (count - 1.0) / count)};
  };
  const double draws = static_cast<double>(samples * n);
  MetricReport r;
  r.method = MetricMethod::kMonteCarlo;
  auto [l1, l1_se] = mean_and_se(total.q, total.q2, draws);
  auto [mx, mx_se] = mean_and_se(total.mx, total.mx2, static_cast<double>(samples));
  r.l1 = l1;
  r.l1_stderr = l1_se;
  r.linf = mx;
  r.linf_stderr = mx_se;
  for (std::size_t j = 0; j < np; ++j) {
    auto [m, se] = mean_and_se(total.qp[j], total.qp2[j], draws);
    r.lp.push_back({p_list[j], m, se});
  }
  return r;
}

}  // namespace entrybar
