// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from closed forms and brute-force oracles in
// the test tree, not from the library paths under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "entrybar/numerics.hpp"
#include "entrybar/pm_core.hpp"
#include "entrybar/pm_fee.hpp"
#include "entrybar/ro_barrier.hpp"
#include "entrybar/ro_core.hpp"
#include "entrybar/ro_design.hpp"
#include "entrybar/ro_metrics.hpp"
#include "oracles.hpp"
#include "pm_instances.hpp"

using namespace entrybar;

namespace {

const double kInf = std::numeric_limits<double>::infinity();
const RewardVector kTop2{{0.5, 0.5, 0.0}};

// Collects failed sub-checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(12);
      s << what << ": got " << got << ", want " << want << " +/- " << tol;
      failures.push_back(s.str());
    }
  }
};

int g_failed = 0;

void criterion(int id, const std::string& title, double budget_seconds,
               const std::function<void(Check&)>& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("threw: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0 && secs > budget_seconds) {
    c.failures.push_back("runtime " + std::to_string(secs) + " s over budget " +
                         std::to_string(budget_seconds) + " s");
  }
  const bool ok = c.failures.empty();
  if (!ok) ++g_failed;
  std::printf("AC%-2d %s  %s (%.2f s)\n", id, ok ? "PASS" : "FAIL", title.c_str(), secs);
  for (std::size_t i = 0; i < c.failures.size() && i < 10; ++i) {
    std::printf("       - %s\n", c.failures[i].c_str());
  }
  if (c.failures.size() > 10) std::printf("       - ... %zu more\n", c.failures.size() - 10);
  std::fflush(stdout);
}

double grid_max(const std::vector<std::vector<double>>& grid,
                const std::function<double(const std::vector<double>&)>& f) {
  double best = -kInf;
  for (const auto& a : grid) best = std::max(best, f(a));
  return best;
}

std::vector<double> minus(const std::vector<double>& a, double fee) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - fee;
  return out;
}

}  // namespace

int main() {
  criterion(1, "rank-order example 1: interior equilibrium, F(q) = 1 - sqrt(1 - 2q)", 1.0, [](Check& c) {
    const auto eq = solve_symmetric_ne(kTop2, CostSpec::linear(1.0));
    c.expect(eq.regime == RoRegime::kInterior, "case is " + to_string(eq.regime));
    c.near(eq.support_max, 0.5, 1e-9, "support_max");
    for (double q : linspace(0.0, 0.5, 101)) {
      c.near(cdf_eval(eq, q), 1.0 - std::sqrt(1.0 - 2.0 * q), 1e-7, "cdf at " + std::to_string(q));
    }
  });

  criterion(2, "rank-order example 2: all creators perfect, reward 1/3 each", 0, [](Check& c) {
    const auto eq = solve_symmetric_ne(kTop2, CostSpec::linear(0.25));
    c.expect(eq.regime == RoRegime::kAllPerfect, "case is " + to_string(eq.regime));
    c.near(eq.expected_reward, 1.0 / 3.0, 1e-12, "expected reward");
  });

  criterion(3, "rank-order example 3: split equilibrium, y = sqrt(0.6), q_hat = 0.5", 0, [](Check& c) {
    const auto eq = solve_symmetric_ne(kTop2, CostSpec::linear(0.4));
    c.expect(eq.regime == RoRegime::kSplit, "case is " + to_string(eq.regime));
    c.near(eq.atom_mass, std::sqrt(0.6), 1e-8, "atom mass");
    c.near(eq.support_max, 0.5, 1e-8, "q_hat");
    for (double q : linspace(0.0, 0.5, 101)) {
      c.near(cdf_eval(eq, q), 1.0 - std::sqrt(1.0 - 0.8 * q), 1e-7, "cdf at " + std::to_string(q));
    }
  });

  criterion(4, "entry fee 1/2 with Max-Max lifts linf from 0.45 to 0.6", 0, [](Check& c) {
    const auto o = efrm_evaluate(kTop2, CostSpec::linear(1.0), 0.5, EfrmScheme::kMaxMax);
    c.near(linf_metric(solve_symmetric_ne(kTop2, CostSpec::linear(1.0))), 0.45, 1e-6, "linf before");
    c.near(o.metrics_before->linf, 0.45, 1e-6, "reported linf before");
    c.near(o.metrics_after->linf, 0.6, 1e-6, "linf after");
  });

  criterion(5, "proportional mechanism: (0.5, 0.5, 0), creator 3 priced out at level 1", 0, [](Check& c) {
    const std::vector<CostSpec> costs = {CostSpec::quadratic_plus_linear(0.5, 0.0),
                                         CostSpec::quadratic_plus_linear(0.5, 0.0),
                                         CostSpec::quadratic_plus_linear(0.5, 4.0)};
    const auto eq = solve_pm_ne(costs);
    c.near(eq.qualities[0], 0.5, 1e-8, "q1");
    c.near(eq.qualities[1], 0.5, 1e-8, "q2");
    c.near(eq.qualities[2], 0.0, 1e-8, "q3");
    c.expect(eq.contributing == std::vector<std::size_t>{0, 1}, "contributing set is not {1, 2}");
    c.near(barrier_level(eq), 1.0, 1e-8, "barrier level");
  });

  criterion(6, "structural entry barrier for an extra creator (grid + Monte Carlo)", 10.0, [](Check& c) {
    const RewardVector entrant({0.5, 0.5, 0.0, 0.0});
    std::uint64_t seed = 11;
    for (double slope : {1.0, 0.25, 0.4}) {
      const auto eq = solve_symmetric_ne(kTop2, CostSpec::linear(slope));
      const std::string tag = "slope " + std::to_string(slope);
      const auto r = barrier_holds(eq, entrant);
      c.expect(r.grid.size() >= 1001, tag + ": grid too small");
      c.expect(r.holds, tag + ": entrant margin positive, max " + std::to_string(r.max_margin));
      c.expect(r.strict_interior, tag + ": margin not strict where 0 < F < 1");
      for (double q : {0.05, 0.2, 0.375, 0.49, 0.75, 1.0}) {
        const double exact = entrant_expected_reward(eq, entrant, q);
        if (q < 1.0 || eq.atom_mass == 0.0) {
          c.near(oracle::h_sum(entrant.vec(), cdf_eval(eq, q)), exact, 1e-12,
                 tag + ": binomial sum at " + std::to_string(q));
        }
        const auto sim = simulate_entrant_reward(eq, entrant, q, 100000, seed++);
        c.expect(std::abs(sim.mean - exact) <= 4 * sim.stderr_estimate + 1e-12,
                 tag + ": Monte Carlo disagrees at q = " + std::to_string(q));
      }
    }
  });

  criterion(7, "n = 3 grid certificates: final elimination l1-optimal, Top-1 linf- and L12-optimal", 60.0,
            [](Check& c) {
    const auto cost = CostSpec::scaled_quadratic(1.0);
    const auto grid = oracle::descending_simplex_grid(3, 0.05);
    const auto obj = [&](double p) {
      return [&, p](const std::vector<double>& a) {
        return design_objective(solve_symmetric_ne(RewardVector(a), cost), p);
      };
    };
    const auto eval = [&](const RewardVector& r, double p) {
      return design_objective(solve_symmetric_ne(r, cost), p);
    };
    const double l1_max = grid_max(grid, obj(1.0));
    const double linf_max = grid_max(grid, obj(kInf));
    const double l12_max = grid_max(grid, obj(12.0));
    c.expect(eval(final_elimination(3), 1.0) >= l1_max - 1e-9, "final elimination below grid l1 max");
    c.expect(eval(top1(3), kInf) >= linf_max - 1e-9, "Top-1 below grid linf max");
    c.expect(eval(top1(3), 12.0) >= l12_max - 1e-9, "Top-1 below grid L12 max");
    c.expect(grid.size() == 44, "grid has " + std::to_string(grid.size()) + " vectors");
  });

  criterion(8, "entry-fee certificates: Max-Min l1-optimal, Max-Max linf-optimal over valid reallocations",
            120.0, [](Check& c) {
    const auto convex = CostSpec::scaled_quadratic(1.0);
    const auto shifted = CostSpec::quadratic_plus_linear(1.0, 2.0);  // (q + 1)^2 - 1
    c.expect(satisfies_linf_condition(shifted, linspace(0.0, 1.0, 1001)), "c'' <= c'^2 fails");
    for (const auto& alpha : {std::vector<double>{0.5, 0.5, 0.0}, std::vector<double>{1.0, 0.0, 0.0},
                              std::vector<double>{0.6, 0.3, 0.1}}) {
      const RewardVector original(alpha);
      for (double fee : {0.1, 0.3}) {
        const std::string tag = "alpha (" + std::to_string(alpha[0]) + ", " + std::to_string(alpha[1]) +
                                ", " + std::to_string(alpha[2]) + ") fee " + std::to_string(fee);
        const auto grid = oracle::efrm_reallocation_grid(alpha, fee, 0.05);
        c.expect(!grid.empty(), tag + ": empty reallocation grid");
        const double l1_max = grid_max(grid, [&](const std::vector<double>& abar) {
          return reformulated_metrics(RewardVector::unbudgeted(minus(abar, fee)), convex).l1;
        });
        const double linf_max = grid_max(grid, [&](const std::vector<double>& abar) {
          return reformulated_metrics(RewardVector::unbudgeted(minus(abar, fee)), shifted).linf;
        });
        const auto mm = efrm_evaluate(original, convex, fee, EfrmScheme::kMaxMin);
        const auto mx = efrm_evaluate(original, shifted, fee, EfrmScheme::kMaxMax);
        c.expect(efrm_validate(original, mm.reallocated, fee).valid, tag + ": Max-Min invalid");
        c.expect(efrm_validate(original, mx.reallocated, fee).valid, tag + ": Max-Max invalid");
        c.expect(mm.metrics_after->l1 >= l1_max - 1e-9,
                 tag + ": Max-Min l1 " + std::to_string(mm.metrics_after->l1) + " < grid " +
                     std::to_string(l1_max));
        c.expect(mx.metrics_after->linf >= linf_max - 1e-9,
                 tag + ": Max-Max linf " + std::to_string(mx.metrics_after->linf) + " < grid " +
                     std::to_string(linf_max));
      }
    }
  });

  criterion(9, "30-creator fee sweep: total quality falls, p = 2, 5, inf peak at an interior fee", 60.0,
            [](Check& c) {
    const auto costs = pm_fixture::figure_costs(30);
    const std::vector<double> ps{1.0, 2.0, 5.0, kInf};
    const auto sweep = fee_sweep(costs, default_fee_grid(), ps);
    c.expect(sweep.rows.size() == 60, "sweep has " + std::to_string(sweep.rows.size()) + " rows");
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
      c.expect(sweep.rows[i].pnorms[0].second <= sweep.rows[i - 1].pnorms[0].second + 1e-12,
               "l1 rises at fee " + std::to_string(sweep.rows[i].fee));
    }
    for (std::size_t j = 1; j < ps.size(); ++j) {
      double best = -1.0;
      for (const auto& row : sweep.rows) best = std::max(best, row.pnorms[j].second);
      const double first = sweep.rows.front().pnorms[j].second;
      const double last = sweep.rows.back().pnorms[j].second;
      c.expect(best > first && best > last,
               "p = " + std::to_string(ps[j]) + " has no interior peak");
    }
  });

  criterion(10, "invariant suites: FOC, best responses, Beta identity, survivor sets", 0, [](Check& c) {
    std::mt19937_64 rng(20240);
    // first-order conditions and best responses of random PM instances
    for (int trial = 0; trial < 50; ++trial) {
      const auto costs = pm_fixture::random_costs(rng, 2 + trial % 9);
      const auto eq = solve_pm_ne(costs);
      for (auto i : eq.contributing) {
        const double foc = eq.shares[i] + eq.aggregate * costs[i].deriv(eq.qualities[i]);
        c.near(foc, 1.0, 1e-8, "PM first-order condition, instance " + std::to_string(trial));
      }
      c.expect(verify_pm_best_response(eq, costs) <= 1e-6,
               "PM best response, instance " + std::to_string(trial));
    }
    // best responses of rank-order equilibria across all three cases
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto deviations = linspace(0.0, 1.0, 1001);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + trial % 6;
      std::vector<double> a(n);
      for (auto& x : a) x = u(rng);
      std::sort(a.begin(), a.end(), std::greater<>());
      const double s = std::accumulate(a.begin(), a.end(), 0.0);
      for (auto& x : a) x /= s;
      const double slope = 0.05 + 1.5 * u(rng);
      const auto eq = solve_symmetric_ne(RewardVector(a), CostSpec::linear(slope));
      c.expect(verify_best_response(eq, deviations) <= 1e-6,
               "RO best response, instance " + std::to_string(trial) + " (" + to_string(eq.regime) + ")");
    }
    // l1 = sum(alpha) / (n * slope) for linear costs and a zero bottom reward
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + trial % 8;
      std::vector<double> a(n);
      for (auto& x : a) x = u(rng);
      a.back() = 0.0;
      std::sort(a.begin(), a.end(), std::greater<>());
      const double s = std::accumulate(a.begin(), a.end(), 0.0);
      for (auto& x : a) x /= s;
      const double slope = 1.0 + 3.0 * u(rng);
      c.near(l1_metric(solve_symmetric_ne(RewardVector(a), CostSpec::linear(slope))), 1.0 / (n * slope),
             1e-8, "Beta identity, instance " + std::to_string(trial));
    }
    // survivor sets against brute force over all subsets
    std::uniform_real_distribution<double> fee_dist(0.0, 0.3);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + trial % 5;
      const double fee = trial % 5 == 0 ? 0.0 : fee_dist(rng);
      const auto mixed = pm_fixture::random_costs(rng, n);
      const auto row = surviving_equilibrium(mixed, fee);
      const auto family = pm_fixture::stable_maximal_sets(mixed, fee);
      c.expect(std::find(family.begin(), family.end(), row.survivors) != family.end(),
               "survivors not a stable maximal set, mixed instance " + std::to_string(trial));
      const auto ordered = pm_fixture::ordered_costs(rng, n);
      const auto orow = surviving_equilibrium(ordered, fee);
      const auto ofam = pm_fixture::stable_maximal_sets(ordered, fee);
      c.expect(orow.survivors == *std::min_element(ofam.begin(), ofam.end()),
               "survivors differ from brute force, ordered instance " + std::to_string(trial));
    }
  });

  std::printf("%d of 10 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
