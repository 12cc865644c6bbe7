#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "entrybar/error.hpp"
#include "entrybar/numerics.hpp"
#include "entrybar/ro_design.hpp"
#include "oracles.hpp"

using namespace entrybar;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

void check_vec(const RewardVector& got, const std::vector<double>& want, double tol = 1e-12) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}
}  // namespace

TEST_CASE("standard mechanisms") {
  check_vec(final_elimination(3), {0.5, 0.5, 0.0});
  check_vec(final_elimination(2), {1.0, 0.0});
  check_vec(final_elimination(5), {0.25, 0.25, 0.25, 0.25, 0.0});
  CHECK_THROWS_AS(final_elimination(1), PreconditionError);
  check_vec(top1(3), {1.0, 0.0, 0.0});
  check_vec(topk(3, 2), {0.5, 0.5, 0.0});
  check_vec(topk(4, 4), {0.25, 0.25, 0.25, 0.25});
  CHECK_THROWS_AS(topk(3, 0), PreconditionError);
  CHECK_THROWS_AS(topk(3, 4), PreconditionError);
}

TEST_CASE("improvement_move") {
  CHECK_THROWS_AS(improvement_move(RewardVector({0.5, 0.5, 0.0}), 1, 0, 0.1), PreconditionError);
  check_vec(improvement_move(RewardVector({0.6, 0.4, 0.0}), 1, 0, 0.1), {0.5, 0.5, 0.0}, 1e-15);
  check_vec(improvement_move(RewardVector({0.5, 0.3, 0.2}), 0, 2, 0.2), {0.7, 0.3, 0.0}, 1e-15);
  CHECK_THROWS_AS(improvement_move(RewardVector({0.5, 0.3, 0.2}), 0, 2, 0.3), PreconditionError);
  CHECK_THROWS_AS(improvement_move(RewardVector({0.5, 0.3, 0.2}), 1, 1, 0.1), PreconditionError);
  const auto moved = improvement_move(RewardVector({0.5, 0.3, 0.2}), 0, 1, 0.05);
  CHECK(moved.total() == doctest::Approx(1.0));
}

TEST_CASE("budget-exhausting grid matches the reference enumeration") {
  for (int n = 1; n <= 4; ++n) {
    for (double res : {0.05, 0.1, 0.25}) {
      const auto grid = budget_exhausting_grid(n, res);
      const auto ref = oracle::descending_simplex_grid(n, res);
      REQUIRE(grid.size() == ref.size());
      for (std::size_t i = 0; i < grid.size(); ++i) check_vec(grid[i], ref[i], 1e-12);
    }
  }
  CHECK(budget_exhausting_grid(3, 0.05).size() == 44);
  CHECK_THROWS_AS(budget_exhausting_grid(3, 0.03), PreconditionError);
}

TEST_CASE("lp_optimal_search examples") {
  const auto l1 = lp_optimal_search(3, CostSpec::linear(2.0), 1.0, 0.05);
  CHECK(l1.exhaustive);
  check_vec(l1.rewards, {0.5, 0.5, 0.0});
  check_vec(lp_optimal_search(3, CostSpec::linear(2.0), 12.0, 0.05).rewards, {1.0, 0.0, 0.0});
  check_vec(lp_optimal_search(3, CostSpec::scaled_quadratic(1.0), 1.0, 0.05).rewards,
            {0.5, 0.5, 0.0});
  for (double p : {1.0, 2.0, 7.0, kInf}) {
    check_vec(lp_optimal_search(2, CostSpec::linear(1.0), p, 0.05).rewards, {1.0, 0.0});
  }
  CHECK_THROWS_AS(lp_optimal_search(3, CostSpec::linear(0.5), 1.0, 0.05), PreconditionError);
}

TEST_CASE("local search agrees with brute force for n = 5") {
  for (const auto& [cost, p] : {std::pair{CostSpec::scaled_quadratic(1.0), 1.0},
                                std::pair{CostSpec::linear(1.0), kInf},
                                std::pair{CostSpec::scaled_quadratic(2.0), 3.0}}) {
    const auto found = lp_optimal_search(5, cost, p, 0.1, 3);
    CHECK_FALSE(found.exhaustive);
    double best = -1.0;
    for (const auto& a : oracle::descending_simplex_grid(5, 0.1)) {
      best = std::max(best, design_objective(solve_symmetric_ne(RewardVector(a), cost), p));
    }
    CHECK(found.objective >= best - 1e-9);
  }
  check_vec(lp_optimal_search(5, CostSpec::scaled_quadratic(1.0), 1.0, 0.05).rewards,
            {0.25, 0.25, 0.25, 0.25, 0.0});
}

TEST_CASE("Max-Min reallocation traces") {
  check_vec(efrm_max_min(RewardVector({0.5, 0.5, 0.0}), 0.1).reallocated, {0.5, 0.5, 0.3});
  check_vec(efrm_max_min(RewardVector({0.5, 0.5, 0.0}), 0.0).reallocated, {0.5, 0.5, 0.0});
  check_vec(efrm_max_min(RewardVector({1.0, 0.0, 0.0}), 0.5).reallocated, {1.0, 0.75, 0.75});
  // fees beyond the levelling cost are spread over all ranks
  const auto spread = efrm_max_min(RewardVector({0.5, 0.5, 0.0}), 0.3);
  const double level = (1.0 + 0.9) / 3.0;
  check_vec(spread.reallocated, {level, level, level});
  CHECK_THROWS_AS(efrm_max_min(RewardVector({0.5, 0.5, 0.0}), -0.1), PreconditionError);
}

TEST_CASE("Max-Max reallocation traces") {
  const auto out = efrm_max_max(RewardVector({0.5, 0.5, 0.0}), 0.5);
  check_vec(out.reallocated, {1.5, 0.5, 0.5});
  check_vec(out.net_equivalent, {1.0, 0.0, 0.0});
  check_vec(efrm_max_max(RewardVector({0.5, 0.5, 0.0}), 0.0).reallocated, {0.5, 0.5, 0.0});
  const double third = 1.0 / 3.0;
  check_vec(efrm_max_max(RewardVector({third, third, third}), 0.1).reallocated,
            {third + 0.3, third, third});
}

TEST_CASE("efrm_validate") {
  CHECK_FALSE(efrm_validate(RewardVector({1.0, 0.0, 0.0}), RewardVector::unbudgeted({2.0, 0.0, 0.0}), 0.1).valid);
  const auto bad = efrm_validate(RewardVector({1.0, 0.0, 0.0}), RewardVector::unbudgeted({2.0, 0.0, 0.0}), 0.1);
  CHECK(bad.violations.size() >= 3);
  for (double xi : {0.05, 0.2, 0.5, 0.8}) {
    for (double t : linspace(0.0, std::min(0.5, xi), 5)) {
      const auto abar = RewardVector::unbudgeted({0.5 + xi + t, 0.5 + xi - t, xi});
      CHECK(efrm_validate(RewardVector({0.5, 0.5, 0.0}), abar, xi).valid);
    }
  }
}

TEST_CASE("property: both schemes always produce valid reallocations") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7;
    std::vector<double> a(n);
    for (auto& x : a) x = u(rng) * (trial % 3 == 0 ? 0.1 : 1.0);
    std::sort(a.begin(), a.end(), std::greater<>());
    const double s = std::accumulate(a.begin(), a.end(), 0.0);
    for (auto& x : a) x /= s;
    const RewardVector r(a);
    const double xi = u(rng) * 0.6;
    for (auto scheme : {EfrmScheme::kMaxMin, EfrmScheme::kMaxMax}) {
      const auto out = efrm_reallocate(r, xi, scheme);
      const auto check = efrm_validate(r, out.reallocated, xi);
      CHECK(check.valid);
      // every collected fee is handed back
      CHECK(out.reallocated.total() == doctest::Approx(r.total() + n * xi).epsilon(1e-12));
    }
  }
}

TEST_CASE("efrm_evaluate examples") {
  const RewardVector top2({0.5, 0.5, 0.0});
  const auto mm = efrm_evaluate(top2, CostSpec::linear(1.0), 0.5, EfrmScheme::kMaxMax);
  CHECK(std::abs(mm.metrics_before->linf - 0.45) < 1e-6);
  CHECK(std::abs(mm.metrics_after->linf - 0.6) < 1e-6);
  // the bottom reward equals the fee here, so the played equilibrium agrees
  CHECK(std::abs(mm.equilibrium_after->linf - 0.6) < 1e-6);

  for (auto scheme : {EfrmScheme::kMaxMin, EfrmScheme::kMaxMax}) {
    const auto same = efrm_evaluate(top2, CostSpec::scaled_quadratic(1.0), 0.0, scheme);
    CHECK(same.metrics_after->l1 == doctest::Approx(same.metrics_before->l1).epsilon(1e-12));
    CHECK(same.metrics_after->linf == doctest::Approx(same.metrics_before->linf).epsilon(1e-12));
  }

  const auto lm = efrm_evaluate(top2, CostSpec::scaled_quadratic(1.0), 0.1, EfrmScheme::kMaxMin);
  CHECK(lm.metrics_after->l1 >= lm.metrics_before->l1);
  CHECK(efrm_scheme_from_string("max-min") == EfrmScheme::kMaxMin);
  CHECK(to_string(EfrmScheme::kMaxMax) == "max-max");
  CHECK_THROWS_AS(efrm_scheme_from_string("min-max"), PreconditionError);
}

TEST_CASE("Max-Min beats every lattice reallocation on the l1 objective") {
  const auto cost = CostSpec::scaled_quadratic(1.0);
  const RewardVector alpha({0.5, 0.5, 0.0});
  for (double xi : {0.1, 0.3}) {
    const auto mm = efrm_evaluate(alpha, cost, xi, EfrmScheme::kMaxMin);
    double best = -1.0;
    for (const auto& abar : oracle::efrm_reallocation_grid(alpha.vec(), xi, 0.05)) {
      std::vector<double> net(abar.size());
      for (std::size_t i = 0; i < net.size(); ++i) net[i] = abar[i] - xi;
      best = std::max(best, reformulated_metrics(RewardVector::unbudgeted(net), cost).l1);
    }
    CHECK(mm.metrics_after->l1 >= best - 1e-9);
  }
}
