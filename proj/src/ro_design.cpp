#include "entrybar/ro_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "entrybar/error.hpp"
#include "entrybar/numerics.hpp"

namespace entrybar {

namespace {

constexpr double kSlack = 1e-12;
constexpr double kObjectiveTie = 1e-9;

std::size_t grid_units(double resolution) {
  if (!(resolution > 0.0) || resolution > 1.0) {
    throw PreconditionError("resolution must lie in (0, 1]");
  }
  const double m = 1.0 / resolution;
  const double rounded = std::round(m);
  if (std::abs(m - rounded) > 1e-9 * rounded) {
    throw PreconditionError("1/resolution must be an integer");
  }
  return static_cast<std::size_t>(rounded);
}

RewardVector from_units(const std::vector<int>& units, std::size_t m) {
  std::vector<double> a(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    a[i] = static_cast<double>(units[i]) / static_cast<double>(m);
  }
  return RewardVector(std::move(a));
}

// Descending partitions of m into exactly n nonnegative parts.
void partitions(std::size_t n, int remaining, int cap, std::vector<int>& cur,
                std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == n) {
    if (remaining <= cap) {
      cur.push_back(remaining);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  const int slots = static_cast<int>(n - cur.size());
  const int lo = (remaining + slots - 1) / slots;
  for (int v = std::min(cap, remaining); v >= lo; --v) {
    cur.push_back(v);
    partitions(n, remaining - v, v, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> unit_grid(std::size_t n, std::size_t m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  partitions(n, static_cast<int>(m), static_cast<int>(m), cur, out);
  return out;
}

bool better(double obj, const std::vector<double>& a, double best_obj,
            const std::vector<double>& best) {
  if (obj > best_obj + kObjectiveTie) return true;
  if (obj < best_obj - kObjectiveTie) return false;
  return a < best;
}

void fill_remedy(std::vector<double>& a, double fee, double& remaining) {
  for (auto& v : a) {
    if (v < fee) {
      remaining -= fee - v;
      v = fee;
    }
  }
  if (remaining < -kSlack) {
    throw ConsistencyError("entry-fee remedy step overspent the collected fees");
  }
  remaining = std::max(0.0, remaining);
}

void check_fee(double fee) {
  if (!(fee >= 0.0) || !std::isfinite(fee)) {
    throw PreconditionError("entry fee must be finite and nonnegative");
  }
}

EfrmOutcome make_outcome(const RewardVector& rewards, double fee, EfrmScheme scheme,
                         std::vector<double> abar) {
  for (std::size_t i = 1; i < abar.size(); ++i) {
    if (abar[i] > abar[i - 1]) {
      if (abar[i] - abar[i - 1] > kSlack) {
        throw ConsistencyError("reallocated rewards lost descending order");
      }
      abar[i] = abar[i - 1];
    }
  }
  std::vector<double> net(abar.size());
  for (std::size_t i = 0; i < abar.size(); ++i) net[i] = std::max(0.0, abar[i] - fee);
  EfrmOutcome out;
  out.entry_fee = fee;
  out.scheme = scheme;
  out.original = rewards;
  out.reallocated = RewardVector::unbudgeted(std::move(abar));
  out.net_equivalent = RewardVector::unbudgeted(std::move(net));
  return out;
}

// Quantile objective on the vector as written when it is defined, the
// equilibrium metrics otherwise.
MetricReport vector_metrics(const RewardVector& rewards, const CostSpec& cost,
                            std::span<const double> p_list) {
  if (rewards.top() <= cost.max_cost() + kSlack) {
    return reformulated_metrics(rewards, cost, p_list);
  }
  return quadrature_metrics(solve_symmetric_ne(rewards, cost), p_list);
}

}  // namespace

RewardVector final_elimination(std::size_t n) {
  if (n < 2) throw PreconditionError("final elimination needs at least 2 creators");
  std::vector<double> a(n, 1.0 / static_cast<double>(n - 1));
  a.back() = 0.0;
  return RewardVector(std::move(a));
}

RewardVector top1(std::size_t n) { return topk(n, 1); }

RewardVector topk(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw PreconditionError("top-k needs 1 <= k <= n");
  std::vector<double> a(n, 0.0);
  std::fill(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), 1.0 / static_cast<double>(k));
  return RewardVector(std::move(a));
}

RewardVector improvement_move(const RewardVector& rewards, std::size_t gain,
                              std::size_t loss, double delta) {
  const std::size_t n = rewards.size();
  if (gain >= n || loss >= n || gain == loss) {
    throw PreconditionError("improvement move needs two distinct ranks in range");
  }
  if (!(delta >= 0.0)) throw PreconditionError("improvement move needs delta >= 0");
  std::vector<double> a = rewards.vec();
  a[gain] += delta;
  a[loss] -= delta;
  if (a[loss] < 0.0) {
    if (a[loss] < -kSlack) throw PreconditionError("improvement move makes a reward negative");
    a[loss] = 0.0;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (a[i] > a[i - 1]) {
      if (a[i] - a[i - 1] > kSlack) {
        throw PreconditionError("improvement move breaks descending order");
      }
      a[i] = a[i - 1];
    }
  }
  return rewards.budgeted() ? RewardVector(std::move(a)) : RewardVector::unbudgeted(std::move(a));
}

std::vector<RewardVector> budget_exhausting_grid(std::size_t n, double resolution) {
  if (n < 1) throw PreconditionError("grid needs at least one creator");
  const std::size_t m = grid_units(resolution);
  std::vector<RewardVector> out;
  for (const auto& u : unit_grid(n, m)) out.push_back(from_units(u, m));
  return out;
}

double design_objective(const MixedEquilibriumRO& eq, double p) {
  if (std::isinf(p) && p > 0) return linf_metric(eq);
  if (p == 1.0) return l1_metric(eq);
  return lp_objective(eq, p);
}

LpSearchResult lp_optimal_search(std::size_t n, const CostSpec& cost, double p,
                                 double resolution, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("search needs at least one creator");
  if (!(p >= 1.0)) throw PreconditionError("p must be >= 1");
  if (cost.max_cost() < 1.0 - kSlack) {
    throw PreconditionError("search requires c(1) >= 1 so every candidate is Interior");
  }
  const std::size_t m = grid_units(resolution);
  const auto score = [&](const std::vector<int>& u) {
    return design_objective(solve_symmetric_ne(from_units(u, m), cost), p);
  };

  LpSearchResult result;
  if (n <= 4) {
    const auto grid = unit_grid(n, m);
    std::vector<double> obj(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { obj[i] = score(grid[i]); });
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (better(obj[i], from_units(grid[i], m).vec(), obj[best], from_units(grid[best], m).vec())) {
        best = i;
      }
    }
    result.rewards = from_units(grid[best], m);
    result.objective = obj[best];
    result.evaluated = grid.size();
    result.exhaustive = true;
    return result;
  }

  // Local search: starts from Top-1, final elimination and seeded random
  // grid points; steps move one grid unit between two ranks.
  constexpr int kRandomStarts = 8;
  std::vector<std::vector<int>> starts;
  std::vector<int> t1(n, 0);
  t1[0] = static_cast<int>(m);
  starts.push_back(t1);
  if (m % (n - 1) == 0) {
    std::vector<int> fe(n, static_cast<int>(m / (n - 1)));
    fe.back() = 0;
    starts.push_back(fe);
  }
  UniformSource rng(seed);
  for (int s = 0; s < kRandomStarts; ++s) {
    std::vector<int> cuts(n - 1);
    for (auto& c : cuts) c = static_cast<int>(rng.next() * static_cast<double>(m + 1));
    for (auto& c : cuts) c = std::min(c, static_cast<int>(m));
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> u(n);
    int prev = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      u[i] = cuts[i] - prev;
      prev = cuts[i];
    }
    u[n - 1] = static_cast<int>(m) - prev;
    std::sort(u.begin(), u.end(), std::greater<>());
    starts.push_back(u);
  }

  std::vector<double> best_vec;
  double best_obj = -std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;
  for (auto cur : starts) {
    double cur_obj = score(cur);
    ++evaluated;
    for (;;) {
      std::vector<std::vector<int>> moves;
      for (std::size_t g = 0; g < n; ++g) {
        for (std::size_t l = 0; l < n; ++l) {
          if (g == l || cur[l] == 0) continue;
          auto next = cur;
          ++next[g];
          --next[l];
          if (std::is_sorted(next.begin(), next.end(), std::greater<>())) moves.push_back(next);
        }
      }
      std::vector<double> obj(moves.size());
      parallel_for(moves.size(), [&](std::size_t i) { obj[i] = score(moves[i]); });
      evaluated += moves.size();
      std::size_t pick = moves.size();
      for (std::size_t i = 0; i < moves.size(); ++i) {
        if (obj[i] > cur_obj + kObjectiveTie &&
            (pick == moves.size() || obj[i] > obj[pick])) {
          pick = i;
        }
      }
      if (pick == moves.size()) break;
      cur = moves[pick];
      cur_obj = obj[pick];
    }
    const auto vec = from_units(cur, m).vec();
    if (best_vec.empty() || better(cur_obj, vec, best_obj, best_vec)) {
      best_vec = vec;
      best_obj = cur_obj;
    }
  }
  result.rewards = RewardVector(best_vec);
  result.objective = best_obj;
  result.evaluated = evaluated;
  result.exhaustive = false;
  return result;
}

std::string to_string(EfrmScheme scheme) {
  return scheme == EfrmScheme::kMaxMin ? "max-min" : "max-max";
}

EfrmScheme efrm_scheme_from_string(const std::string& text) {
  if (text == "max-min") return EfrmScheme::kMaxMin;
  if (text == "max-max") return EfrmScheme::kMaxMax;
  throw PreconditionError("unknown EFRM scheme '" + text + "' (max-min, max-max)");
}

EfrmOutcome efrm_max_min(const RewardVector& rewards, double fee) {
  check_fee(fee);
  const std::size_t n = rewards.size();
  std::vector<double> a = rewards.vec();
  double remaining = static_cast<double>(n) * fee;
  fill_remedy(a, fee, remaining);
  // Level the bottom i ranks up to rank n-i while the fees last.
  for (std::size_t i = 1; i < n && remaining > 0.0; ++i) {
    const double level = a[n - 1 - i];
    const double gap = level - a[n - i];
    const double di = static_cast<double>(i);
    if (remaining > di * gap) {
      for (std::size_t k = n - i; k < n; ++k) a[k] = level;
      remaining -= di * gap;
    } else {
      const double raised = std::min(level, a[n - i] + remaining / di);
      for (std::size_t k = n - i; k < n; ++k) a[k] = raised;
      remaining = 0.0;
    }
  }
  if (remaining > 0.0) {
    for (auto& v : a) v += remaining / static_cast<double>(n);
  }
  return make_outcome(rewards, fee, EfrmScheme::kMaxMin, std::move(a));
}

EfrmOutcome efrm_max_max(const RewardVector& rewards, double fee) {
  check_fee(fee);
  std::vector<double> a = rewards.vec();
  double remaining = static_cast<double>(a.size()) * fee;
  fill_remedy(a, fee, remaining);
  a.front() += remaining;
  return make_outcome(rewards, fee, EfrmScheme::kMaxMax, std::move(a));
}

EfrmOutcome efrm_reallocate(const RewardVector& rewards, double fee, EfrmScheme scheme) {
  return scheme == EfrmScheme::kMaxMin ? efrm_max_min(rewards, fee) : efrm_max_max(rewards, fee);
}

EfrmValidation efrm_validate(const RewardVector& original, const RewardVector& reallocated,
                             double fee) {
  EfrmValidation v;
  const auto fail = [&](std::string msg) {
    v.valid = false;
    v.violations.push_back(std::move(msg));
  };
  if (original.size() != reallocated.size()) {
    fail("length mismatch");
    return v;
  }
  if (!(fee >= 0.0)) fail("negative entry fee");
  const std::size_t n = original.size();
  double added = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double floor = std::max(fee, original[i]);
    if (reallocated[i] < floor - kSlack) {
      fail("rank " + std::to_string(i + 1) + " below max(fee, original)");
    }
    if (i > 0 && reallocated[i] > reallocated[i - 1] + kSlack) {
      fail("rank " + std::to_string(i + 1) + " exceeds rank " + std::to_string(i));
    }
    added += reallocated[i] - original[i];
  }
  if (added > static_cast<double>(n) * fee + kSlack) {
    fail("reallocation spends more than the collected fees");
  }
  return v;
}

EfrmOutcome efrm_evaluate(const RewardVector& rewards, const CostSpec& cost, double fee,
                          EfrmScheme scheme, std::span<const double> p_list) {
  EfrmOutcome out = efrm_reallocate(rewards, fee, scheme);
  const auto check = efrm_validate(out.original, out.reallocated, fee);
  if (!check.valid) {
    throw ConsistencyError("reallocation violates its constraints: " + check.violations.front());
  }
  out.metrics_before = vector_metrics(rewards, cost, p_list);
  out.metrics_after = vector_metrics(out.net_equivalent, cost, p_list);
  out.equilibrium_after = quadrature_metrics(solve_symmetric_ne(out.reallocated, cost), p_list);
  return out;
}

}  // namespace entrybar
