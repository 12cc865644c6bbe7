#include "entrybar/ro_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "entrybar/error.hpp"
#include "entrybar/numerics.hpp"

namespace entrybar {

namespace {
constexpr double kBudgetSlack = 1e-12;
constexpr double kTie = 1e-12;
constexpr BisectionOptions kQuantileBisection{1e-15, 200};
}  // namespace

RewardVector::RewardVector(std::vector<double> alphas)
    : RewardVector(std::move(alphas), true) {}

RewardVector RewardVector::unbudgeted(std::vector<double> alphas) {
  return RewardVector(std::move(alphas), false);
}

RewardVector::RewardVector(std::vector<double> alphas, bool budgeted)
    : alphas_(std::move(alphas)), budgeted_(budgeted) {
  if (alphas_.empty()) {
    throw PreconditionError("reward vector must have at least one entry");
  }
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (!(alphas_[i] >= 0.0) || !std::isfinite(alphas_[i])) {
      throw PreconditionError("rewards must be finite and nonnegative");
    }
    if (i > 0 && alphas_[i] > alphas_[i - 1]) {
      throw PreconditionError("rewards must be descending");
    }
  }
  if (budgeted_ && total() > 1.0 + kBudgetSlack) {
    throw PreconditionError("rewards exceed the unit budget (sum = " +
                            std::to_string(total()) + ")");
  }
}

double RewardVector::total() const {
  return std::accumulate(alphas_.begin(), alphas_.end(), 0.0);
}

bool RewardVector::exhausts_budget(double tol) const {
  return std::abs(total() - 1.0) <= tol;
}

RewardVector RewardVector::reduced() const {
  std::vector<double> out(alphas_);
  const double base = bottom();
  for (double& a : out) a -= base;
  out.back() = 0.0;
  return RewardVector(std::move(out), budgeted_);
}

double rank_reward_expectation(std::span<const double> alphas, double t) {
  const std::size_t n = alphas.size();
  if (n == 0) throw PreconditionError("empty reward vector");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw PreconditionError("quantile outside [0, 1]");
  }
  if (t == 1.0) return alphas.front();
  if (t == 0.0) return alphas.back();
  // Bernstein coefficient k (power t^k) is alpha_{n-k}.
  std::vector<double> b(n);
  for (std::size_t k = 0; k < n; ++k) b[k] = alphas[n - 1 - k];
  const double s = 1.0 - t;
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t k = 0; k + level < n; ++k) {
      b[k] = s * b[k] + t * b[k + 1];
    }
  }
  return b[0];
}

double rank_reward_expectation(const RewardVector& rewards, double t) {
  return rank_reward_expectation(rewards.values(), t);
}

RewardVector cumulative_average_rewards(const RewardVector& rewards) {
  std::vector<double> out(rewards.size());
  double running = 0.0;
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    running += rewards[k];
    out[k] = running / static_cast<double>(k + 1);
  }
  // Averages of a descending sequence are descending; clip rounding noise.
  for (std::size_t k = 1; k < out.size(); ++k) out[k] = std::min(out[k], out[k - 1]);
  // Not budgeted: the averages of (1, 0, 0) already sum past 1.
  return RewardVector::unbudgeted(std::move(out));
}

std::string to_string(RoRegime regime) {
  switch (regime) {
    case RoRegime::kInterior:
      return "Interior";
    case RoRegime::kAllPerfect:
      return "AllPerfect";
    case RoRegime::kSplit:
      return "Split";
  }
  return "?";
}

RoRegime regime_from_string(const std::string& text) {
  if (text == "Interior") return RoRegime::kInterior;
  if (text == "AllPerfect") return RoRegime::kAllPerfect;
  if (text == "Split") return RoRegime::kSplit;
  throw PreconditionError("unknown regime '" + text + "'");
}

RoRegime classify_regime(const RewardVector& rewards, const CostSpec& cost) {
  const RewardVector r = rewards.reduced();
  const double c1 = cost.max_cost();
  if (c1 >= r.top() - kTie) return RoRegime::kInterior;
  const double mean = r.total() / static_cast<double>(r.size());
  if (c1 <= mean + kTie) return RoRegime::kAllPerfect;
  return RoRegime::kSplit;
}

MixedEquilibriumRO solve_symmetric_ne(const RewardVector& rewards,
                                      const CostSpec& cost) {
  MixedEquilibriumRO eq;
  eq.rewards = rewards;
  eq.reduced = rewards.reduced();
  eq.cost = cost;
  eq.base_reward = rewards.bottom();
  eq.regime = classify_regime(rewards, cost);
  const double n = static_cast<double>(rewards.size());
  const double c1 = cost.max_cost();

  switch (eq.regime) {
    case RoRegime::kInterior: {
      eq.atom_mass = 0.0;
      eq.support_max = cost.inverse(std::min(eq.reduced.top(), c1));
      eq.expected_reward = rewards.total() / n;
      eq.expected_profit = eq.base_reward;
      break;
    }
    case RoRegime::kAllPerfect: {
      eq.atom_mass = 1.0;
      eq.support_max = 1.0;
      eq.expected_reward = rewards.total() / n;
      eq.expected_profit = eq.expected_reward - c1;
      break;
    }
    case RoRegime::kSplit: {
      const RewardVector beta = cumulative_average_rewards(eq.reduced);
      // h_n(B, s) is nondecreasing in s = 1 - y, from B_n < c(1) to B_1 > c(1).
      const double s = bisect_nondecreasing(
          [&](double t) { return rank_reward_expectation(beta, t); }, c1, 0.0,
          1.0, kQuantileBisection);
      eq.atom_mass = 1.0 - s;
      eq.support_max =
          cost.inverse(rank_reward_expectation(eq.reduced, 1.0 - eq.atom_mass));
      eq.expected_reward = rewards.total() / n;
      eq.expected_profit = eq.base_reward;
      const double residual =
          rank_reward_expectation(beta, 1.0 - eq.atom_mass) - c1;
      if (!(eq.atom_mass > 0.0 && eq.atom_mass < 1.0) ||
          !(eq.support_max < 1.0) || std::abs(residual) > 1e-10) {
        throw ConsistencyError(
            "split-case construction inconsistent with the regime test");
      }
      break;
    }
  }
  return eq;
}

MixedEquilibriumRO solve_base_reward_ne(const RewardVector& rewards,
                                        const CostSpec& cost,
                                        double entry_fee) {
  if (!(entry_fee >= 0.0)) {
    throw PreconditionError("entry fee must be nonnegative");
  }
  if (rewards.bottom() < entry_fee) {
    throw PreconditionError(
        "base-reward equilibrium needs alpha_n >= c(0) (the entry fee)");
  }
  if (!(rewards.top() > rewards.bottom())) {
    throw PreconditionError("base-reward equilibrium needs alpha_1 > alpha_n");
  }
  const RewardVector reduced = rewards.reduced();
  if (reduced.top() > cost.max_cost() + kTie) {
    throw PreconditionError(
        "base-reward equilibrium needs alpha_1 - alpha_n <= c(1)");
  }
  MixedEquilibriumRO eq;
  eq.regime = RoRegime::kInterior;
  eq.rewards = rewards;
  eq.reduced = reduced;
  eq.cost = cost;
  eq.base_reward = rewards.bottom();
  eq.entry_fee = entry_fee;
  eq.atom_mass = 0.0;
  eq.support_max = cost.inverse(std::min(reduced.top(), cost.max_cost()));
  eq.expected_reward = rewards.total() / static_cast<double>(rewards.size());
  eq.expected_profit = eq.base_reward - entry_fee;
  return eq;
}

double cdf_eval(const MixedEquilibriumRO& eq, double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw PreconditionError("quality outside [0, 1]");
  }
  if (q >= 1.0) return 1.0;
  switch (eq.regime) {
    case RoRegime::kAllPerfect:
      return 0.0;
    case RoRegime::kInterior:
      if (q >= eq.support_max) return 1.0;
      break;
    case RoRegime::kSplit:
      if (q > eq.support_max) return 1.0 - eq.atom_mass;
      break;
  }
  const double target = eq.cost.eval(q);
  return bisect_nondecreasing(
      [&](double t) { return rank_reward_expectation(eq.reduced, t); }, target,
      0.0, 1.0 - eq.atom_mass, kQuantileBisection);
}

double quantile_eval(const MixedEquilibriumRO& eq, double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw PreconditionError("probability outside [0, 1]");
  }
  if (eq.regime == RoRegime::kAllPerfect) return 1.0;
  if (u > 1.0 - eq.atom_mass) return 1.0;
  const double h = rank_reward_expectation(eq.reduced, u);
  return eq.cost.inverse(std::min(h, eq.cost.max_cost()));
}

std::vector<double> sample(const MixedEquilibriumRO& eq, std::uint64_t seed,
                           std::size_t count) {
  UniformSource rng(seed);
  std::vector<double> out(count);
  for (auto& q : out) q = quantile_eval(eq, rng.next());
  return out;
}

double deviation_reward(const MixedEquilibriumRO& eq, double q) {
  if (eq.atom_mass > 0.0 && q >= 1.0) {
    const RewardVector beta = cumulative_average_rewards(eq.reduced);
    return rank_reward_expectation(beta, 1.0 - eq.atom_mass) + eq.base_reward;
  }
  return rank_reward_expectation(eq.reduced, cdf_eval(eq, q)) + eq.base_reward;
}

double verify_best_response(const MixedEquilibriumRO& eq,
                            std::span<const double> deviation_grid) {
  double best = -std::numeric_limits<double>::infinity();
  for (double q : deviation_grid) {
    const double gain = deviation_reward(eq, q) - eq.cost.eval(q) -
                        eq.entry_fee - eq.expected_profit;
    best = std::max(best, gain);
  }
  return best;
}

}  // namespace entrybar
