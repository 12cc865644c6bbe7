#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entrybar/cost.hpp"

namespace entrybar {

/// Rank-order rewards alpha_1 >= ... >= alpha_n >= 0.
///
/// The default constructor path also enforces the unit budget
/// sum(alpha) <= 1 + 1e-12. Reallocated vectors produced by entry-fee schemes
/// may exceed the budget and are built with unbudgeted().
class RewardVector {
 public:
  explicit RewardVector(std::vector<double> alphas);
  static RewardVector unbudgeted(std::vector<double> alphas);

  std::size_t size() const { return alphas_.size(); }
  double operator[](std::size_t i) const { return alphas_[i]; }
  std::span<const double> values() const { return alphas_; }
  const std::vector<double>& vec() const { return alphas_; }

  double top() const { return alphas_.front(); }
  double bottom() const { return alphas_.back(); }
  double total() const;
  bool budgeted() const { return budgeted_; }
  bool exhausts_budget(double tol = 1e-12) const;

  /// alpha - alpha_n: the strategically equivalent vector with a zero bottom.
  RewardVector reduced() const;

  friend bool operator==(const RewardVector&, const RewardVector&) = default;

 private:
  RewardVector(std::vector<double> alphas, bool budgeted);
  std::vector<double> alphas_;
  bool budgeted_ = true;
};

/// h_n(A, t) = sum_i alpha_{i+1} C(n-1, i) t^{n-1-i} (1-t)^i: expected reward
/// of a creator at quantile t against n-1 opponents. Evaluated with de
/// Casteljau's algorithm on the Bernstein form.
double rank_reward_expectation(std::span<const double> alphas, double t);
double rank_reward_expectation(const RewardVector& rewards, double t);

/// B_k = (alpha_1 + ... + alpha_k) / k, the expected reward of a creator tied
/// with k-1 others at the top.
RewardVector cumulative_average_rewards(const RewardVector& rewards);

enum class RoRegime { kInterior, kAllPerfect, kSplit };

std::string to_string(RoRegime regime);
RoRegime regime_from_string(const std::string& text);

/// Case of the symmetric equilibrium, decided on the reduced vector
/// alpha - alpha_n: Interior if c(1) >= alpha_1, AllPerfect if
/// c(1) <= mean(alpha), Split otherwise. Ties within 1e-12 resolve to
/// Interior, then AllPerfect.
RoRegime classify_regime(const RewardVector& rewards, const CostSpec& cost);

/// Symmetric mixed equilibrium of the rank-order game with a common cost.
///
/// The CDF is implicit: on [0, support_max] it is the smallest t with
/// h_n(reduced, t) >= c(q); an atom of mass atom_mass sits at q = 1.
struct MixedEquilibriumRO {
  RoRegime regime = RoRegime::kInterior;
  double atom_mass = 0.0;    // y
  double support_max = 0.0;  // q_max (Interior), q_hat (Split), 1 (AllPerfect)
  RewardVector rewards{std::vector<double>{1.0}};
  RewardVector reduced{std::vector<double>{0.0}};  // rewards - base_reward
  CostSpec cost = CostSpec::linear(1.0);
  double base_reward = 0.0;      // alpha_n
  double entry_fee = 0.0;        // plays the role of c(0) in the base-reward form
  double expected_reward = 0.0;  // per creator, gross of fee
  double expected_profit = 0.0;  // per creator, net of cost and fee

  std::size_t creators() const { return rewards.size(); }
};

/// Solves the symmetric equilibrium for a common cost (all three cases).
/// A positive bottom reward alpha_n is handled by the base-reward shift.
MixedEquilibriumRO solve_symmetric_ne(const RewardVector& rewards,
                                      const CostSpec& cost);

/// Atomless base-reward equilibrium F(q) = h_n^{-1}(c(q) + alpha_n) on
/// [0, c^{-1}(alpha_1 - alpha_n)], where entry_fee acts as c(0).
/// Requires alpha_1 > alpha_n >= entry_fee and alpha_1 - alpha_n <= c(1).
MixedEquilibriumRO solve_base_reward_ne(const RewardVector& rewards,
                                        const CostSpec& cost,
                                        double entry_fee = 0.0);

double cdf_eval(const MixedEquilibriumRO& eq, double q);
double quantile_eval(const MixedEquilibriumRO& eq, double u);

/// Inverse-transform samples from a seeded deterministic generator.
std::vector<double> sample(const MixedEquilibriumRO& eq, std::uint64_t seed,
                           std::size_t count);

/// Expected reward of one creator playing pure quality q while the other n-1
/// play the equilibrium. Ties at the atom q = 1 are broken uniformly.
double deviation_reward(const MixedEquilibriumRO& eq, double q);

/// Max over the grid of the utility gain of a pure deviation relative to the
/// equilibrium utility. <= 0 (up to numerics) certifies the equilibrium on
/// that grid.
double verify_best_response(const MixedEquilibriumRO& eq,
                            std::span<const double> deviation_grid);

}  // namespace entrybar
