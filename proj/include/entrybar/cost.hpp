#pragma once

#include <span>
#include <string>
#include <vector>

namespace entrybar {

enum class CostFamily {
  kLinear,               // c(q) = slope * q
  kPower,                // c(q) = coefficient * q^exponent
  kQuadraticPlusLinear,  // c(q) = a q^2 + b q
  kScaledQuadratic,      // c(q) = scale * q^2
};

/// A creator's production cost c: [0, 1] -> R>=0 from a closed set of
/// families with analytic derivatives and inverses. c(0) = 0 and c is
/// strictly increasing for every accepted parameter set.
///
/// Immutable value type.
class CostSpec {
 public:
  static CostSpec linear(double slope);
  static CostSpec power(double coefficient, double exponent);
  static CostSpec quadratic_plus_linear(double a, double b);
  static CostSpec scaled_quadratic(double scale);

  CostFamily family() const { return family_; }
  double param(std::size_t i) const { return params_[i]; }
  std::vector<double> params() const;

  /// c(q). Throws PreconditionError outside [0, 1].
  double eval(double q) const;
  /// c'(q). At q = 0 for Power with exponent < 1 this is +infinity.
  double deriv(double q) const;
  /// c''(q). +infinity is the sentinel where the family's second derivative
  /// is unbounded (Power with exponent in (0, 2) \ {1} at q = 0).
  double second_deriv(double q) const;

  /// c^{-1}(v) for 0 <= v <= c(1), closed form. Throws PreconditionError
  /// outside that range (values within 1e-12 of the ends are clamped).
  double inverse(double v) const;

  /// Upper end of the cost range, c(1).
  double max_cost() const { return eval(1.0); }

  /// False only for Power with exponent < 1.
  bool is_convex() const;

  /// Family tag used in the JSON form ("linear", "power", ...).
  std::string family_name() const;
  /// Short textual form "family:p1,p2" as accepted by parse().
  std::string to_string() const;
  /// Parses "linear:1", "power:2,1.5", "quad_linear:0.5,4",
  /// "scaled_quadratic:3".
  static CostSpec parse(const std::string& text);
  static CostSpec from_family(const std::string& family,
                              const std::vector<double>& params);

  friend bool operator==(const CostSpec&, const CostSpec&) = default;

 private:
  CostSpec(CostFamily family, double p0, double p1)
      : family_(family), params_{p0, p1} {}
  void check_domain(double q) const;

  CostFamily family_;
  double params_[2];
};

/// Inverse by bisection on the monotone cost, independent of the closed
/// forms. Tolerance 1e-12 on the cost value, 200 iterations.
double inverse_by_bisection(const CostSpec& cost, double v);

/// True iff c''(q) <= c'(q)^2 + 1e-12 at every grid point.
bool satisfies_linf_condition(const CostSpec& cost, std::span<const double> grid);

}  // namespace entrybar
