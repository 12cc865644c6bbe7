#include "entrybar/cost.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "entrybar/error.hpp"
#include "entrybar/numerics.hpp"

namespace entrybar {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRangeSlack = 1e-12;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw PreconditionError(std::string(what) + " must be positive and finite");
  }
}
}  // namespace

CostSpec CostSpec::linear(double slope) {
  require_positive(slope, "linear slope");
  return CostSpec(CostFamily::kLinear, slope, 0.0);
}

CostSpec CostSpec::power(double coefficient, double exponent) {
  require_positive(coefficient, "power coefficient");
  require_positive(exponent, "power exponent");
  return CostSpec(CostFamily::kPower, coefficient, exponent);
}

CostSpec CostSpec::quadratic_plus_linear(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
      a + b <= 0.0) {
    throw PreconditionError(
        "quad_linear coefficients must be nonnegative and not both zero");
  }
  return CostSpec(CostFamily::kQuadraticPlusLinear, a, b);
}

CostSpec CostSpec::scaled_quadratic(double scale) {
  require_positive(scale, "scaled_quadratic scale");
  return CostSpec(CostFamily::kScaledQuadratic, scale, 0.0);
}

std::vector<double> CostSpec::params() const {
  switch (family_) {
    case CostFamily::kLinear:
    case CostFamily::kScaledQuadratic:
      return {params_[0]};
    case CostFamily::kPower:
    case CostFamily::kQuadraticPlusLinear:
      return {params_[0], params_[1]};
  }
  return {};
}

void CostSpec::check_domain(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw PreconditionError("quality " + std::to_string(q) +
                            " outside [0, 1]");
  }
}

double CostSpec::eval(double q) const {
  check_domain(q);
  switch (family_) {
    case CostFamily::kLinear:
      return params_[0] * q;
    case CostFamily::kPower:
      return q == 0.0 ? 0.0 : params_[0] * std::pow(q, params_[1]);
    case CostFamily::kQuadraticPlusLinear:
      return (params_[0] * q + params_[1]) * q;
    case CostFamily::kScaledQuadratic:
      return params_[0] * q * q;
  }
  return 0.0;
}

double CostSpec::deriv(double q) const {
  check_domain(q);
  switch (family_) {
    case CostFamily::kLinear:
      return params_[0];
    case CostFamily::kPower: {
      const double k = params_[1];
      if (k == 1.0) return params_[0];
      if (q == 0.0) return k > 1.0 ? 0.0 : kInf;
      return params_[0] * k * std::pow(q, k - 1.0);
    }
    case CostFamily::kQuadraticPlusLinear:
      return 2.0 * params_[0] * q + params_[1];
    case CostFamily::kScaledQuadratic:
      return 2.0 * params_[0] * q;
  }
  return 0.0;
}

double CostSpec::second_deriv(double q) const {
  check_domain(q);
  switch (family_) {
    case CostFamily::kLinear:
      return 0.0;
    case CostFamily::kPower: {
      const double k = params_[1];
      if (k == 1.0) return 0.0;
      if (k == 2.0) return 2.0 * params_[0];
      if (q == 0.0) {
        if (k > 2.0) return 0.0;
        // k in (1, 2) diverges to +inf; k < 1 diverges to -inf, reported
        // with the same unbounded sentinel magnitude.
        return k > 1.0 ? kInf : -kInf;
      }
      return params_[0] * k * (k - 1.0) * std::pow(q, k - 2.0);
    }
    case CostFamily::kQuadraticPlusLinear:
      return 2.0 * params_[0];
    case CostFamily::kScaledQuadratic:
      return 2.0 * params_[0];
  }
  return 0.0;
}

double CostSpec::inverse(double v) const {
  const double top = max_cost();
  if (!(v >= -kRangeSlack && v <= top + kRangeSlack)) {
    throw PreconditionError("cost value " + std::to_string(v) +
                            " outside [0, c(1)]");
  }
  if (v <= 0.0) return 0.0;
  if (v >= top) return 1.0;
  double q = 0.0;
  switch (family_) {
    case CostFamily::kLinear:
      q = v / params_[0];
      break;
    case CostFamily::kPower:
      q = std::pow(v / params_[0], 1.0 / params_[1]);
      break;
    case CostFamily::kQuadraticPlusLinear: {
      // Rationalised root of a q^2 + b q - v = 0; stable for a -> 0.
      const double a = params_[0];
      const double b = params_[1];
      q = 2.0 * v / (b + std::sqrt(b * b + 4.0 * a * v));
      break;
    }
    case CostFamily::kScaledQuadratic:
      q = std::sqrt(v / params_[0]);
      break;
  }
  return std::min(1.0, std::max(0.0, q));
}

bool CostSpec::is_convex() const {
  return !(family_ == CostFamily::kPower && params_[1] < 1.0);
}

std::string CostSpec::family_name() const {
  switch (family_) {
    case CostFamily::kLinear:
      return "linear";
    case CostFamily::kPower:
      return "power";
    case CostFamily::kQuadraticPlusLinear:
      return "quad_linear";
    case CostFamily::kScaledQuadratic:
      return "scaled_quadratic";
  }
  return "unknown";
}

std::string CostSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << family_name() << ':';
  const auto ps = params();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) os << ',';
    os << ps[i];
  }
  return os.str();
}

CostSpec CostSpec::from_family(const std::string& family,
                               const std::vector<double>& params) {
  auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw PreconditionError("cost family '" + family + "' takes " +
                              std::to_string(n) + " parameter(s), got " +
                              std::to_string(params.size()));
    }
  };
  if (family == "linear") {
    need(1);
    return linear(params[0]);
  }
  if (family == "power") {
    need(2);
    return power(params[0], params[1]);
  }
  if (family == "quad_linear") {
    need(2);
    return quadratic_plus_linear(params[0], params[1]);
  }
  if (family == "scaled_quadratic") {
    need(1);
    return scaled_quadratic(params[0]);
  }
  throw PreconditionError("unknown cost family '" + family + "'");
}

CostSpec CostSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw PreconditionError("cost '" + text + "' is not of the form family:params");
  }
  const std::string family = text.substr(0, colon);
  std::vector<double> params;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw PreconditionError("bad cost parameter '" + item + "'");
    }
  }
  return from_family(family, params);
}

double inverse_by_bisection(const CostSpec& cost, double v) {
  const double top = cost.max_cost();
  if (!(v >= 0.0 && v <= top)) {
    throw PreconditionError("cost value outside [0, c(1)]");
  }
  if (v == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double cm = cost.eval(mid);
    if (std::abs(cm - v) <= 1e-12) return mid;
    if (cm < v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool satisfies_linf_condition(const CostSpec& cost,
                              std::span<const double> grid) {
  for (double q : grid) {
    const double d1 = cost.deriv(q);
    if (cost.second_deriv(q) > d1 * d1 + 1e-12) return false;
  }
  return true;
}

}  // namespace entrybar
