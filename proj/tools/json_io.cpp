#include "json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "entrybar/error.hpp"

namespace entrybar::cli {

double parse_p(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") {
      return std::numeric_limits<double>::infinity();
    }
    try {
      std::size_t used = 0;
      const double p = std::stod(s, &used);
      if (used == s.size()) return p;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("p must be a number or \"inf\", got " + v.dump());
}

json p_to_json(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

CostSpec cost_from_json(const json& v) {
  try {
    return parse_cost(v);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

CostSpec parse_cost(const json& v) {
  if (v.is_string()) return CostSpec::parse(v.get<std::string>());
  if (!v.is_object()) throw ConfigError("cost must be \"family:params\" or {family, params}");
  for (const auto& [key, _] : v.items()) {
    if (key != "family" && key != "params") throw ConfigError("unknown cost key '" + key + "'");
  }
  if (!v.contains("family") || !v["family"].is_string()) throw ConfigError("cost needs a family");
  if (!v.contains("params") || !v["params"].is_array()) throw ConfigError("cost needs a params array");
  std::vector<double> params;
  for (const auto& x : v["params"]) {
    if (!x.is_number()) throw ConfigError("cost params must be numbers");
    params.push_back(x.get<double>());
  }
  return CostSpec::from_family(v["family"].get<std::string>(), params);
}

json cost_to_json(const CostSpec& c) {
  return {{"family", c.family_name()}, {"params", c.params()}};
}

json rewards_to_json(const RewardVector& r) { return r.vec(); }

json equilibrium_to_json(const MixedEquilibriumRO& eq) {
  return {{"case", to_string(eq.regime)},
          {"atom_mass", eq.atom_mass},
          {"support_max", eq.support_max},
          {"rewards", rewards_to_json(eq.rewards)},
          {"cost", cost_to_json(eq.cost)},
          {"base_reward", eq.base_reward},
          {"expected_reward", eq.expected_reward},
          {"expected_profit", eq.expected_profit}};
}

json metrics_to_json(const MetricReport& m) {
  json lp = json::array();
  for (const auto& e : m.lp) {
    json row = {{"p", p_to_json(e.p)}, {"objective", e.objective}, {"norm", e.norm()}};
    if (e.stderr_estimate) row["stderr"] = *e.stderr_estimate;
    lp.push_back(row);
  }
  json out = {{"method", to_string(m.method)}, {"l1", m.l1}, {"linf", m.linf}, {"lp", lp}};
  if (m.l1_stderr) out["l1_stderr"] = *m.l1_stderr;
  if (m.linf_stderr) out["linf_stderr"] = *m.linf_stderr;
  return out;
}

json efrm_to_json(const EfrmOutcome& o) {
  const auto check = efrm_validate(o.original, o.reallocated, o.entry_fee);
  json out = {{"fee", o.entry_fee},
              {"scheme", to_string(o.scheme)},
              {"original", rewards_to_json(o.original)},
              {"reallocated", rewards_to_json(o.reallocated)},
              {"net_equivalent", rewards_to_json(o.net_equivalent)},
              {"valid", check.valid},
              {"violations", check.violations}};
  if (o.metrics_before) out["metrics_before"] = metrics_to_json(*o.metrics_before);
  if (o.metrics_after) out["metrics_after"] = metrics_to_json(*o.metrics_after);
  if (o.equilibrium_after) out["equilibrium_after"] = metrics_to_json(*o.equilibrium_after);
  return out;
}

json barrier_to_json(const BarrierReport& r) {
  return {{"holds", r.holds},
          {"strict_interior", r.strict_interior},
          {"max_margin", r.max_margin},
          {"cost_exceeds_one", r.cost_exceeds_one},
          {"grid_points", r.grid.size()}};
}

json pm_to_json(const PureEquilibriumPM& eq, std::span<const CostSpec> costs) {
  // creators are numbered from 1 in outputs
  std::vector<std::size_t> contributing;
  for (auto i : eq.contributing) contributing.push_back(i + 1);
  json out = {{"qualities", eq.qualities},
              {"aggregate", eq.aggregate},
              {"shares", eq.shares},
              {"contributing", contributing},
              {"utilities", eq.utilities},
              {"sufficient_condition", check_contributing_sufficient(costs)},
              {"equilibrium_ratio_condition", equilibrium_ratio_condition(eq, costs)},
              {"best_response_gain", verify_pm_best_response(eq, costs)}};
  out["barrier_level"] = eq.aggregate > 0.0 ? json(barrier_level(eq)) : json(nullptr);
  return out;
}

json fee_row_to_json(const FeeSweepRow& row) {
  std::vector<std::size_t> survivors;
  for (auto i : row.survivors) survivors.push_back(i + 1);
  json norms = json::array();
  for (const auto& [p, v] : row.pnorms) norms.push_back({{"p", p_to_json(p)}, {"norm", v}});
  return {{"fee", row.fee},
          {"survivors", survivors},
          {"qualities", row.qualities},
          {"utilities", row.utilities},
          {"pnorms", norms},
          {"degenerate", row.degenerate}};
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace entrybar::cli
