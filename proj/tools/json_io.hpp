#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "entrybar/cost.hpp"
#include "entrybar/pm_core.hpp"
#include "entrybar/pm_fee.hpp"
#include "entrybar/ro_barrier.hpp"
#include "entrybar/ro_core.hpp"
#include "entrybar/ro_design.hpp"
#include "entrybar/ro_metrics.hpp"

namespace entrybar::cli {

using nlohmann::json;

/// Thrown for malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// p values may be numbers or the string "inf".
double parse_p(const json& v);
json p_to_json(double p);

// Cost family errors are reported as ConfigError.
CostSpec cost_from_json(const json& v);
CostSpec parse_cost(const json& v);
json cost_to_json(const CostSpec& c);

json rewards_to_json(const RewardVector& r);
json equilibrium_to_json(const MixedEquilibriumRO& eq);
json metrics_to_json(const MetricReport& m);
json efrm_to_json(const EfrmOutcome& o);
json barrier_to_json(const BarrierReport& r);
json pm_to_json(const PureEquilibriumPM& eq, std::span<const CostSpec> costs);
json fee_row_to_json(const FeeSweepRow& row);

// Shortest round-trip text for a double, "inf" for infinity.
std::string fmt(double v);

}  // namespace entrybar::cli
