#pragma once

#include <map>
#include <vector>

#include "sfcl/grid.hpp"
#include "sfcl/power_flow.hpp"

namespace sfcl {

struct CostParams {
  double loss_price = 168.0;           // $/kW-year
  double repair_duration_min = 120.0;  // CCDF lookup duration
  VoltageBounds bounds;
  double penalty_weight = 1e6;         // $ per unit normalized violation
};

/// Per-level costs in $, keyed by load-level index.
struct CostBreakdown {
  std::map<int, double> loss_cost;
  std::map<int, double> reliability_cost;
  double penalty = 0.0;
  double total = 0.0;

  bool operator==(const CostBreakdown&) const = default;
};

/// price * loss * duration / 365.
double loss_cost(double total_loss_kw, const LoadLevel& level, double price);

/// Linear in log(duration) between bracketing knots, clamped outside.
double interruption_cost(const CcdfCurve& curve, double duration_min);

/// Failure-rate sum of the closed branches on the substation-to-bus path,
/// indexed like Network::buses().
std::vector<double> supply_path_failure_rates(const Network& network, const SwitchConfig& config);

/// Expected customer interruption cost for one level, prorated by its
/// duration. Throws std::invalid_argument on non-radial configs.
double ecost(const Network& network, const SwitchConfig& config, const LoadLevel& level, double repair_duration_min);

/// Objective over `levels` plus constraint penalty. A non-radial config
/// yields total = +inf without evaluating anything. Throws
/// std::invalid_argument when a requested level has no solution.
CostBreakdown total_cost(const Network& network, const SwitchConfig& config,
                         const std::map<int, PowerFlowSolution>& solutions, const CostParams& params,
                         const std::vector<int>& levels);

/// All levels of the network.
CostBreakdown total_cost(const Network& network, const SwitchConfig& config,
                         const std::map<int, PowerFlowSolution>& solutions, const CostParams& params);

}  // namespace sfcl
