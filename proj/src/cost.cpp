#include "sfcl/cost.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sfcl {

double loss_cost(double total_loss_kw, const LoadLevel& level, double price) {
  return price * total_loss_kw * (level.duration_days / 365.0);
}

double interruption_cost(const CcdfCurve& curve, double duration_min) {
  const auto& k = curve.knots;
  if (duration_min <= k.front().first) return k.front().second;
  if (duration_min >= k.back().first) return k.back().second;
  std::size_t hi = 1;
  while (k[hi].first < duration_min) ++hi;
  const auto [d0, c0] = k[hi - 1];
  const auto [d1, c1] = k[hi];
  if (duration_min == d1) return c1;
  const double t = (std::log(duration_min) - std::log(d0)) / (std::log(d1) - std::log(d0));
  return c0 + t * (c1 - c0);
}

std::vector<double> supply_path_failure_rates(const Network& network, const SwitchConfig& config) {
  const RadialTree tree = build_radial_tree(network, config);
  std::vector<double> lambda(network.bus_count(), 0.0);
  for (std::size_t m : tree.order) {
    if (tree.parent_bus[m] < 0) continue;
    lambda[m] = lambda[tree.parent_bus[m]] + network.branches()[tree.parent_branch[m]].failure_rate;
  }
  return lambda;
}

double ecost(const Network& network, const SwitchConfig& config, const LoadLevel& level, double repair_duration_min) {
  const auto lambda = supply_path_failure_rates(network, config);
  double annual = 0.0;
  for (std::size_t m = 0; m < network.bus_count(); ++m) {
    const Bus& bus = network.buses()[m];
    if (bus.ccdf.empty() || lambda[m] == 0.0) continue;
    const double c = interruption_cost(network.ccdf_curves().at(bus.ccdf), repair_duration_min);
    annual += bus.load_p_kw * level.scale * c * lambda[m];
  }
  return annual * (level.duration_days / 365.0);
}

CostBreakdown total_cost(const Network& network, const SwitchConfig& config,
                         const std::map<int, PowerFlowSolution>& solutions, const CostParams& params,
                         const std::vector<int>& levels) {
  CostBreakdown out;
  if (!is_radial(network, config)) {
    out.total = std::numeric_limits<double>::infinity();
    return out;
  }
  double violation = 0.0;
  for (int index : levels) {
    auto it = solutions.find(index);
    if (it == solutions.end()) throw std::invalid_argument("no power flow solution for level " + std::to_string(index));
    const LoadLevel& level = network.level(index);
    const PowerFlowSolution& sol = it->second;
    out.loss_cost[index] = loss_cost(sol.total_loss_kw, level, params.loss_price);
    out.reliability_cost[index] = ecost(network, config, level, params.repair_duration_min);
    if (!sol.converged) violation += 1.0;
    violation += check_limits(network, sol, params.bounds).normalized_violation();
  }
  out.penalty = params.penalty_weight * violation;
  out.total = out.penalty;
  for (int index : levels) out.total += out.loss_cost[index] + out.reliability_cost[index];
  return out;
}

CostBreakdown total_cost(const Network& network, const SwitchConfig& config,
                         const std::map<int, PowerFlowSolution>& solutions, const CostParams& params) {
  std::vector<int> levels;
  for (const auto& lv : network.levels()) levels.push_back(lv.index);
  return total_cost(network, config, solutions, params, levels);
}

}  // namespace sfcl
