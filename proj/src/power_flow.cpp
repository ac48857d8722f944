#include "sfcl/power_flow.hpp"

#include <algorithm>
#include <cmath>

namespace sfcl {

double PowerFlowSolution::min_voltage() const {
  return voltage_pu.empty() ? 0.0 : *std::min_element(voltage_pu.begin(), voltage_pu.end());
}

double PowerFlowSolution::max_voltage() const {
  return voltage_pu.empty() ? 0.0 : *std::max_element(voltage_pu.begin(), voltage_pu.end());
}

PowerFlowSolution solve_power_flow(const Network& network, const SwitchConfig& config, const LoadLevel& level,
                                   const PowerFlowOptions& options) {
  const RadialTree tree = build_radial_tree(network, config);
  const std::size_t n = network.bus_count();
  const double kw_base = network.base_mva() * 1000.0;

  std::vector<Complex> demand(n);  // net pu demand, DGs subtracted
  double load_kw = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const Bus& bus = network.buses()[m];
    demand[m] = Complex(bus.load_p_kw * level.scale, bus.load_q_kvar * level.scale) / kw_base;
    load_kw += bus.load_p_kw * level.scale;
  }
  double dg_kw = 0.0;
  if (options.include_dgs) {
    for (const auto& dg : network.dgs()) {
      demand[network.bus_index(dg.bus)] -= Complex(dg.capacity_mw * 1000.0 / kw_base, 0.0);
      dg_kw += dg.capacity_mw * 1000.0;
    }
  }

  std::vector<Complex> v(n, Complex(1.0, 0.0));
  std::vector<Complex> i_load(n), i_bus(n), i_branch(network.branch_count());

  PowerFlowSolution sol;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (std::size_t m = 0; m < n; ++m) {
      i_load[m] = std::conj(demand[m] / v[m]);
      i_bus[m] = i_load[m];
    }
    std::fill(i_branch.begin(), i_branch.end(), Complex{});
    for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
      const std::size_t m = *it;
      if (tree.parent_bus[m] < 0) continue;
      i_branch[tree.parent_branch[m]] = i_bus[m];
      i_bus[tree.parent_bus[m]] += i_bus[m];
    }
    double delta = 0.0;
    for (std::size_t m : tree.order) {
      if (tree.parent_bus[m] < 0) continue;
      const auto b = static_cast<std::size_t>(tree.parent_branch[m]);
      const Complex next = v[tree.parent_bus[m]] - network.branch_impedance_pu(b) * i_branch[b];
      delta = std::max(delta, std::abs(next - v[m]));
      v[m] = next;
    }
    sol.iterations = sweep;
    if (delta < options.tolerance_pu) {
      sol.converged = true;
      break;
    }
  }

  const double i_base = network.i_base_a();
  sol.voltage_pu.resize(n);
  sol.angle_rad.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    sol.voltage_pu[m] = std::abs(v[m]);
    sol.angle_rad[m] = std::arg(v[m]);
  }
  sol.current_a.assign(network.branch_count(), 0.0);
  sol.flow_kw.assign(network.branch_count(), 0.0);
  sol.flow_kvar.assign(network.branch_count(), 0.0);
  double loss_pu = 0.0;
  for (std::size_t m : tree.order) {
    if (tree.parent_bus[m] < 0) continue;
    const auto b = static_cast<std::size_t>(tree.parent_branch[m]);
    const Complex i = i_branch[b];
    loss_pu += network.branch_impedance_pu(b).real() * std::norm(i);
    const Complex sending = v[tree.parent_bus[m]] * std::conj(i);
    const double sign = network.from_index(b) == static_cast<std::size_t>(tree.parent_bus[m]) ? 1.0 : -1.0;
    sol.current_a[b] = std::abs(i) * i_base;
    sol.flow_kw[b] = sign * sending.real() * kw_base;
    sol.flow_kvar[b] = sign * sending.imag() * kw_base;
  }

  // Injection minus consumption, evaluated on the same (V, I) pair as the
  // losses so the two routes agree to rounding.
  const std::size_t root = network.substation_index();
  double consumed_pu = 0.0;
  double mismatch = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const Complex s = v[m] * std::conj(i_load[m]);
    if (m != root) consumed_pu += s.real();
    mismatch = std::max(mismatch, std::abs(s - demand[m]));
  }
  const double into_branches_pu = (v[root] * std::conj(i_bus[root] - i_load[root])).real();
  const double root_demand_pu = (v[root] * std::conj(i_load[root])).real();

  sol.total_loss_kw = loss_pu * kw_base;
  sol.balance_loss_kw = (into_branches_pu - consumed_pu) * kw_base;
  sol.substation_kw = (into_branches_pu + root_demand_pu) * kw_base;
  sol.dg_injection_kw = dg_kw;
  sol.load_kw = load_kw;
  sol.max_mismatch_pu = mismatch;
  return sol;
}

double LimitReport::normalized_violation() const {
  double total = 0.0;
  for (const auto& f : flows) total += (std::abs(f.flow_kw) - f.limit_kw) / f.limit_kw;
  for (const auto& v : voltages) total += std::abs(v.voltage_pu - v.bound_pu) / v.bound_pu;
  return total;
}

LimitReport check_limits(const Network& network, const PowerFlowSolution& solution, const VoltageBounds& bounds) {
  LimitReport report;
  for (std::size_t b = 0; b < network.branch_count(); ++b) {
    const Branch& br = network.branches()[b];
    if (br.flow_limit_kw > 0.0 && std::abs(solution.flow_kw[b]) >= br.flow_limit_kw) {
      report.flows.push_back({br.id, solution.flow_kw[b], br.flow_limit_kw});
    }
  }
  for (std::size_t m = 0; m < network.bus_count(); ++m) {
    const double v = solution.voltage_pu[m];
    if (v < bounds.v_min) report.voltages.push_back({network.buses()[m].id, v, bounds.v_min});
    if (v > bounds.v_max) report.voltages.push_back({network.buses()[m].id, v, bounds.v_max});
  }
  return report;
}

}  // namespace sfcl
