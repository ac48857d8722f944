#pragma once

#include <vector>

#include "sfcl/grid.hpp"

namespace sfcl {

struct PowerFlowOptions {
  bool include_dgs = true;  // DGs as unity-pf negative loads at full capacity
  double tolerance_pu = 1e-8;
  int max_sweeps = 100;
};

/// Per-bus and per-branch vectors are indexed like Network::buses() and
/// Network::branches(). Branch flows are signed in the from->to direction;
/// open branches carry zero.
struct PowerFlowSolution {
  std::vector<double> voltage_pu;
  std::vector<double> angle_rad;
  std::vector<double> current_a;
  std::vector<double> flow_kw;
  std::vector<double> flow_kvar;
  double total_loss_kw = 0.0;        // sum of R |I|^2
  double balance_loss_kw = 0.0;      // injections minus consumption
  double substation_kw = 0.0;
  double dg_injection_kw = 0.0;
  double load_kw = 0.0;              // scaled nominal demand
  double max_mismatch_pu = 0.0;      // worst |V conj(I) - S| over buses
  bool converged = false;
  int iterations = 0;

  double min_voltage() const;
  double max_voltage() const;
};

/// Backward/forward sweep on a radial configuration. Throws
/// std::invalid_argument for non-radial configs; a solve that exhausts
/// max_sweeps returns converged = false with the last iterate.
PowerFlowSolution solve_power_flow(const Network& network, const SwitchConfig& config, const LoadLevel& level,
                                   const PowerFlowOptions& options = {});

struct VoltageBounds {
  double v_min = 0.95;
  double v_max = 1.05;
};

struct FlowViolation {
  BranchId branch = 0;
  double flow_kw = 0.0;
  double limit_kw = 0.0;
};

struct VoltageViolation {
  BusId bus = 0;
  double voltage_pu = 0.0;
  double bound_pu = 0.0;
};

struct LimitReport {
  std::vector<FlowViolation> flows;
  std::vector<VoltageViolation> voltages;

  bool empty() const { return flows.empty() && voltages.empty(); }
  /// Sum of relative overshoots, used by the cost penalty.
  double normalized_violation() const;
};

/// Branches with |P| >= flow limit (a non-positive limit means unlimited)
/// and buses outside the voltage band.
LimitReport check_limits(const Network& network, const PowerFlowSolution& solution, const VoltageBounds& bounds = {});

}  // namespace sfcl
