#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "sfcl/grid.hpp"

namespace sfcl {

struct FaultScenario {
  BusId fault_bus = 0;
  double fault_impedance_ohm = 0.0;  // 0 = bolted
};

enum class SfclKind { resistive, inductive };

/// Two-state series limiter: min_impedance until the prospective branch
/// current exceeds trigger_current_a, then impedance_ohm.
struct SfclDevice {
  BranchId branch = 0;
  double impedance_ohm = 0.01;
  double trigger_current_a = 700.0;
  double response_time_ms = 2.0;
  double min_impedance_ohm = 0.01;
  double max_impedance_ohm = 20.0;
  SfclKind kind = SfclKind::resistive;

  bool operator==(const SfclDevice&) const = default;
};

struct FaultReport {
  std::map<BranchId, double> cb_current_a;  // every CB branch, zero when open
  BranchId worst_cb = 0;
  double worst_current_a = 0.0;
  std::set<BranchId> violated;
  std::set<BranchId> quenched;  // SFCL branches that inserted full impedance
};

/// Worst current per CB over a fault set.
struct FaultScan {
  std::map<BranchId, double> worst_current_a;
  std::map<BranchId, BusId> worst_fault_bus;

  double worst_current() const;
  /// max over CBs of current / rating (<= 1 means every CB is within rating).
  double max_loading(const Network& network) const;
  std::map<BranchId, double> overshoot_a(const Network& network) const;
};

/// Copy of the network with every branch impedance and the substation
/// Thevenin impedance multiplied by `factor`. DG reactances are already
/// sub-transient values and stay as they are. Apply once.
Network subtransient_view(const Network& network, double factor = 0.1);

/// One bolted fault per bus, in bus order.
std::vector<FaultScenario> all_bus_faults(const Network& network);

/// Precomputed source-to-fault paths for one radial configuration and fault
/// set; evaluating a device set is then a cheap pass over the paths. Each
/// source (substation behind its Thevenin impedance, each DG behind its
/// sub-transient reactance) drives 1.0 pu along its unique path to the fault.
class FaultModel {
 public:
  FaultModel(const Network& network, const SwitchConfig& config, std::vector<FaultScenario> fault_set);

  const Network& network() const { return *network_; }
  const SwitchConfig& config() const { return config_; }
  const std::vector<FaultScenario>& fault_set() const { return faults_; }

  /// Throws std::invalid_argument for devices on unknown or open branches or
  /// outside their impedance bounds.
  void check_devices(const std::vector<SfclDevice>& devices) const;

  FaultReport report(std::size_t scenario, const std::vector<SfclDevice>& devices) const;
  FaultScan scan(const std::vector<SfclDevice>& devices) const;
  /// Same as scan(devices).max_loading() without building maps.
  double max_loading(const std::vector<SfclDevice>& devices) const;

 private:
  struct SourcePath {
    Complex base_impedance;                 // source + path + fault impedance, pu
    std::vector<std::uint8_t> on_path;      // per branch index
  };
  struct Prepared {
    std::vector<std::size_t> branch;
    std::vector<Complex> z_min, z_full;
    std::vector<double> trigger_a;
  };

  Prepared prepare(const std::vector<SfclDevice>& devices) const;
  // Per-source fault current phasors after quench evaluation.
  std::vector<Complex> source_currents(std::size_t scenario, const Prepared& dev,
                                       std::vector<std::uint8_t>* quenched) const;

  const Network* network_;
  SwitchConfig config_;
  std::vector<FaultScenario> faults_;
  std::vector<std::vector<SourcePath>> paths_;  // [scenario][source]
  std::vector<std::size_t> cbs_;                // CB branch indices
};

FaultReport fault_current(const Network& network, const SwitchConfig& config, const FaultScenario& scenario,
                          const std::vector<SfclDevice>& sfcls);

FaultScan max_fault_scan(const Network& network, const SwitchConfig& config, const std::vector<SfclDevice>& sfcls,
                         const std::vector<FaultScenario>& fault_set);

}  // namespace sfcl
