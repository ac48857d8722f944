#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "sfcl/grid.hpp"
#include "sfcl/short_circuit.hpp"

namespace sfcl {

struct PlacementProblem {
  std::vector<BranchId> candidates;
  double omega = 10.0;  // ohm-equivalent cost per device
  double z_min_ohm = 0.01;
  double z_max_ohm = 20.0;
  std::map<BranchId, double> cb_ratings_a;  // overrides the network's CB ratings
  std::vector<FaultScenario> fault_set;     // empty = bolted fault at every bus
  int exhaustive_cap = 12;
  double tolerance_ohm = 1e-3;
  int max_bisection_iterations = 60;
  double trigger_current_a = 700.0;
  SfclKind kind = SfclKind::resistive;

  void validate() const;  // throws std::invalid_argument
};

/// Default candidate set: CB branches plus branches incident to a DG bus,
/// ascending by id.
std::vector<BranchId> default_candidates(const Network& network);

struct SfclPlacementResult {
  std::vector<SfclDevice> devices;  // ascending branch id
  double objective = 0.0;           // sum of impedances + omega * count
  bool feasible = false;
  std::map<BranchId, double> residual_violations;  // A over rating, when infeasible
  bool exhaustive = false;
  long subsets_evaluated = 0;

  std::set<BranchId> branches() const;
  bool operator==(const SfclPlacementResult&) const = default;
};

/// Fault model for one configuration of `network`. The network is used as
/// given: pass the sub-transient view for first-cycle studies. The problem's
/// CB ratings are applied on a private copy.
class PlacementContext {
 public:
  PlacementContext(const Network& network, const SwitchConfig& config, const PlacementProblem& problem);
  PlacementContext(const PlacementContext&) = delete;
  PlacementContext& operator=(const PlacementContext&) = delete;

  const Network& network() const { return network_; }
  const SwitchConfig& config() const { return config_; }
  const PlacementProblem& problem() const { return problem_; }
  const FaultModel& model() const { return model_; }

  std::vector<SfclDevice> devices(const std::map<BranchId, double>& impedance_ohm) const;
  /// Worst current / rating over all CBs and faults.
  double loading(const std::map<BranchId, double>& impedance_ohm) const;
  bool feasible(const std::map<BranchId, double>& impedance_ohm) const { return loading(impedance_ohm) <= 1.0; }

 private:
  Network network_;
  SwitchConfig config_;
  PlacementProblem problem_;
  FaultModel model_;
};

/// Smallest impedances on `branch_set` meeting every CB rating: bisection on
/// a common scale between Z_min and Z_max, then each device trimmed alone,
/// largest impedance first. nullopt when all-Z_max still violates. Throws
/// std::invalid_argument for branches that are open or unknown.
std::optional<std::map<BranchId, double>> min_impedance_for_set(const PlacementContext& ctx,
                                                                const std::vector<BranchId>& branch_set);

double placement_objective(const std::map<BranchId, double>& impedance_ohm, double omega);

/// Exhaustive search in (size, lexicographic) order when the candidates fit
/// under exhaustive_cap, greedy otherwise. Candidates open in the
/// configuration are skipped.
SfclPlacementResult place(const PlacementContext& ctx);
SfclPlacementResult place(const PlacementProblem& problem, const Network& network, const SwitchConfig& config);

/// Union of branch sets, per-branch maximum impedance. Throws
/// std::invalid_argument when any input is infeasible.
SfclPlacementResult aggregate_devices(const std::vector<SfclPlacementResult>& per_level, double omega = 10.0);

/// aggregate_devices() plus re-verification against each level's context.
/// Devices on branches open in a level are left out for that level only.
SfclPlacementResult aggregate(const std::vector<SfclPlacementResult>& per_level,
                              const std::vector<const PlacementContext*>& contexts);

/// Devices of `plan` that sit on branches closed in `config`.
std::vector<SfclDevice> devices_for_config(const SfclPlacementResult& plan, const SwitchConfig& config);

}  // namespace sfcl
