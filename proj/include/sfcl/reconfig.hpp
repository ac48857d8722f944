#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "sfcl/cost.hpp"
#include "sfcl/grid.hpp"
#include "sfcl/mssa.hpp"
#include "sfcl/power_flow.hpp"

namespace sfcl {

/// One continuous coordinate per fundamental loop; coordinate k rounds to an
/// index into loops[k], and that branch is opened.
struct Encoding {
  std::vector<std::vector<BranchId>> loops;  // switchable branches only

  /// Loops from fundamental_loops(), each listed in cycle order starting at
  /// its lowest id, restricted to switchable branches.
  static Encoding from_network(const Network& network);

  /// [0, len - 1] per coordinate.
  mssa::Bounds bounds() const;
  /// Round to nearest, clamp to the loop. Duplicate picks give fewer open
  /// branches than loops, which is never radial.
  SwitchConfig decode(const mssa::Position& position) const;
  /// A position decoding to `config`, or nullopt when no assignment of the
  /// open branches to distinct loops exists.
  std::optional<mssa::Position> encode(const SwitchConfig& config) const;
};

using ConfigObjective = std::function<double(const SwitchConfig&)>;

/// Memoizes a config objective by open set; non-radial configs get +inf
/// without calling it.
class CachedObjective {
 public:
  CachedObjective(const Network& network, ConfigObjective objective);

  double operator()(const SwitchConfig& config);
  std::size_t cache_size() const { return cache_.size(); }
  long calls() const { return calls_; }
  /// Every config that improved on the best value seen so far, in order.
  const std::vector<SwitchConfig>& improvements() const { return improvements_; }

 private:
  const Network* network_;
  ConfigObjective objective_;
  std::map<SwitchConfig, double> cache_;
  std::vector<SwitchConfig> improvements_;
  double best_ = 0.0;
  long calls_ = 0;
};

/// Total loss at one level, no penalty.
ConfigObjective loss_objective(const Network& network, int level, const PowerFlowOptions& options = {});

/// total_cost() restricted to one level.
ConfigObjective level_cost_objective(const Network& network, int level, const CostParams& params,
                                     const PowerFlowOptions& options = {});

struct ReconfigResult {
  SwitchConfig config;
  double fitness = 0.0;
  std::vector<mssa::TraceRow> trace;
  std::vector<SwitchConfig> emitted;  // successive best configs
  long evaluations = 0;               // optimizer objective calls
  std::size_t distinct_configs = 0;   // cache entries
};

/// Runs the optimizer over the loop encoding. Throws std::runtime_error when
/// no radial configuration was found.
ReconfigResult reconfigure(const Network& network, const ConfigObjective& objective, const mssa::SsaParams& params);

}  // namespace sfcl
