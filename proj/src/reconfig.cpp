#include "sfcl/reconfig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace sfcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool assign(const std::vector<std::vector<BranchId>>& loops, const std::vector<BranchId>& open, std::size_t k,
            std::vector<int>& used, std::vector<int>& pick) {
  if (k == loops.size()) return true;
  for (std::size_t j = 0; j < open.size(); ++j) {
    if (used[j]) continue;
    const auto& loop = loops[k];
    auto it = std::find(loop.begin(), loop.end(), open[j]);
    if (it == loop.end()) continue;
    used[j] = 1;
    pick[k] = static_cast<int>(it - loop.begin());
    if (assign(loops, open, k + 1, used, pick)) return true;
    used[j] = 0;
  }
  return false;
}

}  // namespace

Encoding Encoding::from_network(const Network& network) {
  Encoding enc;
  for (const auto& ids : fundamental_loops(network)) {
    // Walk the cycle so that neighbouring indices are neighbouring branches.
    std::vector<BranchId> loop{ids.front()};
    std::set<BranchId> left(ids.begin() + 1, ids.end());
    std::size_t at = network.to_index(network.branch_index(ids.front()));
    while (!left.empty()) {
      auto next = std::find_if(left.begin(), left.end(), [&](BranchId id) {
        const std::size_t b = network.branch_index(id);
        return network.from_index(b) == at || network.to_index(b) == at;
      });
      if (next == left.end()) throw std::logic_error("fundamental loop is not a cycle");
      const std::size_t b = network.branch_index(*next);
      at = network.from_index(b) == at ? network.to_index(b) : network.from_index(b);
      loop.push_back(*next);
      left.erase(next);
    }
    std::vector<BranchId> kept;
    for (BranchId id : loop) {
      if (network.branches()[network.branch_index(id)].switchable()) kept.push_back(id);
    }
    if (kept.empty()) throw std::invalid_argument("fundamental loop without a switchable branch");
    enc.loops.push_back(std::move(kept));
  }
  return enc;
}

mssa::Bounds Encoding::bounds() const {
  mssa::Bounds b;
  for (const auto& loop : loops) {
    b.lower.push_back(0.0);
    b.upper.push_back(static_cast<double>(loop.size() - 1));
  }
  return b;
}

SwitchConfig Encoding::decode(const mssa::Position& position) const {
  if (position.size() != loops.size()) throw std::invalid_argument("position dimension does not match loop count");
  SwitchConfig config;
  for (std::size_t k = 0; k < loops.size(); ++k) {
    const double r = std::isfinite(position[k]) ? std::round(position[k]) : 0.0;
    const auto hi = static_cast<double>(loops[k].size() - 1);
    const auto idx = static_cast<std::size_t>(std::clamp(r, 0.0, hi));
    config.open_branches.insert(loops[k][idx]);
  }
  return config;
}

std::optional<mssa::Position> Encoding::encode(const SwitchConfig& config) const {
  const std::vector<BranchId> open(config.open_branches.begin(), config.open_branches.end());
  if (open.size() != loops.size()) return std::nullopt;
  std::vector<int> used(open.size(), 0), pick(loops.size(), 0);
  if (!assign(loops, open, 0, used, pick)) return std::nullopt;
  return mssa::Position(pick.begin(), pick.end());
}

CachedObjective::CachedObjective(const Network& network, ConfigObjective objective)
    : network_(&network), objective_(std::move(objective)), best_(kInf) {}

double CachedObjective::operator()(const SwitchConfig& config) {
  ++calls_;
  if (auto it = cache_.find(config); it != cache_.end()) return it->second;
  const double value = is_radial(*network_, config) ? objective_(config) : kInf;
  cache_.emplace(config, value);
  if (value < best_) {
    best_ = value;
    improvements_.push_back(config);
  }
  return value;
}

ConfigObjective loss_objective(const Network& network, int level, const PowerFlowOptions& options) {
  const LoadLevel lv = network.level(level);
  return [&network, lv, options](const SwitchConfig& config) {
    return solve_power_flow(network, config, lv, options).total_loss_kw;
  };
}

ConfigObjective level_cost_objective(const Network& network, int level, const CostParams& params,
                                     const PowerFlowOptions& options) {
  const LoadLevel lv = network.level(level);
  return [&network, lv, params, options](const SwitchConfig& config) {
    std::map<int, PowerFlowSolution> solutions;
    solutions.emplace(lv.index, solve_power_flow(network, config, lv, options));
    return total_cost(network, config, solutions, params, {lv.index}).total;
  };
}

ReconfigResult reconfigure(const Network& network, const ConfigObjective& objective, const mssa::SsaParams& params) {
  const Encoding enc = Encoding::from_network(network);
  CachedObjective cached(network, objective);
  const auto run = mssa::optimize([&](const mssa::Position& x) { return cached(enc.decode(x)); }, enc.bounds(), params);
  if (!std::isfinite(run.best_fitness)) throw std::runtime_error("optimizer found no radial configuration");

  ReconfigResult out;
  out.config = enc.decode(run.best);
  out.fitness = run.best_fitness;
  out.trace = run.trace;
  out.emitted = cached.improvements();
  out.evaluations = run.evaluations;
  out.distinct_configs = cached.cache_size();
  return out;
}

}  // namespace sfcl
