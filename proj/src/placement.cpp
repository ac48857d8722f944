#include "sfcl/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sfcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Network with_ratings(const Network& network, const std::map<BranchId, double>& ratings) {
  if (ratings.empty()) return network;
  NetworkData data = network.data();
  for (const auto& [id, amps] : ratings) {
    data.branches[network.branch_index(id)].cb_rating_a = amps;
  }
  return Network(std::move(data));
}

std::vector<FaultScenario> fault_set_for(const Network& network, const PlacementProblem& problem) {
  return problem.fault_set.empty() ? all_bus_faults(network) : problem.fault_set;
}

std::vector<BranchId> usable_candidates(const PlacementContext& ctx) {
  std::vector<BranchId> out;
  for (BranchId id : ctx.problem().candidates) {
    if (ctx.network().has_branch(id) && !ctx.config().is_open(id)) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::map<BranchId, double> uniform(const std::vector<BranchId>& set, double z) {
  std::map<BranchId, double> out;
  for (BranchId id : set) out[id] = z;
  return out;
}

SfclPlacementResult make_result(const PlacementContext& ctx, const std::map<BranchId, double>& z, bool feasible) {
  SfclPlacementResult r;
  r.devices = ctx.devices(z);
  r.objective = placement_objective(z, ctx.problem().omega);
  r.feasible = feasible;
  if (!feasible) r.residual_violations = ctx.model().scan(r.devices).overshoot_a(ctx.network());
  return r;
}

SfclPlacementResult place_exhaustive(const PlacementContext& ctx, const std::vector<BranchId>& cands) {
  const PlacementProblem& pb = ctx.problem();
  SfclPlacementResult best;
  best.exhaustive = true;
  best.subsets_evaluated = 1;
  if (ctx.feasible({})) {
    best.feasible = true;
    return best;
  }
  double best_obj = kInf;
  std::map<BranchId, double> best_z;
  long evaluated = 1;
  const std::size_t n = cands.size();
  for (std::size_t k = 1; k <= n; ++k) {
    if (static_cast<double>(k) * (pb.omega + pb.z_min_ohm) >= best_obj) break;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<BranchId> set;
      for (std::size_t i : idx) set.push_back(cands[i]);
      ++evaluated;
      if (auto z = min_impedance_for_set(ctx, set)) {
        const double obj = placement_objective(*z, pb.omega);
        if (obj < best_obj) {
          best_obj = obj;
          best_z = std::move(*z);
        }
      }
      // Next combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  const bool found = std::isfinite(best_obj);
  auto r = make_result(ctx, found ? best_z : uniform(cands, pb.z_max_ohm), found);
  r.exhaustive = true;
  r.subsets_evaluated = evaluated;
  return r;
}

SfclPlacementResult place_greedy(const PlacementContext& ctx, const std::vector<BranchId>& cands) {
  const PlacementProblem& pb = ctx.problem();
  long evaluated = 1;
  std::vector<BranchId> chosen;
  double current = ctx.loading({});
  while (current > 1.0) {
    std::optional<BranchId> pick;
    double pick_loading = current;
    for (BranchId c : cands) {
      if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
      auto trial = chosen;
      trial.push_back(c);
      ++evaluated;
      const double l = ctx.loading(uniform(trial, pb.z_max_ohm));
      if (l < pick_loading) {
        pick_loading = l;
        pick = c;
      }
    }
    if (!pick) break;
    chosen.push_back(*pick);
    current = pick_loading;
  }
  std::sort(chosen.begin(), chosen.end());
  if (current > 1.0) {
    auto r = make_result(ctx, uniform(cands, pb.z_max_ohm), false);
    r.subsets_evaluated = evaluated;
    return r;
  }

  auto z = chosen.empty() ? std::map<BranchId, double>{} : *min_impedance_for_set(ctx, chosen);
  // Drop devices whose removal keeps the plan feasible and cheaper.
  for (BranchId id : std::vector<BranchId>(chosen)) {
    std::vector<BranchId> rest;
    for (const auto& [b, _] : z) {
      if (b != id) rest.push_back(b);
    }
    if (rest.size() == z.size()) continue;
    ++evaluated;
    auto trial = rest.empty() ? (ctx.feasible({}) ? std::optional<std::map<BranchId, double>>(std::map<BranchId, double>{})
                                                  : std::nullopt)
                              : min_impedance_for_set(ctx, rest);
    if (trial && placement_objective(*trial, pb.omega) < placement_objective(z, pb.omega)) z = std::move(*trial);
  }
  auto r = make_result(ctx, z, true);
  r.subsets_evaluated = evaluated;
  return r;
}

}  // namespace

void PlacementProblem::validate() const {
  if (!(omega >= 0.0)) throw std::invalid_argument("placement omega must be non-negative");
  if (!(z_min_ohm >= 0.0 && z_min_ohm <= z_max_ohm)) throw std::invalid_argument("placement needs 0 <= z_min <= z_max");
  if (!(tolerance_ohm > 0.0)) throw std::invalid_argument("placement tolerance must be positive");
  if (max_bisection_iterations < 1) throw std::invalid_argument("placement needs at least one bisection iteration");
  if (exhaustive_cap < 0) throw std::invalid_argument("exhaustive_cap must be non-negative");
  if (!(trigger_current_a > 0.0)) throw std::invalid_argument("trigger current must be positive");
  for (const auto& [id, amps] : cb_ratings_a) {
    if (!(amps > 0.0)) throw std::invalid_argument("CB rating on branch " + std::to_string(id) + " must be positive");
  }
}

std::vector<BranchId> default_candidates(const Network& network) {
  std::set<std::size_t> dg_buses;
  for (const auto& dg : network.dgs()) dg_buses.insert(network.bus_index(dg.bus));
  std::vector<BranchId> out;
  for (std::size_t b = 0; b < network.branch_count(); ++b) {
    const Branch& br = network.branches()[b];
    if (br.has_cb() || dg_buses.count(network.from_index(b)) || dg_buses.count(network.to_index(b))) {
      out.push_back(br.id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<BranchId> SfclPlacementResult::branches() const {
  std::set<BranchId> out;
  for (const auto& d : devices) out.insert(d.branch);
  return out;
}

PlacementContext::PlacementContext(const Network& network, const SwitchConfig& config, const PlacementProblem& problem)
    : network_(with_ratings(network, problem.cb_ratings_a)),
      config_(config),
      problem_(problem),
      model_(network_, config_, fault_set_for(network_, problem)) {
  problem_.validate();
  if (problem_.candidates.empty()) throw std::invalid_argument("placement needs at least one candidate branch");
  for (BranchId id : problem_.candidates) network_.branch_index(id);
}

std::vector<SfclDevice> PlacementContext::devices(const std::map<BranchId, double>& impedance_ohm) const {
  std::vector<SfclDevice> out;
  for (const auto& [id, z] : impedance_ohm) {
    SfclDevice d;
    d.branch = id;
    d.impedance_ohm = z;
    d.min_impedance_ohm = problem_.z_min_ohm;
    d.max_impedance_ohm = problem_.z_max_ohm;
    d.trigger_current_a = problem_.trigger_current_a;
    d.kind = problem_.kind;
    out.push_back(d);
  }
  return out;
}

double PlacementContext::loading(const std::map<BranchId, double>& impedance_ohm) const {
  return model_.max_loading(devices(impedance_ohm));
}

double placement_objective(const std::map<BranchId, double>& impedance_ohm, double omega) {
  double sum = 0.0;
  for (const auto& [id, z] : impedance_ohm) sum += z + omega;
  return sum;
}

std::optional<std::map<BranchId, double>> min_impedance_for_set(const PlacementContext& ctx,
                                                                const std::vector<BranchId>& branch_set) {
  const PlacementProblem& pb = ctx.problem();
  for (BranchId id : branch_set) {
    if (!ctx.network().has_branch(id)) {
      throw std::invalid_argument("SFCL set: unknown branch " + std::to_string(id));
    }
    if (ctx.config().is_open(id)) {
      throw std::invalid_argument("SFCL set: branch " + std::to_string(id) + " is open in this configuration");
    }
  }
  const double span = pb.z_max_ohm - pb.z_min_ohm;
  auto z = uniform(branch_set, pb.z_max_ohm);
  if (!ctx.feasible(z)) return std::nullopt;
  z = uniform(branch_set, pb.z_min_ohm);
  if (ctx.feasible(z)) return z;

  // Common scale factor s: Z = Z_min + s (Z_max - Z_min).
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < pb.max_bisection_iterations && (hi - lo) * span > pb.tolerance_ohm; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ctx.feasible(uniform(branch_set, pb.z_min_ohm + mid * span))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  z = uniform(branch_set, pb.z_min_ohm + hi * span);

  // Trim each device alone, largest impedance first, ties by branch id.
  std::set<BranchId> pending(branch_set.begin(), branch_set.end());
  while (!pending.empty()) {
    BranchId id = *pending.begin();
    for (BranchId b : pending) {
      if (z[b] > z[id]) id = b;
    }
    pending.erase(id);
    double dlo = pb.z_min_ohm, dhi = z[id];
    auto trial = z;
    trial[id] = dlo;
    if (ctx.feasible(trial)) {
      z = std::move(trial);
      continue;
    }
    for (int it = 0; it < pb.max_bisection_iterations && dhi - dlo > pb.tolerance_ohm; ++it) {
      const double mid = 0.5 * (dlo + dhi);
      trial[id] = mid;
      if (ctx.feasible(trial)) {
        dhi = mid;
      } else {
        dlo = mid;
      }
    }
    z[id] = dhi;
  }
  return z;
}

SfclPlacementResult place(const PlacementContext& ctx) {
  const auto cands = usable_candidates(ctx);
  if (cands.size() <= static_cast<std::size_t>(ctx.problem().exhaustive_cap)) return place_exhaustive(ctx, cands);
  return place_greedy(ctx, cands);
}

SfclPlacementResult place(const PlacementProblem& problem, const Network& network, const SwitchConfig& config) {
  const PlacementContext ctx(network, config, problem);
  return place(ctx);
}

SfclPlacementResult aggregate_devices(const std::vector<SfclPlacementResult>& per_level, double omega) {
  std::map<BranchId, SfclDevice> merged;
  for (std::size_t t = 0; t < per_level.size(); ++t) {
    if (!per_level[t].feasible) {
      throw std::invalid_argument("cannot aggregate: placement for level entry " + std::to_string(t) + " is infeasible");
    }
    for (const auto& d : per_level[t].devices) {
      auto [it, inserted] = merged.emplace(d.branch, d);
      if (!inserted && d.impedance_ohm > it->second.impedance_ohm) it->second = d;
    }
  }
  SfclPlacementResult out;
  out.feasible = true;
  for (const auto& [id, d] : merged) {
    out.devices.push_back(d);
    out.objective += d.impedance_ohm + omega;
  }
  return out;
}

SfclPlacementResult aggregate(const std::vector<SfclPlacementResult>& per_level,
                              const std::vector<const PlacementContext*>& contexts) {
  if (per_level.size() != contexts.size()) throw std::invalid_argument("one placement context per level required");
  const double omega = contexts.empty() ? 10.0 : contexts.front()->problem().omega;
  SfclPlacementResult out = aggregate_devices(per_level, omega);
  for (const auto* ctx : contexts) {
    const auto devices = devices_for_config(out, ctx->config());
    const FaultScan scan = ctx->model().scan(devices);
    for (const auto& [id, over] : scan.overshoot_a(ctx->network())) {
      out.feasible = false;
      out.residual_violations[id] = std::max(out.residual_violations[id], over);
    }
  }
  return out;
}

std::vector<SfclDevice> devices_for_config(const SfclPlacementResult& plan, const SwitchConfig& config) {
  std::vector<SfclDevice> out;
  for (const auto& d : plan.devices) {
    if (!config.is_open(d.branch)) out.push_back(d);
  }
  return out;
}

}  // namespace sfcl
