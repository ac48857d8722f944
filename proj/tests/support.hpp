#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sfcl/grid.hpp"
#include "sfcl/placement.hpp"
#include "sfcl/power_flow.hpp"
#include "sfcl/short_circuit.hpp"

namespace testing {

using namespace sfcl;

inline std::string fixture_path() { return std::string(FIXTURE_DIR) + "/ieee33.json"; }
inline const Network& fixture() {
  static const Network net = load_grid(fixture_path());
  return net;
}
inline SwitchConfig tie_config() { return SwitchConfig{{33, 34, 35, 36, 37}}; }

/// Small programmatic networks. Bus 1 is the substation.
struct Builder {
  NetworkData data;

  explicit Builder(double base_kv = 12.66, double base_mva = 10.0) {
    data.base_kv = base_kv;
    data.base_mva = base_mva;
    data.levels = {{1, 1.0, 365.0}};
    data.ccdf_curves["c"] = CcdfCurve{{{1.0, 1.0}, {100.0, 10.0}}};
  }
  Builder& substation(BusId id, double r = 0.0, double x = 0.0) {
    Bus b;
    b.id = id;
    b.is_substation = true;
    b.source_r_ohm = r;
    b.source_x_ohm = x;
    b.ccdf = "c";
    data.buses.push_back(b);
    return *this;
  }
  Builder& bus(BusId id, double p_kw = 0.0, double q_kvar = 0.0) {
    Bus b;
    b.id = id;
    b.load_p_kw = p_kw;
    b.load_q_kvar = q_kvar;
    b.ccdf = "c";
    data.buses.push_back(b);
    return *this;
  }
  Builder& branch(BranchId id, BusId from, BusId to, double r, double x, SwitchKind kind = SwitchKind::sectionalizing,
                  std::optional<double> cb = std::nullopt, double lambda = 0.0) {
    Branch br;
    br.id = id;
    br.from_bus = from;
    br.to_bus = to;
    br.resistance_ohm = r;
    br.reactance_ohm = x;
    br.switch_kind = kind;
    br.failure_rate = lambda;
    br.ampacity_a = 400.0;
    br.flow_limit_kw = 0.0;
    br.cb_rating_a = cb;
    data.branches.push_back(br);
    return *this;
  }
  Builder& dg(BusId bus, double mw, double xd_ohm) {
    data.dgs.push_back({bus, mw, xd_ohm});
    return *this;
  }
  Network build() const { return Network(data); }
};

// ---------------------------------------------------------------------------
// Power flow oracle: two buses, purely resistive line, unity-pf load.
// V2 (V1 - V2) = R P (line-to-line volts, three-phase watts).

inline double two_bus_loss_kw(double v_kv, double r_ohm, double p_kw) {
  const double v1 = v_kv * 1e3;
  const double p = p_kw * 1e3;
  const double v2 = 0.5 * (v1 + std::sqrt(v1 * v1 - 4.0 * r_ohm * p));
  const double i = p / (std::sqrt(3.0) * v2);
  return 3.0 * i * i * r_ohm / 1e3;
}

// ---------------------------------------------------------------------------
// Reconfiguration oracle: every one-open-branch-per-loop combination.

struct Enumerated {
  std::map<SwitchConfig, double> values;  // radial configs only
  SwitchConfig best;
  double best_value = std::numeric_limits<double>::infinity();
  long combinations = 0;
};

inline Enumerated enumerate_radial(const Network& net, const std::function<double(const SwitchConfig&)>& f) {
  const auto loops = fundamental_loops(net);
  Enumerated out;
  std::vector<std::size_t> idx(loops.size(), 0);
  while (true) {
    ++out.combinations;
    SwitchConfig c;
    for (std::size_t k = 0; k < loops.size(); ++k) c.open_branches.insert(loops[k][idx[k]]);
    if (c.open_branches.size() == loops.size() && !out.values.count(c) && is_radial(net, c)) {
      const double v = f(c);
      out.values[c] = v;
      if (v < out.best_value) {
        out.best_value = v;
        out.best = c;
      }
    }
    std::size_t k = 0;
    while (k < loops.size() && ++idx[k] == loops[k].size()) idx[k++] = 0;
    if (k == loops.size()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Placement oracle: every subset of the usable candidates, sized by the same
// monotone bisection, no pruning, no ordering assumptions.

struct BruteForce {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<BranchId> set;
  bool feasible = false;
};

inline BruteForce brute_force_placement(const PlacementContext& ctx) {
  std::vector<BranchId> cands;
  for (BranchId id : ctx.problem().candidates) {
    if (!ctx.config().is_open(id)) cands.push_back(id);
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  BruteForce out;
  const std::size_t n = cands.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<BranchId> set;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) set.push_back(cands[i]);
    }
    std::optional<std::map<BranchId, double>> z;
    if (set.empty()) {
      if (ctx.feasible({})) z = std::map<BranchId, double>{};
    } else {
      z = min_impedance_for_set(ctx, set);
    }
    if (!z) continue;
    const double obj = placement_objective(*z, ctx.problem().omega);
    if (obj < out.objective) {
      out.objective = obj;
      out.set = set;
      out.feasible = true;
    }
  }
  return out;
}

/// Random radial toy feeder with a substation, a few DGs and CBs; returns the
/// network and a placement problem with at most `max_candidates` candidates.
struct ToyInstance {
  Network network;
  PlacementProblem problem;
};

inline ToyInstance random_toy(std::mt19937_64& rng, int max_candidates = 8) {
  std::uniform_int_distribution<int> n_bus(4, 9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = n_bus(rng);
  Builder b;
  b.substation(1, 0.05 + 0.2 * u(rng), 0.5 + 2.0 * u(rng));
  for (int i = 2; i <= n; ++i) b.bus(i, 50.0 + 200.0 * u(rng), 20.0 + 80.0 * u(rng));
  for (int i = 2; i <= n; ++i) {
    std::uniform_int_distribution<int> parent(1, i - 1);
    b.branch(i - 1, parent(rng), i, 0.05 + 0.4 * u(rng), 0.05 + 0.4 * u(rng));
  }
  if (u(rng) < 0.7) b.dg(static_cast<int>(2 + u(rng) * (n - 1)), 1.0, 5.0 + 30.0 * u(rng));
  if (u(rng) < 0.4) b.dg(static_cast<int>(2 + u(rng) * (n - 1)), 1.0, 5.0 + 30.0 * u(rng));
  Network probe = b.build();

  // Ratings set relative to the unlimited currents so that some but not all
  // instances are feasible.
  std::vector<BranchId> ids;
  for (const auto& br : probe.branches()) ids.push_back(br.id);
  std::shuffle(ids.begin(), ids.end(), rng);
  const std::size_t n_cb = 1 + static_cast<std::size_t>(u(rng) * std::min<std::size_t>(3, ids.size()));
  for (std::size_t k = 0; k < n_cb; ++k) b.data.branches[probe.branch_index(ids[k])].cb_rating_a = 1.0;
  probe = b.build();
  const auto scan = max_fault_scan(probe, SwitchConfig{}, {}, all_bus_faults(probe));
  for (const auto& [id, amps] : scan.worst_current_a) {
    b.data.branches[probe.branch_index(id)].cb_rating_a = amps * (0.55 + 0.5 * u(rng));
  }

  ToyInstance inst{b.build(), {}};
  std::shuffle(ids.begin(), ids.end(), rng);
  const std::size_t n_cand = 1 + static_cast<std::size_t>(u(rng) * std::min<std::size_t>(max_candidates, ids.size()));
  inst.problem.candidates.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(n_cand, ids.size())));
  std::sort(inst.problem.candidates.begin(), inst.problem.candidates.end());
  inst.problem.omega = 10.0 * u(rng);
  inst.problem.z_max_ohm = 5.0 + 15.0 * u(rng);
  inst.problem.trigger_current_a = 200.0 + 1500.0 * u(rng);
  return inst;
}

// ---------------------------------------------------------------------------
// Hill estimator of the tail index over the k largest |x|.

inline double hill_tail_index(std::vector<double> xs, std::size_t k) {
  for (auto& x : xs) x = std::abs(x);
  std::sort(xs.begin(), xs.end(), std::greater<>());
  const double xk = xs[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(xs[i] / xk);
  return static_cast<double>(k) / sum;
}

/// Random spanning tree over all branches (random-weight Kruskal); the
/// complement is the open set.
inline SwitchConfig random_radial(const Network& net, std::mt19937_64& rng) {
  std::vector<std::size_t> order(net.branch_count());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> parent(net.bus_count());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  SwitchConfig c;
  for (std::size_t b : order) {
    const auto ra = find(net.from_index(b)), rb = find(net.to_index(b));
    if (ra == rb) {
      c.open_branches.insert(net.branches()[b].id);
    } else {
      parent[ra] = rb;
    }
  }
  return c;
}

}  // namespace testing
