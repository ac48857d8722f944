#pragma once

// Randomized invariant checks shared by the unit tests and the acceptance
// binary. Each returns counts so callers can report what was exercised.

#include <cmath>
#include <random>

#include "sfcl/reconfig.hpp"
#include "support.hpp"

namespace testing {

struct BalanceCheck {
  int configs = 0;
  int converged = 0;
  double worst_mismatch_pu = 0.0;  // |P_sub + P_dg - P_load - P_loss| / S_base
};

/// Power balance on random radial configurations at a random load level.
inline BalanceCheck power_balance(const Network& net, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BalanceCheck out;
  const double s_base_kw = net.base_mva() * 1e3;
  for (int i = 0; i < n; ++i) {
    const SwitchConfig c = random_radial(net, rng);
    const auto& lv = net.levels()[rng() % net.levels().size()];
    const auto sol = solve_power_flow(net, c, lv);
    ++out.configs;
    if (!sol.converged) continue;
    ++out.converged;
    const double mismatch =
        std::abs(sol.substation_kw + sol.dg_injection_kw - sol.load_kw - sol.total_loss_kw) / s_base_kw;
    out.worst_mismatch_pu = std::max(out.worst_mismatch_pu, mismatch);
  }
  return out;
}

struct MonotoneCheck {
  int scenarios = 0;
  int affected = 0;    // scenarios where the device changed some CB current
  int violations = 0;  // a CB current rose as the impedance grew
};

/// Path scenarios: the substation feeding a random bolted fault over a random
/// radial configuration, one SFCL on a random branch of that path, impedance
/// swept upward. DGs are removed so the path carries the only contribution;
/// every CB current must then be non-increasing.
inline MonotoneCheck monotone_fault_current(const Network& net, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NetworkData data = net.data();
  data.dgs.clear();
  const Network sub = subtransient_view(Network(data));
  const std::vector<double> sweep{0.01, 0.05, 0.1, 0.3, 1.0, 2.0, 5.0, 10.0, 20.0};
  MonotoneCheck out;
  while (out.scenarios < n) {
    const SwitchConfig c = random_radial(sub, rng);
    const std::size_t fault = rng() % sub.bus_count();
    if (fault == sub.substation_index()) continue;
    const RadialTree tree = build_radial_tree(sub, c);
    std::vector<std::size_t> path;
    for (auto m = static_cast<std::ptrdiff_t>(fault); tree.parent_bus[m] >= 0; m = tree.parent_bus[m]) {
      path.push_back(static_cast<std::size_t>(tree.parent_branch[m]));
    }
    const FaultModel model(sub, c, {{sub.buses()[fault].id, 0.0}});
    SfclDevice d;
    d.branch = sub.branches()[path[rng() % path.size()]].id;
    d.trigger_current_a = 1.0;
    d.min_impedance_ohm = 0.0;
    const FaultReport none = model.report(0, {});
    std::map<BranchId, double> prev = none.cb_current_a;
    bool changed = false, bad = false;
    for (double z : sweep) {
      d.impedance_ohm = z;
      const FaultReport r = model.report(0, {d});
      for (const auto& [id, amps] : r.cb_current_a) {
        if (amps > prev.at(id)) bad = true;
        if (amps < none.cb_current_a.at(id)) changed = true;
      }
      prev = r.cb_current_a;
    }
    ++out.scenarios;
    out.affected += changed;
    out.violations += bad;
  }
  return out;
}

struct RadialityCheck {
  int runs = 0;
  int emitted = 0;
  int non_radial = 0;
};

/// Every configuration the reconfigurer reports, over several seeds and levels.
inline RadialityCheck emitted_radiality(const Network& net, int runs, std::uint64_t seed) {
  RadialityCheck out;
  for (int i = 0; i < runs; ++i) {
    mssa::SsaParams p;
    p.seed = seed + static_cast<std::uint64_t>(i);
    p.population_size = 10;
    p.iterations = 20;
    const int level = net.levels()[static_cast<std::size_t>(i) % net.levels().size()].index;
    const auto r = reconfigure(net, level_cost_objective(net, level, CostParams{}), p);
    ++out.runs;
    std::vector<SwitchConfig> all = r.emitted;
    all.push_back(r.config);
    for (const auto& c : all) {
      ++out.emitted;
      out.non_radial += !is_radial(net, c);
    }
  }
  return out;
}

struct RoundTripCheck {
  int configs = 0;
  int representable = 0;
  int mismatches = 0;
};

/// decode(encode(c)) == c for random radial configs the encoding can express,
/// and encode(decode(x)) re-decodes to the same config for random positions.
inline RoundTripCheck encoding_round_trip(const Network& net, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Encoding enc = Encoding::from_network(net);
  const auto bounds = enc.bounds();
  RoundTripCheck out;
  for (int i = 0; i < n; ++i) {
    const SwitchConfig c = random_radial(net, rng);
    ++out.configs;
    if (const auto pos = enc.encode(c)) {
      ++out.representable;
      out.mismatches += !(enc.decode(*pos) == c);
    }
    mssa::Position x(bounds.lower.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = std::uniform_real_distribution<double>(bounds.lower[k], bounds.upper[k])(rng);
    }
    const SwitchConfig d = enc.decode(x);
    if (!is_radial(net, d)) continue;
    const auto back = enc.encode(d);
    out.mismatches += !back || !(enc.decode(*back) == d);
  }
  return out;
}

}  // namespace testing
