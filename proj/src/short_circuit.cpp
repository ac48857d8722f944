#include "sfcl/short_circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sfcl {

namespace {

Complex device_impedance_pu(double ohm, SfclKind kind, double z_base) {
  return kind == SfclKind::resistive ? Complex(ohm / z_base, 0.0) : Complex(0.0, ohm / z_base);
}

}  // namespace

double FaultScan::worst_current() const {
  double worst = 0.0;
  for (const auto& [id, amps] : worst_current_a) worst = std::max(worst, amps);
  return worst;
}

double FaultScan::max_loading(const Network& network) const {
  double loading = 0.0;
  for (const auto& [id, amps] : worst_current_a) {
    loading = std::max(loading, amps / *network.branches()[network.branch_index(id)].cb_rating_a);
  }
  return loading;
}

std::map<BranchId, double> FaultScan::overshoot_a(const Network& network) const {
  std::map<BranchId, double> out;
  for (const auto& [id, amps] : worst_current_a) {
    const double rating = *network.branches()[network.branch_index(id)].cb_rating_a;
    if (amps > rating) out[id] = amps - rating;
  }
  return out;
}

Network subtransient_view(const Network& network, double factor) {
  NetworkData data = network.data();
  for (auto& br : data.branches) {
    br.resistance_ohm *= factor;
    br.reactance_ohm *= factor;
  }
  for (auto& bus : data.buses) {
    if (!bus.is_substation) continue;
    bus.source_r_ohm *= factor;
    bus.source_x_ohm *= factor;
  }
  return Network(std::move(data));
}

std::vector<FaultScenario> all_bus_faults(const Network& network) {
  std::vector<FaultScenario> faults;
  for (const auto& bus : network.buses()) faults.push_back({bus.id, 0.0});
  return faults;
}

FaultModel::FaultModel(const Network& network, const SwitchConfig& config, std::vector<FaultScenario> fault_set)
    : network_(&network), config_(config), faults_(std::move(fault_set)) {
  const RadialTree tree = build_radial_tree(network, config);
  const double z_base = network.z_base_ohm();

  struct Source {
    std::size_t bus;
    Complex impedance;
  };
  std::vector<Source> sources{{network.substation_index(), network.source_impedance_pu()}};
  for (const auto& dg : network.dgs()) {
    sources.push_back({network.bus_index(dg.bus), Complex(0.0, dg.subtransient_reactance_ohm / z_base)});
  }

  for (std::size_t b = 0; b < network.branch_count(); ++b) {
    if (network.branches()[b].has_cb()) cbs_.push_back(b);
  }

  for (const auto& fault : faults_) {
    if (fault.fault_impedance_ohm < 0.0) throw std::invalid_argument("fault impedance must be non-negative");
    const std::size_t target = network.bus_index(fault.fault_bus);
    std::vector<SourcePath> per_source;
    for (const auto& src : sources) {
      SourcePath sp;
      sp.on_path.assign(network.branch_count(), 0);
      sp.base_impedance = src.impedance + Complex(fault.fault_impedance_ohm / z_base, 0.0);
      auto u = static_cast<std::ptrdiff_t>(src.bus);
      auto v = static_cast<std::ptrdiff_t>(target);
      while (u != v) {
        auto& deeper = tree.depth[u] >= tree.depth[v] ? u : v;
        const auto b = static_cast<std::size_t>(tree.parent_branch[deeper]);
        sp.on_path[b] = 1;
        sp.base_impedance += network.branch_impedance_pu(b);
        deeper = tree.parent_bus[deeper];
      }
      per_source.push_back(std::move(sp));
    }
    paths_.push_back(std::move(per_source));
  }
}

void FaultModel::check_devices(const std::vector<SfclDevice>& devices) const {
  for (const auto& d : devices) {
    const std::string name = "SFCL on branch " + std::to_string(d.branch);
    if (!network_->has_branch(d.branch)) throw std::invalid_argument(name + ": unknown branch");
    if (config_.is_open(d.branch)) throw std::invalid_argument(name + ": branch is open");
    if (!(d.trigger_current_a > 0.0)) throw std::invalid_argument(name + ": trigger current must be positive");
    if (!(d.min_impedance_ohm <= d.impedance_ohm && d.impedance_ohm <= d.max_impedance_ohm)) {
      throw std::invalid_argument(name + ": impedance outside [min, max]");
    }
  }
}

FaultModel::Prepared FaultModel::prepare(const std::vector<SfclDevice>& devices) const {
  Prepared p;
  const double z_base = network_->z_base_ohm();
  for (const auto& d : devices) {
    p.branch.push_back(network_->branch_index(d.branch));
    p.z_min.push_back(device_impedance_pu(d.min_impedance_ohm, d.kind, z_base));
    p.z_full.push_back(device_impedance_pu(d.impedance_ohm, d.kind, z_base));
    p.trigger_a.push_back(d.trigger_current_a);
  }
  return p;
}

std::vector<Complex> FaultModel::source_currents(std::size_t scenario, const Prepared& dev,
                                                 std::vector<std::uint8_t>* quenched) const {
  const auto& paths = paths_[scenario];
  const std::size_t k = dev.branch.size();
  std::vector<Complex> current(paths.size());

  // Prospective currents with every limiter in its low-impedance state.
  for (std::size_t s = 0; s < paths.size(); ++s) {
    Complex z = paths[s].base_impedance;
    for (std::size_t d = 0; d < k; ++d) {
      if (paths[s].on_path[dev.branch[d]]) z += dev.z_min[d];
    }
    current[s] = 1.0 / z;
  }
  if (k == 0) return current;

  // Single-pass quench decision on the total branch current.
  std::vector<std::uint8_t> q(k, 0);
  bool any = false;
  for (std::size_t d = 0; d < k; ++d) {
    Complex through{};
    for (std::size_t s = 0; s < paths.size(); ++s) {
      if (paths[s].on_path[dev.branch[d]]) through += current[s];
    }
    q[d] = std::abs(through) * network_->i_base_a() > dev.trigger_a[d] ? 1 : 0;
    any = any || q[d];
  }
  if (any) {
    for (std::size_t s = 0; s < paths.size(); ++s) {
      Complex z = paths[s].base_impedance;
      for (std::size_t d = 0; d < k; ++d) {
        if (paths[s].on_path[dev.branch[d]]) z += q[d] ? dev.z_full[d] : dev.z_min[d];
      }
      current[s] = 1.0 / z;
    }
  }
  if (quenched) *quenched = std::move(q);
  return current;
}

FaultReport FaultModel::report(std::size_t scenario, const std::vector<SfclDevice>& devices) const {
  check_devices(devices);
  const Prepared dev = prepare(devices);
  std::vector<std::uint8_t> quenched;
  const auto current = source_currents(scenario, dev, &quenched);
  const auto& paths = paths_[scenario];

  FaultReport rep;
  for (std::size_t d = 0; d < quenched.size(); ++d) {
    if (quenched[d]) rep.quenched.insert(devices[d].branch);
  }
  bool first = true;
  for (std::size_t cb : cbs_) {
    Complex through{};
    for (std::size_t s = 0; s < paths.size(); ++s) {
      if (paths[s].on_path[cb]) through += current[s];
    }
    const Branch& br = network_->branches()[cb];
    const double amps = std::abs(through) * network_->i_base_a();
    rep.cb_current_a[br.id] = amps;
    if (first || amps > rep.worst_current_a) {
      rep.worst_cb = br.id;
      rep.worst_current_a = amps;
      first = false;
    }
    if (amps > *br.cb_rating_a) rep.violated.insert(br.id);
  }
  return rep;
}

FaultScan FaultModel::scan(const std::vector<SfclDevice>& devices) const {
  FaultScan out;
  for (std::size_t cb : cbs_) {
    out.worst_current_a[network_->branches()[cb].id] = 0.0;
    out.worst_fault_bus[network_->branches()[cb].id] = faults_.empty() ? 0 : faults_.front().fault_bus;
  }
  for (std::size_t sc = 0; sc < faults_.size(); ++sc) {
    const FaultReport rep = report(sc, devices);
    for (const auto& [id, amps] : rep.cb_current_a) {
      if (amps > out.worst_current_a[id]) {
        out.worst_current_a[id] = amps;
        out.worst_fault_bus[id] = faults_[sc].fault_bus;
      }
    }
  }
  return out;
}

double FaultModel::max_loading(const std::vector<SfclDevice>& devices) const {
  check_devices(devices);
  const Prepared dev = prepare(devices);
  const double i_base = network_->i_base_a();
  double loading = 0.0;
  for (std::size_t sc = 0; sc < faults_.size(); ++sc) {
    const auto current = source_currents(sc, dev, nullptr);
    const auto& paths = paths_[sc];
    for (std::size_t cb : cbs_) {
      Complex through{};
      for (std::size_t s = 0; s < paths.size(); ++s) {
        if (paths[s].on_path[cb]) through += current[s];
      }
      loading = std::max(loading, std::abs(through) * i_base / *network_->branches()[cb].cb_rating_a);
    }
  }
  return loading;
}

FaultReport fault_current(const Network& network, const SwitchConfig& config, const FaultScenario& scenario,
                          const std::vector<SfclDevice>& sfcls) {
  const FaultModel model(network, config, {scenario});
  return model.report(0, sfcls);
}

FaultScan max_fault_scan(const Network& network, const SwitchConfig& config, const std::vector<SfclDevice>& sfcls,
                         const std::vector<FaultScenario>& fault_set) {
  const FaultModel model(network, config, fault_set);
  return model.scan(sfcls);
}

}  // namespace sfcl
