#include "sfcl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

namespace sfcl {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string at(const std::string& section, std::size_t i) {
  return section + "[" + std::to_string(i) + "]";
}

// Adjacency lists sorted by branch id so traversals are deterministic.
std::vector<std::vector<std::size_t>> adjacency(const Network& network) {
  std::vector<std::vector<std::size_t>> adj(network.bus_count());
  for (std::size_t b = 0; b < network.branch_count(); ++b) {
    adj[network.from_index(b)].push_back(b);
    adj[network.to_index(b)].push_back(b);
  }
  const auto& br = network.branches();
  for (auto& list : adj) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) { return br[a].id < br[b].id; });
  }
  return adj;
}

std::size_t other_end(const Network& network, std::size_t branch, std::size_t bus) {
  return network.from_index(branch) == bus ? network.to_index(branch) : network.from_index(branch);
}

void check_open_set(const Network& network, const SwitchConfig& config) {
  for (BranchId id : config.open_branches) {
    if (!network.has_branch(id)) {
      throw std::invalid_argument("switch config: unknown branch " + std::to_string(id));
    }
    if (!network.branches()[network.branch_index(id)].switchable()) {
      throw std::invalid_argument("switch config: branch " + std::to_string(id) + " has no switch");
    }
  }
}

}  // namespace

std::string to_string(SwitchKind kind) {
  switch (kind) {
    case SwitchKind::none: return "none";
    case SwitchKind::sectionalizing: return "sectionalizing";
    case SwitchKind::tie: return "tie";
  }
  return "none";
}

SwitchKind switch_kind_from_string(const std::string& text) {
  if (text == "none") return SwitchKind::none;
  if (text == "sectionalizing") return SwitchKind::sectionalizing;
  if (text == "tie") return SwitchKind::tie;
  throw GridError("unknown switch kind '" + text + "'");
}

std::string format_switches(const SwitchConfig& config) {
  std::string out;
  for (BranchId id : config.open_branches) {
    if (!out.empty()) out += ',';
    out += 's' + std::to_string(id);
  }
  return out;
}

Network::Network(NetworkData data) : data_(std::move(data)) {
  if (!(data_.base_kv > 0.0)) throw GridError("base_kv: must be positive");
  if (!(data_.base_mva > 0.0)) throw GridError("base_mva: must be positive");
  if (data_.buses.empty()) throw GridError("buses: network has no buses");

  for (const auto& [name, curve] : data_.ccdf_curves) {
    const std::string loc = "ccdf_curves." + name;
    if (curve.knots.size() < 2) throw GridError(loc + ": needs at least 2 knots");
    for (std::size_t k = 0; k < curve.knots.size(); ++k) {
      const auto [minutes, cost] = curve.knots[k];
      if (cost < 0.0) throw GridError(at(loc, k) + ": negative cost");
      if (minutes < 0.0) throw GridError(at(loc, k) + ": negative duration");
      if (k > 0) {
        if (!(minutes > curve.knots[k - 1].first)) throw GridError(at(loc, k) + ": durations must strictly increase");
        if (cost < curve.knots[k - 1].second) throw GridError(at(loc, k) + ": costs must not decrease");
      }
    }
  }

  int substations = 0;
  for (std::size_t i = 0; i < data_.buses.size(); ++i) {
    const Bus& bus = data_.buses[i];
    if (!bus_index_.emplace(bus.id, i).second) {
      throw GridError(at("buses", i) + ": duplicate bus id " + std::to_string(bus.id));
    }
    if (bus.is_substation) {
      ++substations;
      substation_ = i;
    } else if (bus.load_p_kw < 0.0 || bus.load_q_kvar < 0.0) {
      throw GridError(at("buses", i) + ": negative load");
    }
    if (!bus.ccdf.empty() && data_.ccdf_curves.count(bus.ccdf) == 0) {
      throw GridError(at("buses", i) + ": unknown ccdf curve '" + bus.ccdf + "'");
    }
  }
  if (substations == 0) throw GridError("buses: missing substation");
  if (substations > 1) throw GridError("buses: more than one substation");

  const double z_base = z_base_ohm();
  for (std::size_t i = 0; i < data_.branches.size(); ++i) {
    const Branch& br = data_.branches[i];
    const std::string loc = at("branches", i);
    if (!branch_index_.emplace(br.id, i).second) {
      throw GridError(loc + ": duplicate branch id " + std::to_string(br.id));
    }
    auto from = bus_index_.find(br.from_bus);
    auto to = bus_index_.find(br.to_bus);
    if (from == bus_index_.end()) throw GridError(loc + ": unknown bus " + std::to_string(br.from_bus));
    if (to == bus_index_.end()) throw GridError(loc + ": unknown bus " + std::to_string(br.to_bus));
    if (br.from_bus == br.to_bus) throw GridError(loc + ": from_bus equals to_bus");
    if (br.resistance_ohm < 0.0 || br.reactance_ohm < 0.0) throw GridError(loc + ": negative impedance");
    if (br.failure_rate < 0.0) throw GridError(loc + ": negative failure rate");
    if (br.cb_rating_a && !(*br.cb_rating_a > 0.0)) throw GridError(loc + ": cb rating must be positive");
    ends_.emplace_back(from->second, to->second);
    z_pu_.emplace_back(br.resistance_ohm / z_base, br.reactance_ohm / z_base);
  }

  for (std::size_t i = 0; i < data_.dgs.size(); ++i) {
    const auto& dg = data_.dgs[i];
    if (bus_index_.count(dg.bus) == 0) throw GridError(at("dgs", i) + ": unknown bus " + std::to_string(dg.bus));
    if (!(dg.capacity_mw > 0.0)) throw GridError(at("dgs", i) + ": capacity must be positive");
    if (!(dg.subtransient_reactance_ohm > 0.0)) throw GridError(at("dgs", i) + ": reactance must be positive");
  }

  if (data_.levels.empty()) throw GridError("load_levels: at least one level required");
  double days = 0.0;
  std::set<int> seen;
  for (std::size_t i = 0; i < data_.levels.size(); ++i) {
    const auto& lv = data_.levels[i];
    if (!seen.insert(lv.index).second) throw GridError(at("load_levels", i) + ": duplicate index");
    if (!(lv.scale > 0.0 && lv.scale <= 1.0)) throw GridError(at("load_levels", i) + ": scale must be in (0, 1]");
    if (!(lv.duration_days > 0.0)) throw GridError(at("load_levels", i) + ": duration must be positive");
    days += lv.duration_days;
  }
  if (std::abs(days - 365.0) > 1e-9) {
    throw GridError("load_levels: durations sum to " + std::to_string(days) + " days, expected 365");
  }

  DisjointSet ds(data_.buses.size());
  std::size_t components = data_.buses.size();
  for (const auto& [a, b] : ends_) {
    if (ds.unite(a, b)) --components;
  }
  if (components != 1) throw GridError("branches: network graph is disconnected");
}

std::size_t Network::bus_index(BusId id) const {
  auto it = bus_index_.find(id);
  if (it == bus_index_.end()) throw GridError("unknown bus " + std::to_string(id));
  return it->second;
}

std::size_t Network::branch_index(BranchId id) const {
  auto it = branch_index_.find(id);
  if (it == branch_index_.end()) throw GridError("unknown branch " + std::to_string(id));
  return it->second;
}

const LoadLevel& Network::level(int index) const {
  for (const auto& lv : data_.levels) {
    if (lv.index == index) return lv;
  }
  throw GridError("unknown load level " + std::to_string(index));
}

double Network::i_base_a() const {
  return data_.base_mva * 1e6 / (std::sqrt(3.0) * data_.base_kv * 1e3);
}

Complex Network::source_impedance_pu() const {
  const Bus& sub = data_.buses[substation_];
  return Complex(sub.source_r_ohm, sub.source_x_ohm) / z_base_ohm();
}

// ---------------------------------------------------------------------------
// JSON

Network parse_grid(const nlohmann::json& doc) {
  NetworkData d;
  auto section = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key)) throw GridError(std::string(key) + ": missing");
    return doc.at(key);
  };
  std::string where = "grid";
  try {
    d.base_kv = doc.at("base_kv").get<double>();
    d.base_mva = doc.value("base_mva", 10.0);

    if (doc.contains("ccdf_curves")) {
      for (const auto& [name, knots] : doc.at("ccdf_curves").items()) {
        where = "ccdf_curves." + name;
        CcdfCurve curve;
        for (const auto& k : knots) curve.knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
        d.ccdf_curves.emplace(name, std::move(curve));
      }
    }

    const auto& buses = section("buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
      where = at("buses", i);
      const auto& b = buses[i];
      Bus bus;
      bus.id = b.at("id").get<int>();
      bus.load_p_kw = b.value("p_kw", 0.0);
      bus.load_q_kvar = b.value("q_kvar", 0.0);
      bus.ccdf = b.value("ccdf", std::string{});
      bus.is_substation = b.value("substation", false);
      if (bus.is_substation) {
        bus.source_r_ohm = b.value("source_r_ohm", 0.0);
        bus.source_x_ohm = b.value("source_x_ohm", 0.0);
      }
      d.buses.push_back(std::move(bus));
    }

    const auto& branches = section("branches");
    for (std::size_t i = 0; i < branches.size(); ++i) {
      where = at("branches", i);
      const auto& b = branches[i];
      Branch br;
      br.id = b.at("id").get<int>();
      br.from_bus = b.at("from").get<int>();
      br.to_bus = b.at("to").get<int>();
      br.resistance_ohm = b.at("r_ohm").get<double>();
      br.reactance_ohm = b.at("x_ohm").get<double>();
      br.switch_kind = switch_kind_from_string(b.value("switch", std::string("none")));
      br.failure_rate = b.value("failure_rate", 0.0);
      br.ampacity_a = b.value("ampacity_a", 0.0);
      br.flow_limit_kw = b.value("flow_limit_kw", 0.0);
      if (b.contains("cb_rating_a") && !b.at("cb_rating_a").is_null()) br.cb_rating_a = b.at("cb_rating_a").get<double>();
      d.branches.push_back(br);
    }

    if (doc.contains("dgs")) {
      const auto& dgs = doc.at("dgs");
      for (std::size_t i = 0; i < dgs.size(); ++i) {
        where = at("dgs", i);
        DistributedGenerator dg;
        dg.bus = dgs[i].at("bus").get<int>();
        dg.capacity_mw = dgs[i].at("capacity_mw").get<double>();
        dg.subtransient_reactance_ohm = dgs[i].at("xd_subtransient_ohm").get<double>();
        d.dgs.push_back(dg);
      }
    }

    const auto& levels = section("load_levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      where = at("load_levels", i);
      LoadLevel lv;
      lv.index = levels[i].at("index").get<int>();
      lv.scale = levels[i].at("scale").get<double>();
      lv.duration_days = levels[i].at("duration_days").get<double>();
      d.levels.push_back(lv);
    }
  } catch (const nlohmann::json::exception& e) {
    throw GridError(where + ": " + e.what());
  }
  return Network(std::move(d));
}

Network load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GridError(path + ": cannot open");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw GridError(path + ": " + e.what());
  }
  try {
    return parse_grid(doc);
  } catch (const GridError& e) {
    throw GridError(path + ": " + e.what());
  }
}

nlohmann::ordered_json grid_to_json(const Network& network) {
  using oj = nlohmann::ordered_json;
  oj doc;
  doc["base_kv"] = network.base_kv();
  doc["base_mva"] = network.base_mva();

  oj buses = oj::array();
  for (const auto& b : network.buses()) {
    oj j;
    j["id"] = b.id;
    j["p_kw"] = b.load_p_kw;
    j["q_kvar"] = b.load_q_kvar;
    j["ccdf"] = b.ccdf;
    j["substation"] = b.is_substation;
    if (b.is_substation) {
      j["source_r_ohm"] = b.source_r_ohm;
      j["source_x_ohm"] = b.source_x_ohm;
    }
    buses.push_back(std::move(j));
  }
  doc["buses"] = std::move(buses);

  oj branches = oj::array();
  for (const auto& br : network.branches()) {
    oj j;
    j["id"] = br.id;
    j["from"] = br.from_bus;
    j["to"] = br.to_bus;
    j["r_ohm"] = br.resistance_ohm;
    j["x_ohm"] = br.reactance_ohm;
    j["switch"] = to_string(br.switch_kind);
    j["failure_rate"] = br.failure_rate;
    j["ampacity_a"] = br.ampacity_a;
    j["flow_limit_kw"] = br.flow_limit_kw;
    if (br.cb_rating_a) j["cb_rating_a"] = *br.cb_rating_a;
    branches.push_back(std::move(j));
  }
  doc["branches"] = std::move(branches);

  oj dgs = oj::array();
  for (const auto& dg : network.dgs()) {
    dgs.push_back({{"bus", dg.bus}, {"capacity_mw", dg.capacity_mw}, {"xd_subtransient_ohm", dg.subtransient_reactance_ohm}});
  }
  doc["dgs"] = std::move(dgs);

  oj levels = oj::array();
  for (const auto& lv : network.levels()) {
    levels.push_back({{"index", lv.index}, {"scale", lv.scale}, {"duration_days", lv.duration_days}});
  }
  doc["load_levels"] = std::move(levels);

  oj curves = oj::object();
  for (const auto& [name, curve] : network.ccdf_curves()) {
    oj knots = oj::array();
    for (const auto& [m, c] : curve.knots) knots.push_back({m, c});
    curves[name] = std::move(knots);
  }
  doc["ccdf_curves"] = std::move(curves);
  return doc;
}

void save_grid(const Network& network, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GridError(path + ": cannot write");
  out << grid_to_json(network).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Topology

int fundamental_loop_count(const Network& network) {
  return static_cast<int>(network.branch_count()) - static_cast<int>(network.bus_count()) + 1;
}

std::vector<std::vector<BranchId>> fundamental_loops(const Network& network) {
  const auto adj = adjacency(network);
  const auto& br = network.branches();
  const std::size_t n = network.bus_count();

  std::vector<bool> visited(n, false), in_tree(network.branch_count(), false);
  std::vector<std::ptrdiff_t> parent_bus(n, -1), parent_branch(n, -1);
  std::vector<int> depth(n, 0);

  std::function<void(std::size_t, bool)> visit = [&](std::size_t u, bool allow_tie) {
    visited[u] = true;
    for (std::size_t b : adj[u]) {
      if (!allow_tie && br[b].switch_kind == SwitchKind::tie) continue;
      const std::size_t v = other_end(network, b, u);
      if (visited[v]) continue;
      in_tree[b] = true;
      parent_bus[v] = static_cast<std::ptrdiff_t>(u);
      parent_branch[v] = static_cast<std::ptrdiff_t>(b);
      depth[v] = depth[u] + 1;
      visit(v, allow_tie);
    }
  };
  visit(network.substation_index(), false);

  // Buses reachable only through ties.
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<std::size_t> by_id(network.branch_count());
    std::iota(by_id.begin(), by_id.end(), 0);
    std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return br[a].id < br[b].id; });
    for (std::size_t b : by_id) {
      const std::size_t f = network.from_index(b), t = network.to_index(b);
      if (visited[f] == visited[t]) continue;
      const std::size_t u = visited[f] ? f : t, v = visited[f] ? t : f;
      in_tree[b] = true;
      parent_bus[v] = static_cast<std::ptrdiff_t>(u);
      parent_branch[v] = static_cast<std::ptrdiff_t>(b);
      depth[v] = depth[u] + 1;
      visit(v, true);
      grew = true;
    }
  }

  std::vector<std::size_t> chords;
  for (std::size_t b = 0; b < network.branch_count(); ++b) {
    if (!in_tree[b]) chords.push_back(b);
  }
  std::sort(chords.begin(), chords.end(), [&](std::size_t a, std::size_t b) { return br[a].id < br[b].id; });

  std::vector<std::vector<BranchId>> loops;
  for (std::size_t c : chords) {
    std::vector<BranchId> loop{br[c].id};
    auto u = static_cast<std::ptrdiff_t>(network.from_index(c));
    auto v = static_cast<std::ptrdiff_t>(network.to_index(c));
    while (u != v) {
      if (depth[u] >= depth[v]) {
        loop.push_back(br[parent_branch[u]].id);
        u = parent_bus[u];
      } else {
        loop.push_back(br[parent_branch[v]].id);
        v = parent_bus[v];
      }
    }
    std::sort(loop.begin(), loop.end());
    loops.push_back(std::move(loop));
  }
  return loops;
}

bool is_radial(const Network& network, const SwitchConfig& config) {
  check_open_set(network, config);
  const std::size_t closed = network.branch_count() - config.open_branches.size();
  if (closed + 1 != network.bus_count()) return false;
  DisjointSet ds(network.bus_count());
  for (std::size_t b = 0; b < network.branch_count(); ++b) {
    if (config.is_open(network.branches()[b].id)) continue;
    if (!ds.unite(network.from_index(b), network.to_index(b))) return false;
  }
  return true;
}

RadialTree build_radial_tree(const Network& network, const SwitchConfig& config) {
  if (!is_radial(network, config)) {
    throw std::invalid_argument("configuration {" + format_switches(config) + "} is not radial");
  }
  const auto adj = adjacency(network);
  const std::size_t n = network.bus_count();
  RadialTree tree;
  tree.parent_bus.assign(n, -1);
  tree.parent_branch.assign(n, -1);
  tree.depth.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> q;
  q.push(network.substation_index());
  seen[network.substation_index()] = true;
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    tree.order.push_back(u);
    for (std::size_t b : adj[u]) {
      if (config.is_open(network.branches()[b].id)) continue;
      const std::size_t v = other_end(network, b, u);
      if (seen[v]) continue;
      seen[v] = true;
      tree.parent_bus[v] = static_cast<std::ptrdiff_t>(u);
      tree.parent_branch[v] = static_cast<std::ptrdiff_t>(b);
      tree.depth[v] = tree.depth[u] + 1;
      q.push(v);
    }
  }
  return tree;
}

}  // namespace sfcl
