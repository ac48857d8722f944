#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace sfcl {

using BusId = int;
using BranchId = int;
using Complex = std::complex<double>;

/// Raised for malformed or inconsistent grid input. The message carries the
/// location (e.g. "branches[3]") of the offending entry.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SwitchKind { none, sectionalizing, tie };

std::string to_string(SwitchKind kind);
SwitchKind switch_kind_from_string(const std::string& text);

struct Bus {
  BusId id = 0;
  double load_p_kw = 0.0;    // peak
  double load_q_kvar = 0.0;  // peak
  std::string ccdf;          // key into Network::ccdf_curves
  bool is_substation = false;
  // Upstream grid Thevenin impedance, meaningful on the substation bus only.
  double source_r_ohm = 0.0;
  double source_x_ohm = 0.0;

  bool operator==(const Bus&) const = default;
};

struct Branch {
  BranchId id = 0;
  BusId from_bus = 0;
  BusId to_bus = 0;
  double resistance_ohm = 0.0;
  double reactance_ohm = 0.0;
  SwitchKind switch_kind = SwitchKind::none;
  double failure_rate = 0.0;  // failures / year
  double ampacity_a = 0.0;
  double flow_limit_kw = 0.0;
  std::optional<double> cb_rating_a;  // breaking capacity, present iff a CB sits on the branch

  bool has_cb() const { return cb_rating_a.has_value(); }
  bool switchable() const { return switch_kind != SwitchKind::none; }
  bool operator==(const Branch&) const = default;
};

struct DistributedGenerator {
  BusId bus = 0;
  double capacity_mw = 0.0;
  double subtransient_reactance_ohm = 0.0;

  bool operator==(const DistributedGenerator&) const = default;
};

struct LoadLevel {
  int index = 0;
  double scale = 1.0;
  double duration_days = 365.0;

  bool operator==(const LoadLevel&) const = default;
};

/// Composite customer damage function: (duration [min], cost [$/kW]) knots.
struct CcdfCurve {
  std::vector<std::pair<double, double>> knots;

  bool operator==(const CcdfCurve&) const = default;
};

/// The set of open branches defining one topology.
struct SwitchConfig {
  std::set<BranchId> open_branches;

  bool is_open(BranchId id) const { return open_branches.count(id) != 0; }
  bool operator==(const SwitchConfig&) const = default;
  auto operator<=>(const SwitchConfig&) const = default;
};

std::string format_switches(const SwitchConfig& config);  // "s6,s9,s13"

struct NetworkData {
  double base_kv = 12.66;
  double base_mva = 10.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<DistributedGenerator> dgs;
  std::vector<LoadLevel> levels;
  std::map<std::string, CcdfCurve> ccdf_curves;

  bool operator==(const NetworkData&) const = default;
};

/// Immutable, validated distribution network. Index-based accessors are the
/// fast path used by the solvers; ids are the external names.
class Network {
 public:
  /// Validates and indexes. Throws GridError.
  explicit Network(NetworkData data);

  const NetworkData& data() const { return data_; }
  const std::vector<Bus>& buses() const { return data_.buses; }
  const std::vector<Branch>& branches() const { return data_.branches; }
  const std::vector<DistributedGenerator>& dgs() const { return data_.dgs; }
  const std::vector<LoadLevel>& levels() const { return data_.levels; }
  const std::map<std::string, CcdfCurve>& ccdf_curves() const { return data_.ccdf_curves; }
  double base_kv() const { return data_.base_kv; }
  double base_mva() const { return data_.base_mva; }

  std::size_t bus_count() const { return data_.buses.size(); }
  std::size_t branch_count() const { return data_.branches.size(); }

  std::size_t bus_index(BusId id) const;        // throws GridError
  std::size_t branch_index(BranchId id) const;  // throws GridError
  bool has_branch(BranchId id) const { return branch_index_.count(id) != 0; }
  std::size_t substation_index() const { return substation_; }
  std::size_t from_index(std::size_t branch) const { return ends_[branch].first; }
  std::size_t to_index(std::size_t branch) const { return ends_[branch].second; }

  const LoadLevel& level(int index) const;  // throws GridError

  double z_base_ohm() const { return data_.base_kv * data_.base_kv / data_.base_mva; }
  double i_base_a() const;
  Complex branch_impedance_pu(std::size_t branch) const { return z_pu_[branch]; }
  Complex source_impedance_pu() const;

  bool operator==(const Network& other) const { return data_ == other.data_; }

 private:
  NetworkData data_;
  std::map<BusId, std::size_t> bus_index_;
  std::map<BranchId, std::size_t> branch_index_;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
  std::vector<Complex> z_pu_;
  std::size_t substation_ = 0;
};

Network parse_grid(const nlohmann::json& doc);
Network load_grid(const std::string& path);
/// Keys are emitted in schema order.
nlohmann::ordered_json grid_to_json(const Network& network);
void save_grid(const Network& network, const std::string& path);

// Topology predicates.

/// Independent cycle count: branches - buses + 1.
int fundamental_loop_count(const Network& network);

/// One branch-id list per fundamental loop, each sorted by id. The spanning
/// tree is a depth-first tree from the substation over non-tie branches
/// (ordered by id); any bus left unreached is then attached through tie
/// branches. Each co-tree branch closes exactly one loop; loops are ordered by
/// co-tree branch id.
std::vector<std::vector<BranchId>> fundamental_loops(const Network& network);

/// Connected and acyclic over closed branches. Throws std::invalid_argument
/// on unknown or non-switchable open branches.
bool is_radial(const Network& network, const SwitchConfig& config);

/// Rooted view of a radial configuration: parent branch per bus, BFS order.
struct RadialTree {
  std::vector<std::ptrdiff_t> parent_bus;     // -1 at the root
  std::vector<std::ptrdiff_t> parent_branch;  // branch index, -1 at the root
  std::vector<std::size_t> order;             // root first, parents before children
  std::vector<int> depth;
};

/// Throws std::invalid_argument when the configuration is not radial.
RadialTree build_radial_tree(const Network& network, const SwitchConfig& config);

}  // namespace sfcl
