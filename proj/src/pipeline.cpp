#include "sfcl/pipeline.hpp"

#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sfcl/reconfig.hpp"
#include "sfcl/short_circuit.hpp"

namespace sfcl {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw std::invalid_argument(where + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(where + "." + key + ": " + e.what());
  }
}

// Non-finite values become null.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }
double num_from(const ordered_json& v) { return v.is_null() ? kInf : v.get<double>(); }

ordered_json switches_json(const SwitchConfig& c) { return ordered_json(c.open_branches); }
SwitchConfig switches_from(const ordered_json& v) { return SwitchConfig{v.get<std::set<BranchId>>()}; }

ordered_json per_level_json(const std::map<int, double>& m) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = num(v);
  return out;
}

template <typename K>
std::map<K, double> keyed_from(const ordered_json& obj) {
  std::map<K, double> out;
  for (const auto& [k, v] : obj.items()) out[static_cast<K>(std::stoi(k))] = num_from(v);
  return out;
}

ordered_json cost_json(const CostBreakdown& c) {
  ordered_json j;
  j["loss_cost"] = per_level_json(c.loss_cost);
  j["reliability_cost"] = per_level_json(c.reliability_cost);
  j["penalty"] = num(c.penalty);
  j["total"] = num(c.total);
  return j;
}

CostBreakdown cost_from(const ordered_json& j) {
  CostBreakdown c;
  c.loss_cost = keyed_from<int>(j.at("loss_cost"));
  c.reliability_cost = keyed_from<int>(j.at("reliability_cost"));
  c.penalty = num_from(j.at("penalty"));
  c.total = num_from(j.at("total"));
  return c;
}

ordered_json device_json(const SfclDevice& d) {
  ordered_json j;
  j["location"] = d.branch;
  j["resistance_ohm"] = d.impedance_ohm;
  j["kind"] = d.kind == SfclKind::resistive ? "resistive" : "inductive";
  j["trigger_current_a"] = d.trigger_current_a;
  j["response_time_ms"] = d.response_time_ms;
  j["min_impedance_ohm"] = d.min_impedance_ohm;
  j["max_impedance_ohm"] = d.max_impedance_ohm;
  return j;
}

SfclDevice device_from(const ordered_json& j) {
  SfclDevice d;
  d.branch = j.at("location").get<BranchId>();
  d.impedance_ohm = j.at("resistance_ohm").get<double>();
  d.kind = j.at("kind").get<std::string>() == "inductive" ? SfclKind::inductive : SfclKind::resistive;
  d.trigger_current_a = j.at("trigger_current_a").get<double>();
  d.response_time_ms = j.at("response_time_ms").get<double>();
  d.min_impedance_ohm = j.at("min_impedance_ohm").get<double>();
  d.max_impedance_ohm = j.at("max_impedance_ohm").get<double>();
  return d;
}

ordered_json placement_json(const SfclPlacementResult& r) {
  ordered_json j;
  j["feasible"] = r.feasible;
  j["objective"] = num(r.objective);
  j["exhaustive"] = r.exhaustive;
  j["subsets_evaluated"] = r.subsets_evaluated;
  j["devices"] = ordered_json::array();
  for (const auto& d : r.devices) j["devices"].push_back(device_json(d));
  ordered_json res = ordered_json::object();
  for (const auto& [id, a] : r.residual_violations) res[std::to_string(id)] = num(a);
  j["residual_violations_a"] = res;
  return j;
}

SfclPlacementResult placement_from(const ordered_json& j) {
  SfclPlacementResult r;
  r.feasible = j.at("feasible").get<bool>();
  r.objective = num_from(j.at("objective"));
  r.exhaustive = j.at("exhaustive").get<bool>();
  r.subsets_evaluated = j.at("subsets_evaluated").get<long>();
  for (const auto& d : j.at("devices")) r.devices.push_back(device_from(d));
  r.residual_violations = keyed_from<BranchId>(j.at("residual_violations_a"));
  return r;
}

ordered_json cb_map_json(const std::map<BranchId, double>& m) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = num(v);
  return out;
}

ordered_json level_json(const LevelReport& lv) {
  ordered_json j;
  j["level"] = lv.level;
  j["scale"] = lv.scale;
  j["duration_days"] = lv.duration_days;
  j["base_config"] = switches_json(lv.base_config);
  j["base_cost"] = cost_json(lv.base_cost);
  j["open_switches"] = switches_json(lv.config);
  j["cost"] = cost_json(lv.cost);
  ordered_json pf;
  pf["total_loss_kw"] = num(lv.power_flow.total_loss_kw);
  pf["min_voltage_pu"] = num(lv.power_flow.min_voltage_pu);
  pf["max_voltage_pu"] = num(lv.power_flow.max_voltage_pu);
  pf["substation_kw"] = num(lv.power_flow.substation_kw);
  pf["converged"] = lv.power_flow.converged;
  pf["iterations"] = lv.power_flow.iterations;
  j["power_flow"] = pf;
  ordered_json f;
  f["worst_without_sfcl_a"] = num(lv.fault.worst_without_a);
  f["worst_with_sfcl_a"] = num(lv.fault.worst_with_a);
  f["worst_with_aggregate_a"] = num(lv.fault.worst_with_aggregate_a);
  f["without_sfcl_a"] = cb_map_json(lv.fault.without_sfcl_a);
  f["with_sfcl_a"] = cb_map_json(lv.fault.with_sfcl_a);
  f["with_aggregate_a"] = cb_map_json(lv.fault.with_aggregate_a);
  j["fault"] = f;
  j["placement"] = placement_json(lv.placement);
  j["evaluations"] = lv.evaluations;
  j["distinct_configs"] = lv.distinct_configs;
  ordered_json trace = ordered_json::array();
  for (const auto& row : lv.trace) trace.push_back({row.iteration, num(row.best_fitness), num(row.mean_fitness)});
  j["trace"] = trace;
  return j;
}

LevelReport level_from(const ordered_json& j) {
  LevelReport lv;
  lv.level = j.at("level").get<int>();
  lv.scale = j.at("scale").get<double>();
  lv.duration_days = j.at("duration_days").get<double>();
  lv.base_config = switches_from(j.at("base_config"));
  lv.base_cost = cost_from(j.at("base_cost"));
  lv.config = switches_from(j.at("open_switches"));
  lv.cost = cost_from(j.at("cost"));
  const ordered_json& pf = j.at("power_flow");
  lv.power_flow.total_loss_kw = num_from(pf.at("total_loss_kw"));
  lv.power_flow.min_voltage_pu = num_from(pf.at("min_voltage_pu"));
  lv.power_flow.max_voltage_pu = num_from(pf.at("max_voltage_pu"));
  lv.power_flow.substation_kw = num_from(pf.at("substation_kw"));
  lv.power_flow.converged = pf.at("converged").get<bool>();
  lv.power_flow.iterations = pf.at("iterations").get<int>();
  const ordered_json& f = j.at("fault");
  lv.fault.worst_without_a = num_from(f.at("worst_without_sfcl_a"));
  lv.fault.worst_with_a = num_from(f.at("worst_with_sfcl_a"));
  lv.fault.worst_with_aggregate_a = num_from(f.at("worst_with_aggregate_a"));
  lv.fault.without_sfcl_a = keyed_from<BranchId>(f.at("without_sfcl_a"));
  lv.fault.with_sfcl_a = keyed_from<BranchId>(f.at("with_sfcl_a"));
  lv.fault.with_aggregate_a = keyed_from<BranchId>(f.at("with_aggregate_a"));
  lv.placement = placement_from(j.at("placement"));
  lv.evaluations = j.at("evaluations").get<long>();
  lv.distinct_configs = j.at("distinct_configs").get<long>();
  for (const auto& row : j.at("trace")) {
    lv.trace.push_back({row.at(0).get<int>(), num_from(row.at(1)), num_from(row.at(2))});
  }
  return lv;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string fmt(double v, int precision = 6) {
  if (!std::isfinite(v)) return "inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string join_switches(const SwitchConfig& c) {
  std::string out;
  for (BranchId id : c.open_branches) out += (out.empty() ? "" : " ") + std::to_string(id);
  return out;
}

FaultScan scan_with(const PlacementContext& ctx, const std::vector<SfclDevice>& devices) {
  return ctx.model().scan(devices);
}

}  // namespace

bool RunConfig::operator==(const RunConfig& other) const {
  return run_config_to_json(*this) == run_config_to_json(other);
}

RunConfig parse_run_config(const json& doc, const std::string& base_dir) {
  RunConfig c;
  reject_unknown(doc, {"grid", "seed", "output_dir", "ssa", "cost", "power_flow", "placement", "subtransient_factor"},
                 "run config");
  read(doc, "grid", c.grid_path, "run config");
  read(doc, "seed", c.seed, "run config");
  read(doc, "output_dir", c.output_dir, "run config");
  read(doc, "subtransient_factor", c.subtransient_factor, "run config");
  if (!c.grid_path.empty() && !base_dir.empty() && fs::path(c.grid_path).is_relative()) {
    c.grid_path = (fs::path(base_dir) / c.grid_path).lexically_normal().string();
  }

  if (doc.contains("ssa")) {
    const json& s = doc.at("ssa");
    reject_unknown(s,
                   {"population_size", "iterations", "attraction_probability", "levy_probability", "levy_beta",
                    "female_count"},
                   "ssa");
    read(s, "population_size", c.ssa.population_size, "ssa");
    read(s, "iterations", c.ssa.iterations, "ssa");
    read(s, "attraction_probability", c.ssa.attraction_probability, "ssa");
    read(s, "levy_probability", c.ssa.levy_probability, "ssa");
    if (s.contains("levy_beta")) {
      const auto range = s.at("levy_beta").get<std::vector<double>>();
      if (range.size() != 2) throw std::invalid_argument("ssa.levy_beta: expected [min, max]");
      c.ssa.levy_beta_min = range[0];
      c.ssa.levy_beta_max = range[1];
    }
    if (s.contains("female_count") && !s.at("female_count").is_null()) c.ssa.female_count = s.at("female_count").get<int>();
  }
  if (doc.contains("cost")) {
    const json& s = doc.at("cost");
    reject_unknown(s, {"loss_price", "repair_duration_min", "v_min", "v_max", "penalty_weight"}, "cost");
    read(s, "loss_price", c.cost.loss_price, "cost");
    read(s, "repair_duration_min", c.cost.repair_duration_min, "cost");
    read(s, "v_min", c.cost.bounds.v_min, "cost");
    read(s, "v_max", c.cost.bounds.v_max, "cost");
    read(s, "penalty_weight", c.cost.penalty_weight, "cost");
  }
  if (doc.contains("power_flow")) {
    const json& s = doc.at("power_flow");
    reject_unknown(s, {"include_dgs", "tolerance_pu", "max_sweeps"}, "power_flow");
    read(s, "include_dgs", c.power_flow.include_dgs, "power_flow");
    read(s, "tolerance_pu", c.power_flow.tolerance_pu, "power_flow");
    read(s, "max_sweeps", c.power_flow.max_sweeps, "power_flow");
  }
  if (doc.contains("placement")) {
    const json& s = doc.at("placement");
    reject_unknown(s,
                   {"candidates", "omega", "z_min_ohm", "z_max_ohm", "cb_ratings_a", "fault_set", "exhaustive_cap",
                    "tolerance_ohm", "max_bisection_iterations", "trigger_current_a", "kind"},
                   "placement");
    auto& p = c.placement;
    read(s, "candidates", p.candidates, "placement");
    read(s, "omega", p.omega, "placement");
    read(s, "z_min_ohm", p.z_min_ohm, "placement");
    read(s, "z_max_ohm", p.z_max_ohm, "placement");
    read(s, "exhaustive_cap", p.exhaustive_cap, "placement");
    read(s, "tolerance_ohm", p.tolerance_ohm, "placement");
    read(s, "max_bisection_iterations", p.max_bisection_iterations, "placement");
    read(s, "trigger_current_a", p.trigger_current_a, "placement");
    if (s.contains("kind")) {
      const auto kind = s.at("kind").get<std::string>();
      if (kind != "resistive" && kind != "inductive") throw std::invalid_argument("placement.kind: " + kind);
      p.kind = kind == "inductive" ? SfclKind::inductive : SfclKind::resistive;
    }
    if (s.contains("cb_ratings_a")) {
      for (const auto& [k, v] : s.at("cb_ratings_a").items()) p.cb_ratings_a[std::stoi(k)] = v.get<double>();
    }
    if (s.contains("fault_set")) {
      for (const auto& f : s.at("fault_set")) {
        reject_unknown(f, {"bus", "impedance_ohm"}, "placement.fault_set");
        FaultScenario sc;
        sc.fault_bus = f.at("bus").get<BusId>();
        read(f, "impedance_ohm", sc.fault_impedance_ohm, "placement.fault_set");
        p.fault_set.push_back(sc);
      }
    }
    p.validate();
  }
  c.ssa.seed = c.seed;
  c.ssa.validate();
  if (!(c.subtransient_factor > 0.0)) throw std::invalid_argument("subtransient_factor must be positive");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return parse_run_config(doc, fs::path(path).parent_path().string());
}

ordered_json run_config_to_json(const RunConfig& c) {
  ordered_json j;
  j["grid"] = c.grid_path;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["subtransient_factor"] = c.subtransient_factor;
  ordered_json s;
  s["population_size"] = c.ssa.population_size;
  s["iterations"] = c.ssa.iterations;
  s["attraction_probability"] = c.ssa.attraction_probability;
  s["levy_probability"] = c.ssa.levy_probability;
  s["levy_beta"] = {c.ssa.levy_beta_min, c.ssa.levy_beta_max};
  s["female_count"] = c.ssa.female_count ? ordered_json(*c.ssa.female_count) : ordered_json(nullptr);
  j["ssa"] = s;
  ordered_json co;
  co["loss_price"] = c.cost.loss_price;
  co["repair_duration_min"] = c.cost.repair_duration_min;
  co["v_min"] = c.cost.bounds.v_min;
  co["v_max"] = c.cost.bounds.v_max;
  co["penalty_weight"] = c.cost.penalty_weight;
  j["cost"] = co;
  ordered_json pf;
  pf["include_dgs"] = c.power_flow.include_dgs;
  pf["tolerance_pu"] = c.power_flow.tolerance_pu;
  pf["max_sweeps"] = c.power_flow.max_sweeps;
  j["power_flow"] = pf;
  const auto& p = c.placement;
  ordered_json pl;
  pl["candidates"] = p.candidates;
  pl["omega"] = p.omega;
  pl["z_min_ohm"] = p.z_min_ohm;
  pl["z_max_ohm"] = p.z_max_ohm;
  ordered_json ratings = ordered_json::object();
  for (const auto& [id, a] : p.cb_ratings_a) ratings[std::to_string(id)] = a;
  pl["cb_ratings_a"] = ratings;
  ordered_json faults = ordered_json::array();
  for (const auto& f : p.fault_set) faults.push_back({{"bus", f.fault_bus}, {"impedance_ohm", f.fault_impedance_ohm}});
  pl["fault_set"] = faults;
  pl["exhaustive_cap"] = p.exhaustive_cap;
  pl["tolerance_ohm"] = p.tolerance_ohm;
  pl["max_bisection_iterations"] = p.max_bisection_iterations;
  pl["trigger_current_a"] = p.trigger_current_a;
  pl["kind"] = p.kind == SfclKind::inductive ? "inductive" : "resistive";
  j["placement"] = pl;
  return j;
}

SwitchConfig base_config(const Network& network) {
  SwitchConfig c;
  for (const auto& br : network.branches()) {
    if (br.switch_kind == SwitchKind::tie) c.open_branches.insert(br.id);
  }
  return c;
}

std::uint64_t level_seed(std::uint64_t seed, int level) {
  return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(level);
}

RunReport run_pipeline(const RunConfig& config, const PipelineStages& stages) {
  std::optional<Network> network;
  try {
    network.emplace(load_grid(config.grid_path));
  } catch (const std::exception& e) {
    RunReport report;
    report.generated_at = utc_now();
    report.config = run_config_to_json(config);
    report.failed_at = "load";
    report.error = e.what();
    return report;
  }
  return run_pipeline(*network, config, stages);
}

RunReport run_pipeline(const Network& network, const RunConfig& config, const PipelineStages& stages) {
  RunReport report;
  report.generated_at = utc_now();
  report.config = run_config_to_json(config);
  std::string stage = "reconfig";
  try {
    const SwitchConfig base = base_config(network);

    std::vector<std::future<ReconfigResult>> runs;
    for (const auto& lv : network.levels()) {
      mssa::SsaParams params = config.ssa;
      params.seed = level_seed(config.seed, lv.index);
      const ConfigObjective objective = level_cost_objective(network, lv.index, config.cost, config.power_flow);
      runs.push_back(std::async(std::launch::async, [&network, objective, params] {
        return reconfigure(network, objective, params);
      }));
    }
    std::vector<ReconfigResult> results;
    for (auto& f : runs) results.push_back(f.get());

    stage = "evaluate";
    for (std::size_t t = 0; t < results.size(); ++t) {
      const LoadLevel& lv = network.levels()[t];
      LevelReport entry;
      entry.level = lv.index;
      entry.scale = lv.scale;
      entry.duration_days = lv.duration_days;
      entry.base_config = base;
      entry.config = results[t].config;
      entry.trace = results[t].trace;
      entry.evaluations = results[t].evaluations;
      entry.distinct_configs = static_cast<long>(results[t].distinct_configs);

      const auto sol = solve_power_flow(network, entry.config, lv, config.power_flow);
      entry.cost = total_cost(network, entry.config, {{lv.index, sol}}, config.cost, {lv.index});
      const auto base_sol = solve_power_flow(network, base, lv, config.power_flow);
      entry.base_cost = total_cost(network, base, {{lv.index, base_sol}}, config.cost, {lv.index});
      entry.power_flow = {sol.total_loss_kw, sol.min_voltage(), sol.max_voltage(), sol.substation_kw, sol.converged,
                          sol.iterations};
      report.levels.push_back(std::move(entry));
    }
    if (!stages.placement) return report;

    stage = "placement";
    const Network sub = subtransient_view(network, config.subtransient_factor);
    PlacementProblem problem = config.placement;
    if (problem.candidates.empty()) problem.candidates = default_candidates(network);
    std::vector<std::unique_ptr<PlacementContext>> contexts;
    std::vector<std::future<SfclPlacementResult>> placements;
    for (auto& entry : report.levels) {
      contexts.push_back(std::make_unique<PlacementContext>(sub, entry.config, problem));
      const PlacementContext* ctx = contexts.back().get();
      placements.push_back(std::async(std::launch::async, [ctx] { return place(*ctx); }));
    }
    bool all_feasible = true;
    for (std::size_t t = 0; t < placements.size(); ++t) {
      LevelReport& entry = report.levels[t];
      entry.placement = placements[t].get();
      all_feasible = all_feasible && entry.placement.feasible;
      const FaultScan without = scan_with(*contexts[t], {});
      const FaultScan with = scan_with(*contexts[t], entry.placement.devices);
      entry.fault.without_sfcl_a = without.worst_current_a;
      entry.fault.worst_without_a = without.worst_current();
      entry.fault.with_sfcl_a = with.worst_current_a;
      entry.fault.worst_with_a = with.worst_current();
    }
    if (!all_feasible) return report;

    stage = "aggregate";
    std::vector<SfclPlacementResult> per_level;
    std::vector<const PlacementContext*> ctx_ptrs;
    for (std::size_t t = 0; t < report.levels.size(); ++t) {
      per_level.push_back(report.levels[t].placement);
      ctx_ptrs.push_back(contexts[t].get());
    }
    report.aggregated = aggregate(per_level, ctx_ptrs);
    for (std::size_t t = 0; t < report.levels.size(); ++t) {
      const FaultScan agg = scan_with(*contexts[t], devices_for_config(*report.aggregated, contexts[t]->config()));
      report.levels[t].fault.with_aggregate_a = agg.worst_current_a;
      report.levels[t].fault.worst_with_aggregate_a = agg.worst_current();
    }
  } catch (const std::exception& e) {
    report.failed_at = stage;
    report.error = e.what();
  }
  return report;
}

ordered_json report_to_json(const RunReport& r) {
  ordered_json j;
  j["schema"] = r.schema;
  j["generated_at"] = r.generated_at;
  j["failed_at"] = r.failed_at ? ordered_json(*r.failed_at) : ordered_json(nullptr);
  j["error"] = r.error;
  j["feasible"] = r.feasible();
  j["config"] = r.config;
  j["levels"] = ordered_json::array();
  for (const auto& lv : r.levels) j["levels"].push_back(level_json(lv));
  j["aggregated"] = r.aggregated ? placement_json(*r.aggregated) : ordered_json(nullptr);
  return j;
}

RunReport report_from_json(const ordered_json& j) {
  RunReport r;
  r.schema = j.at("schema").get<std::string>();
  if (r.schema != kReportSchema) throw std::invalid_argument("unsupported report schema " + r.schema);
  r.generated_at = j.at("generated_at").get<std::string>();
  if (!j.at("failed_at").is_null()) r.failed_at = j.at("failed_at").get<std::string>();
  r.error = j.at("error").get<std::string>();
  r.config = j.at("config");
  for (const auto& lv : j.at("levels")) r.levels.push_back(level_from(lv));
  if (!j.at("aggregated").is_null()) r.aggregated = placement_from(j.at("aggregated"));
  return r;
}

std::string tables_csv(const RunReport& r) {
  std::ostringstream os;
  os << "level,scale,duration_days,open_switches,loss_kw,loss_cost,reliability_cost,penalty,total_cost,"
        "base_total_cost,sfcl_locations,worst_fault_without_a,worst_fault_with_a\n";
  for (const auto& lv : r.levels) {
    std::string locations;
    for (const auto& d : lv.placement.devices) locations += (locations.empty() ? "" : " ") + std::to_string(d.branch);
    os << lv.level << ',' << lv.scale << ',' << lv.duration_days << ',' << join_switches(lv.config) << ','
       << fmt(lv.power_flow.total_loss_kw, 4) << ',' << fmt(lv.cost.loss_cost.count(lv.level) ? lv.cost.loss_cost.at(lv.level) : 0.0, 2)
       << ',' << fmt(lv.cost.reliability_cost.count(lv.level) ? lv.cost.reliability_cost.at(lv.level) : 0.0, 2) << ','
       << fmt(lv.cost.penalty, 2) << ',' << fmt(lv.cost.total, 2) << ',' << fmt(lv.base_cost.total, 2) << ','
       << locations << ',' << fmt(lv.fault.worst_without_a, 1) << ',' << fmt(lv.fault.worst_with_a, 1) << '\n';
  }
  os << "\nlocation,resistance_ohm\n";
  if (r.aggregated) {
    for (const auto& d : r.aggregated->devices) os << d.branch << ',' << fmt(d.impedance_ohm, 4) << '\n';
  }
  return os.str();
}

std::vector<std::string> emit_report(const RunReport& report, const std::string& output_dir) {
  const fs::path dir(output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    written.push_back((dir / name).string());
  };
  emit("report.json", report_to_json(report).dump(2) + "\n");
  emit("tables.csv", tables_csv(report));
  for (const auto& lv : report.levels) {
    std::ostringstream os;
    os << "iteration,best_fitness,mean_fitness\n" << std::setprecision(17);
    for (const auto& row : lv.trace) os << row.iteration << ',' << row.best_fitness << ',' << row.mean_fitness << '\n';
    emit("trace_level" + std::to_string(lv.level) + ".csv", os.str());
  }
  return written;
}

RunReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report " + path);
  try {
    return report_from_json(ordered_json::parse(in));
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace sfcl
