// sfcl: feeder reconfiguration and fault current limiter placement.
//
//   sfcl run       --grid g.json --config run.json --seed 7 --out dir
//   sfcl reconfig  --grid g.json --config run.json --out dir
//   sfcl place     --grid g.json --open 7,9,14,32,37
//   sfcl faultscan --grid g.json --open 7,9,14,32,37 --sfcl 2:0.9,18:1.1
//
// Exit codes: 0 feasible, 2 infeasible placement, 1 error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sfcl/pipeline.hpp"
#include "sfcl/placement.hpp"
#include "sfcl/short_circuit.hpp"

namespace {

using namespace sfcl;

struct Common {
  std::string grid;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "7,9,14" or "s7,s9,s14".
SwitchConfig parse_switches(const std::string& text) {
  SwitchConfig c;
  for (auto tok : split(text, ',')) {
    if (tok.front() == 's' || tok.front() == 'S') tok.erase(0, 1);
    c.open_branches.insert(std::stoi(tok));
  }
  return c;
}

// "2:0.9,18:1.1" -> branch:ohm pairs.
std::map<BranchId, double> parse_sfcls(const std::string& text) {
  std::map<BranchId, double> out;
  for (const auto& tok : split(text, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("--sfcl expects branch:ohm pairs, got " + tok);
    out[std::stoi(tok.substr(0, colon))] = std::stod(tok.substr(colon + 1));
  }
  return out;
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? parse_run_config(nlohmann::json::object()) : load_run_config(c.config);
  if (!c.grid.empty()) cfg.grid_path = c.grid;
  if (c.seed_given) {
    cfg.seed = c.seed;
    cfg.ssa.seed = c.seed;
  }
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (cfg.grid_path.empty()) throw std::invalid_argument("no grid given (--grid or \"grid\" in the run config)");
  return cfg;
}

void print_levels(const RunReport& r) {
  std::printf("%-6s %-22s %10s %12s %12s %10s\n", "level", "open switches", "loss kW", "total $", "base $", "sfcl");
  for (const auto& lv : r.levels) {
    std::string locs;
    for (const auto& d : lv.placement.devices) locs += (locs.empty() ? "" : ",") + std::to_string(d.branch);
    std::printf("%-6d %-22s %10.3f %12.2f %12.2f %10s\n", lv.level, format_switches(lv.config).c_str(),
                lv.power_flow.total_loss_kw, lv.cost.total, lv.base_cost.total, locs.c_str());
  }
  if (r.aggregated) {
    std::printf("aggregated plan (%s):\n", r.aggregated->feasible ? "feasible" : "INFEASIBLE");
    for (const auto& d : r.aggregated->devices) std::printf("  branch %-4d %.4f ohm\n", d.branch, d.impedance_ohm);
  }
}

int finish(const RunReport& report, const RunConfig& cfg) {
  const auto files = emit_report(report, cfg.output_dir);
  print_levels(report);
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  if (report.failed_at) {
    std::fprintf(stderr, "error in stage %s: %s\n", report.failed_at->c_str(), report.error.c_str());
    return 1;
  }
  return 0;
}

int cmd_run(const Common& c) {
  const RunConfig cfg = resolve(c);
  const RunReport report = run_pipeline(cfg);
  const int code = finish(report, cfg);
  if (code != 0) return code;
  return report.feasible() ? 0 : 2;
}

int cmd_reconfig(const Common& c) {
  const RunConfig cfg = resolve(c);
  return finish(run_pipeline(cfg, {.placement = false}), cfg);
}

int cmd_place(const Common& c, const std::string& open) {
  const RunConfig cfg = resolve(c);
  const Network net = load_grid(cfg.grid_path);
  const SwitchConfig config = open.empty() ? base_config(net) : parse_switches(open);
  PlacementProblem problem = cfg.placement;
  if (problem.candidates.empty()) problem.candidates = default_candidates(net);
  const Network sub = subtransient_view(net, cfg.subtransient_factor);
  const PlacementContext ctx(sub, config, problem);
  const SfclPlacementResult r = place(ctx);

  std::printf("configuration %s, %s search over %zu candidates\n", format_switches(config).c_str(),
              r.exhaustive ? "exhaustive" : "greedy", problem.candidates.size());
  std::printf("%-8s %s\n", "location", "resistance_ohm");
  for (const auto& d : r.devices) std::printf("%-8d %.4f\n", d.branch, d.impedance_ohm);
  std::printf("objective %.4f, %s\n", r.objective, r.feasible ? "feasible" : "infeasible");
  for (const auto& [id, over] : r.residual_violations) std::printf("  CB %d over rating by %.1f A\n", id, over);
  return r.feasible ? 0 : 2;
}

int cmd_faultscan(const Common& c, const std::string& open, const std::string& sfcls) {
  const RunConfig cfg = resolve(c);
  const Network net = load_grid(cfg.grid_path);
  const SwitchConfig config = open.empty() ? base_config(net) : parse_switches(open);
  PlacementProblem problem = cfg.placement;
  if (problem.candidates.empty()) problem.candidates = default_candidates(net);
  const Network sub = subtransient_view(net, cfg.subtransient_factor);
  const PlacementContext ctx(sub, config, problem);
  const FaultScan scan = ctx.model().scan(ctx.devices(parse_sfcls(sfcls)));

  std::printf("%-6s %12s %12s %10s\n", "cb", "worst_a", "rating_a", "fault_bus");
  for (const auto& [id, amps] : scan.worst_current_a) {
    const double rating = *ctx.network().branches()[ctx.network().branch_index(id)].cb_rating_a;
    std::printf("%-6d %12.1f %12.1f %10d%s\n", id, amps, rating, scan.worst_fault_bus.at(id),
                amps > rating ? "  over" : "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution feeder reconfiguration and SFCL placement"};
  app.require_subcommand(1);

  Common common;
  std::string open, sfcls;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--grid", common.grid, "Grid JSON file");
    sub->add_option("--config", common.config, "Run config JSON file");
    sub->add_option("--seed", common.seed, "Master seed (overrides the config)")
        ->each([&](const std::string&) { common.seed_given = true; });
    sub->add_option("--out", common.out, "Output directory");
  };

  auto* run = app.add_subcommand("run", "Reconfigure every level, place SFCLs, aggregate");
  add_common(run);
  auto* reconfig = app.add_subcommand("reconfig", "Per-level reconfiguration only");
  add_common(reconfig);
  auto* place_cmd = app.add_subcommand("place", "SFCL placement on one configuration");
  add_common(place_cmd);
  place_cmd->add_option("--open", open, "Open switches, e.g. 7,9,14,32,37 (default: tie switches)");
  auto* scan_cmd = app.add_subcommand("faultscan", "Worst fault current per CB");
  add_common(scan_cmd);
  scan_cmd->add_option("--open", open, "Open switches (default: tie switches)");
  scan_cmd->add_option("--sfcl", sfcls, "Installed limiters as branch:ohm pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(common);
    if (*reconfig) return cmd_reconfig(common);
    if (*place_cmd) return cmd_place(common, open);
    if (*scan_cmd) return cmd_faultscan(common, open, sfcls);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
