#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfcl/cost.hpp"
#include "sfcl/grid.hpp"
#include "sfcl/mssa.hpp"
#include "sfcl/placement.hpp"
#include "sfcl/power_flow.hpp"

namespace sfcl {

inline constexpr const char* kReportSchema = "sfcl-reconfig-report/1";

struct RunConfig {
  std::string grid_path;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  mssa::SsaParams ssa;
  CostParams cost;
  PowerFlowOptions power_flow;
  PlacementProblem placement;  // empty candidates = default_candidates()
  double subtransient_factor = 0.1;

  bool operator==(const RunConfig& other) const;
};

/// Missing keys keep their defaults; unknown keys are rejected. A relative
/// grid path is resolved against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& doc, const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);
nlohmann::ordered_json run_config_to_json(const RunConfig& config);

struct PowerFlowSummary {
  double total_loss_kw = 0.0;
  double min_voltage_pu = 0.0;
  double max_voltage_pu = 0.0;
  double substation_kw = 0.0;
  bool converged = false;
  int iterations = 0;

  bool operator==(const PowerFlowSummary&) const = default;
};

struct FaultSummary {
  std::map<BranchId, double> without_sfcl_a;  // worst per CB
  std::map<BranchId, double> with_sfcl_a;     // worst per CB, this level's plan
  std::map<BranchId, double> with_aggregate_a;  // worst per CB, aggregated plan
  double worst_without_a = 0.0;
  double worst_with_a = 0.0;
  double worst_with_aggregate_a = 0.0;

  bool operator==(const FaultSummary&) const = default;
};

struct LevelReport {
  int level = 0;
  double scale = 0.0;
  double duration_days = 0.0;
  SwitchConfig base_config;
  CostBreakdown base_cost;
  SwitchConfig config;
  CostBreakdown cost;
  PowerFlowSummary power_flow;
  FaultSummary fault;
  SfclPlacementResult placement;
  std::vector<mssa::TraceRow> trace;
  long evaluations = 0;
  long distinct_configs = 0;

  bool operator==(const LevelReport&) const = default;
};

struct RunReport {
  std::string schema = kReportSchema;
  std::string generated_at;
  std::optional<std::string> failed_at;  // stage name
  std::string error;
  nlohmann::ordered_json config;  // echo of the resolved run config
  std::vector<LevelReport> levels;
  std::optional<SfclPlacementResult> aggregated;

  /// Aggregated plan exists and meets every CB rating at every level.
  bool feasible() const { return !failed_at && aggregated && aggregated->feasible; }
  bool operator==(const RunReport&) const = default;
};

struct PipelineStages {
  bool placement = true;  // false stops after reconfiguration
};

/// Reconfigures every level (concurrently, one seed stream per level), then
/// places SFCLs per level on the sub-transient view, aggregates and
/// re-verifies. Stage failures are caught and recorded in failed_at/error.
RunReport run_pipeline(const RunConfig& config, const PipelineStages& stages = {});
/// Same with an already loaded grid.
RunReport run_pipeline(const Network& network, const RunConfig& config, const PipelineStages& stages = {});

/// Normally open configuration: every tie branch open.
SwitchConfig base_config(const Network& network);

/// Seed for one level's optimizer, derived from the run seed.
std::uint64_t level_seed(std::uint64_t seed, int level);

nlohmann::ordered_json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::ordered_json& doc);

/// Writes report.json, tables.csv and trace_level{t}.csv; creates the
/// directory. Returns the written paths. Throws std::runtime_error naming the
/// path on I/O failure.
std::vector<std::string> emit_report(const RunReport& report, const std::string& output_dir);
RunReport load_report(const std::string& path);

/// Two CSV blocks separated by an empty line: per-level configurations and
/// costs, then the aggregated plan as (location, resistance_ohm).
std::string tables_csv(const RunReport& report);

}  // namespace sfcl
