#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trsp/scenario.hpp"

namespace trsp {

struct ExperimentPlan {
  std::filesystem::path scenario_path;
  std::vector<std::string> algorithms;  ///< dva, greedy, popular, rr, optimal
  std::string sweep_param;              ///< empty, theta, delta, storage_ratio, zipf_shape
  std::vector<double> sweep_values;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
  std::optional<double> theta_override;
  std::optional<double> delta_override;

  /// Throws ConfigError on empty algorithms/seeds, unknown algorithm names,
  /// or sweep values outside the parameter's legal range.
  void validate() const;
};

struct RunRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string sweep_param;
  double sweep_value = 0.0;
  bool has_sweep = false;
  bool ok = false;
  std::string error;
  int horizon = 0;
  Cost total = 0, placement = 0, refresh = 0, offload = 0;
  std::vector<Cost> slot_total, slot_placement, slot_refresh, slot_offload;
  double wall_ms_per_slot = 0.0;
};

struct PlanResult {
  std::vector<RunRecord> records;
  int failed_cells = 0;
  std::string config_hash;  ///< FNV-1a over scenario bytes + canonical plan
};

/// Executes every (algorithm, sweep value, seed) cell. A failing cell is
/// recorded and isolated; it never aborts the sweep.
PlanResult run_plan(const ExperimentPlan& plan);

/// Runs one algorithm on a materialized instance. Exposed for the CLI's
/// single-run subcommands.
RunRecord run_cell(const std::string& algorithm, const MaterializedRun& run);

/// results.csv, slot_costs.csv, manifest.json, timings.json under `dir`.
/// The CSVs and the manifest are byte-stable for identical plans and seeds;
/// wall times go to timings.json, which is not.
void write_plan_outputs(const PlanResult& result, const ExperimentPlan& plan,
                        const std::filesystem::path& dir);

struct SummaryRow {
  std::string algorithm;
  std::string sweep_param;
  double sweep_value = 0.0;
  bool has_sweep = false;
  int runs = 0;
  double mean_total_gb = 0, min_total_gb = 0, max_total_gb = 0;
  double mean_placement_gb = 0, mean_refresh_gb = 0, mean_offload_gb = 0;
  double dva_saving_pct = 0;  ///< how much dva saves vs this row's mean
};

/// Per (algorithm, sweep value) aggregation across seeds, with the pairwise
/// saving of dva against each baseline at the same sweep value.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

std::vector<RunRecord> read_results_csv(std::istream& in);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

/// n x s placement-frequency matrix (fraction of slots each service spent
/// placed on each server).
std::vector<double> placement_heatmap(const Schedule& states);
void write_heatmap_csv(const Schedule& states, std::ostream& out);

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace trsp
