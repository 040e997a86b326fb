#include "trsp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trsp/baselines.hpp"
#include "trsp/errors.hpp"
#include "trsp/optimal.hpp"
#include "trsp/version.hpp"

namespace trsp {

namespace {

const std::vector<std::string> kAlgorithms = {"dva", "greedy", "popular", "rr",
                                              "optimal"};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

double mean_ms(const std::vector<double>& ms) {
  if (ms.empty()) return 0.0;
  double sum = 0.0;
  for (double v : ms) sum += v;
  return sum / static_cast<double>(ms.size());
}

void fill_costs(RunRecord& rec, const CostBreakdown& cost) {
  rec.total = cost.total();
  rec.placement = cost.placement_total();
  rec.refresh = cost.refresh_total();
  rec.offload = cost.offload_total();
  rec.horizon = cost.horizon();
  for (int t = 1; t <= cost.horizon(); ++t) {
    rec.slot_total.push_back(cost.slot_total(t));
    rec.slot_placement.push_back(cost.slot_placement(t));
    rec.slot_refresh.push_back(cost.slot_refresh(t));
    rec.slot_offload.push_back(cost.slot_offload(t));
  }
}

/// Per-slot stepping baselines share the timing harness.
template <typename StepFn>
RunRecord run_stepping(const MaterializedRun& run, StepFn&& step) {
  RunRecord rec;
  Schedule states;
  states.reserve(run.horizon);
  std::vector<double> step_ms;
  SystemState prev = SystemState::initial(static_cast<int>(run.services.size()),
                                          run.topo.n_servers());
  for (int t = 1; t <= run.horizon; ++t) {
    const auto begin = std::chrono::steady_clock::now();
    SystemState now = step(prev, t);
    const auto end = std::chrono::steady_clock::now();
    step_ms.push_back(std::chrono::duration<double, std::milli>(end - begin).count());
    states.push_back(now);
    prev = std::move(now);
  }
  fill_costs(rec, evaluate_schedule(states, run.services, run.topo, run.requests));
  rec.wall_ms_per_slot = mean_ms(step_ms);
  rec.ok = true;
  return rec;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ExperimentPlan::validate() const {
  if (algorithms.empty()) throw ConfigError("plan: the algorithm list is empty");
  if (seeds.empty()) throw ConfigError("plan: the seed list is empty");
  for (const auto& algo : algorithms) {
    if (std::find(kAlgorithms.begin(), kAlgorithms.end(), algo) == kAlgorithms.end()) {
      throw ConfigError("plan: unknown algorithm '" + algo + "'");
    }
  }
  if (!sweep_param.empty()) {
    if (sweep_values.empty()) throw ConfigError("plan: sweep has no values");
    for (double v : sweep_values) {
      if (sweep_param == "theta" && (v < 0.0 || v > 1.0)) {
        throw ConfigError("plan: theta sweep values must be in [0, 1]");
      } else if (sweep_param == "delta" && v < 1.0) {
        throw ConfigError("plan: delta sweep values must be >= 1");
      } else if (sweep_param == "storage_ratio" && v <= 0.0) {
        throw ConfigError("plan: storage_ratio sweep values must be positive");
      } else if (sweep_param == "zipf_shape" && v <= 0.0) {
        throw ConfigError("plan: zipf_shape sweep values must be positive");
      } else if (sweep_param != "theta" && sweep_param != "delta" &&
                 sweep_param != "storage_ratio" && sweep_param != "zipf_shape") {
        throw ConfigError("plan: unknown sweep parameter '" + sweep_param + "'");
      }
    }
  } else if (!sweep_values.empty()) {
    throw ConfigError("plan: sweep values given without a sweep parameter");
  }
}

RunRecord run_cell(const std::string& algorithm, const MaterializedRun& run) {
  if (algorithm == "dva") {
    RunRecord rec;
    const DvaRun result = dva_run(run.requests, run.services, run.topo, run.dva,
                                  run.horizon);
    fill_costs(rec, result.cost);
    rec.wall_ms_per_slot = mean_ms(result.step_ms);
    rec.ok = true;
    return rec;
  }
  if (algorithm == "popular") {
    return run_stepping(run, [&](const SystemState& prev, int t) {
      return popular_step(prev, t, run.requests, run.services, run.topo);
    });
  }
  if (algorithm == "greedy") {
    return run_stepping(run, [&](const SystemState& prev, int t) {
      return greedy_step(prev, t, run.requests, run.services, run.topo);
    });
  }
  if (algorithm == "rr") {
    RunRecord rec;
    const auto begin = std::chrono::steady_clock::now();
    const RrSolution sol =
        rr_solve(run.requests, run.services, run.topo, run.horizon, run.guards.rr);
    const auto end = std::chrono::steady_clock::now();
    fill_costs(rec, sol.cost);
    rec.wall_ms_per_slot =
        std::chrono::duration<double, std::milli>(end - begin).count() / run.horizon;
    rec.ok = true;
    return rec;
  }
  if (algorithm == "optimal") {
    RunRecord rec;
    DpOptions opts;
    opts.node_budget = run.guards.node_budget;
    const auto begin = std::chrono::steady_clock::now();
    const DpSolution sol =
        solve_optimal(run.services, run.topo, run.requests, run.horizon, opts);
    const auto end = std::chrono::steady_clock::now();
    fill_costs(rec, evaluate_schedule(sol.states, run.services, run.topo, run.requests));
    rec.wall_ms_per_slot =
        std::chrono::duration<double, std::milli>(end - begin).count() / run.horizon;
    rec.ok = true;
    return rec;
  }
  throw ConfigError("unknown algorithm '" + algorithm + "'");
}

PlanResult run_plan(const ExperimentPlan& plan) {
  plan.validate();
  const Scenario scenario = load_scenario(plan.scenario_path);

  PlanResult result;
  {
    std::ifstream in(plan.scenario_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string scenario_bytes = buf.str();
    std::string canon = "algorithms=";
    for (const auto& a : plan.algorithms) canon += a + ",";
    canon += ";sweep=" + plan.sweep_param + "=";
    for (double v : plan.sweep_values) canon += format_double(v) + ",";
    canon += ";seeds=";
    for (auto s : plan.seeds) canon += std::to_string(s) + ",";
    if (plan.theta_override) canon += ";theta=" + format_double(*plan.theta_override);
    if (plan.delta_override) canon += ";delta=" + format_double(*plan.delta_override);
    std::uint64_t h = fnv1a64(scenario_bytes.data(), scenario_bytes.size());
    h = fnv1a64(canon.data(), canon.size(), h);
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    result.config_hash = hex;
  }

  std::vector<std::optional<double>> sweep_cells;
  if (plan.sweep_values.empty()) {
    sweep_cells.push_back(std::nullopt);
  } else {
    for (double v : plan.sweep_values) sweep_cells.push_back(v);
  }

  for (const auto& sweep_value : sweep_cells) {
    for (std::uint64_t seed : plan.seeds) {
      // One instance per (sweep value, seed), shared by all algorithms so
      // comparisons are paired.
      std::optional<MaterializedRun> run;
      std::string materialize_error;
      try {
        SweepOverride ov;
        const SweepOverride* ovp = nullptr;
        if (sweep_value) {
          ov.param = plan.sweep_param;
          ov.value = *sweep_value;
          ovp = &ov;
        }
        run = materialize(scenario, seed, ovp);
        if (plan.theta_override) run->dva.theta = *plan.theta_override;
        if (plan.delta_override) {
          run->dva.delta = DeltaFactors::uniform(*plan.delta_override);
        }
        run->dva.validate();
      } catch (const std::exception& e) {
        materialize_error = e.what();
      }
      for (const auto& algo : plan.algorithms) {
        RunRecord rec;
        rec.algorithm = algo;
        rec.seed = seed;
        rec.sweep_param = plan.sweep_param;
        if (sweep_value) {
          rec.sweep_value = *sweep_value;
          rec.has_sweep = true;
        }
        if (!materialize_error.empty()) {
          rec.ok = false;
          rec.error = materialize_error;
        } else {
          try {
            RunRecord cell = run_cell(algo, *run);
            cell.algorithm = algo;
            cell.seed = seed;
            cell.sweep_param = plan.sweep_param;
            cell.sweep_value = rec.sweep_value;
            cell.has_sweep = rec.has_sweep;
            rec = std::move(cell);
          } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
          }
        }
        if (!rec.ok) ++result.failed_cells;
        result.records.push_back(std::move(rec));
      }
    }
  }
  return result;
}

namespace {

std::string sweep_value_text(const RunRecord& rec) {
  return rec.has_sweep ? format_double(rec.sweep_value) : "";
}

}  // namespace

void write_plan_outputs(const PlanResult& result, const ExperimentPlan& plan,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    std::ofstream out(dir / "results.csv");
    out << "algorithm,seed,sweep_param,sweep_value,status,total_gb,placement_gb,"
           "refresh_gb,offload_gb,slots,error\n";
    for (const auto& rec : result.records) {
      out << rec.algorithm << ',' << rec.seed << ',' << rec.sweep_param << ','
          << sweep_value_text(rec) << ',' << (rec.ok ? "ok" : "error") << ',';
      if (rec.ok) {
        out << format_cost_gb(rec.total) << ',' << format_cost_gb(rec.placement) << ','
            << format_cost_gb(rec.refresh) << ',' << format_cost_gb(rec.offload) << ','
            << rec.horizon << ',';
      } else {
        out << ",,,,0," << csv_escape(rec.error);
      }
      out << '\n';
    }
  }

  {
    std::ofstream out(dir / "slot_costs.csv");
    out << "algorithm,seed,sweep_param,sweep_value,slot,total_gb,placement_gb,"
           "refresh_gb,offload_gb\n";
    for (const auto& rec : result.records) {
      if (!rec.ok) continue;
      for (int t = 1; t <= rec.horizon; ++t) {
        out << rec.algorithm << ',' << rec.seed << ',' << rec.sweep_param << ','
            << sweep_value_text(rec) << ',' << t << ','
            << format_cost_gb(rec.slot_total[t - 1]) << ','
            << format_cost_gb(rec.slot_placement[t - 1]) << ','
            << format_cost_gb(rec.slot_refresh[t - 1]) << ','
            << format_cost_gb(rec.slot_offload[t - 1]) << '\n';
      }
    }
  }

  {
    nlohmann::json manifest;
    manifest["tool"] = "trsp";
    manifest["version"] = kVersion;
    manifest["config_hash"] = result.config_hash;
    manifest["scenario"] = plan.scenario_path.string();
    manifest["algorithms"] = plan.algorithms;
    manifest["sweep_param"] = plan.sweep_param;
    manifest["sweep_values"] = plan.sweep_values;
    manifest["seeds"] = plan.seeds;
    manifest["failed_cells"] = result.failed_cells;
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }

  {
    // Wall times are environment noise, so they live outside the
    // byte-stable CSVs.
    nlohmann::json timings = nlohmann::json::array();
    for (const auto& rec : result.records) {
      if (!rec.ok) continue;
      nlohmann::json row;
      row["algorithm"] = rec.algorithm;
      row["seed"] = rec.seed;
      if (rec.has_sweep) row["sweep_value"] = rec.sweep_value;
      row["wall_ms_per_slot"] = rec.wall_ms_per_slot;
      timings.push_back(row);
    }
    std::ofstream out(dir / "timings.json");
    out << timings.dump(2) << '\n';
  }
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ConfigError("summarize: no records");
  struct Key {
    std::string algorithm;
    bool has_sweep;
    double sweep_value;
    bool operator<(const Key& other) const {
      if (algorithm != other.algorithm) return algorithm < other.algorithm;
      if (has_sweep != other.has_sweep) return has_sweep < other.has_sweep;
      return sweep_value < other.sweep_value;
    }
  };
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const auto& rec : records) {
    if (!rec.ok) continue;
    groups[{rec.algorithm, rec.has_sweep, rec.sweep_value}].push_back(&rec);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, recs] : groups) {
    SummaryRow row;
    row.algorithm = key.algorithm;
    row.sweep_param = recs.front()->sweep_param;
    row.has_sweep = key.has_sweep;
    row.sweep_value = key.sweep_value;
    row.runs = static_cast<int>(recs.size());
    double sum = 0, sum_p = 0, sum_r = 0, sum_o = 0;
    double lo = cost_to_gb(recs.front()->total), hi = lo;
    for (const auto* rec : recs) {
      const double total = cost_to_gb(rec->total);
      sum += total;
      sum_p += cost_to_gb(rec->placement);
      sum_r += cost_to_gb(rec->refresh);
      sum_o += cost_to_gb(rec->offload);
      lo = std::min(lo, total);
      hi = std::max(hi, total);
    }
    row.mean_total_gb = sum / row.runs;
    row.min_total_gb = lo;
    row.max_total_gb = hi;
    row.mean_placement_gb = sum_p / row.runs;
    row.mean_refresh_gb = sum_r / row.runs;
    row.mean_offload_gb = sum_o / row.runs;
    rows.push_back(row);
  }
  // Pairwise saving of dva against each row at the same sweep value.
  for (auto& row : rows) {
    if (row.algorithm == "dva" || row.mean_total_gb <= 0) continue;
    for (const auto& dva_row : rows) {
      if (dva_row.algorithm == "dva" && dva_row.has_sweep == row.has_sweep &&
          dva_row.sweep_value == row.sweep_value) {
        row.dva_saving_pct =
            (row.mean_total_gb - dva_row.mean_total_gb) / row.mean_total_gb * 100.0;
      }
    }
  }
  return rows;
}

std::vector<RunRecord> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("results csv: empty input");
  std::vector<RunRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 10) {
      throw ConfigError("results csv: malformed line " + std::to_string(line_no));
    }
    RunRecord rec;
    rec.algorithm = fields[0];
    rec.seed = std::stoull(fields[1]);
    rec.sweep_param = fields[2];
    if (!fields[3].empty()) {
      rec.has_sweep = true;
      rec.sweep_value = std::stod(fields[3]);
    }
    rec.ok = fields[4] == "ok";
    if (rec.ok) {
      rec.total = static_cast<Cost>(std::llround(std::stod(fields[5]) * kCostPerGb));
      rec.placement = static_cast<Cost>(std::llround(std::stod(fields[6]) * kCostPerGb));
      rec.refresh = static_cast<Cost>(std::llround(std::stod(fields[7]) * kCostPerGb));
      rec.offload = static_cast<Cost>(std::llround(std::stod(fields[8]) * kCostPerGb));
      rec.horizon = std::stoi(fields[9]);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "algorithm,sweep_param,sweep_value,runs,mean_total_gb,min_total_gb,"
         "max_total_gb,mean_placement_gb,mean_refresh_gb,mean_offload_gb,"
         "dva_saving_pct\n";
  char buf[64];
  auto fixed = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.5f", v);
    return std::string(buf);
  };
  for (const auto& row : rows) {
    out << row.algorithm << ',' << row.sweep_param << ','
        << (row.has_sweep ? format_double(row.sweep_value) : std::string()) << ','
        << row.runs << ',' << fixed(row.mean_total_gb) << ',' << fixed(row.min_total_gb)
        << ',' << fixed(row.max_total_gb) << ',' << fixed(row.mean_placement_gb) << ','
        << fixed(row.mean_refresh_gb) << ',' << fixed(row.mean_offload_gb) << ','
        << fixed(row.dva_saving_pct) << '\n';
  }
}

std::vector<double> placement_heatmap(const Schedule& states) {
  if (states.empty()) throw ConfigError("heatmap: empty schedule");
  const int s = states.front().n_services();
  const int n = states.front().n_servers();
  std::vector<double> freq(std::size_t(n) * s, 0.0);
  for (const auto& state : states) {
    for (int j = 1; j <= n; ++j) {
      for (int i = 0; i < s; ++i) {
        if (state.placed(i, j)) freq[std::size_t(j - 1) * s + i] += 1.0;
      }
    }
  }
  for (double& f : freq) f /= static_cast<double>(states.size());
  return freq;
}

void write_heatmap_csv(const Schedule& states, std::ostream& out) {
  const auto freq = placement_heatmap(states);
  const int s = states.front().n_services();
  const int n = states.front().n_servers();
  out << "server";
  for (int i = 0; i < s; ++i) out << ",svc" << i;
  out << '\n';
  char buf[32];
  for (int j = 1; j <= n; ++j) {
    out << j;
    for (int i = 0; i < s; ++i) {
      std::snprintf(buf, sizeof(buf), "%.5f", freq[std::size_t(j - 1) * s + i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace trsp
