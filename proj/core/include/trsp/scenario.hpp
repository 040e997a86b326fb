#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trsp/baselines.hpp"
#include "trsp/dva.hpp"
#include "trsp/rng.hpp"
#include "trsp/workload.hpp"

namespace trsp {

/// A number field that can be fixed, uniform over a range, tied to the image
/// size, or a uniform multiplier of the image size.
struct ValueSpec {
  enum class Kind { Fixed, Range, Image, ImageScaledRange };
  Kind kind = Kind::Fixed;
  double lo = 0.0, hi = 0.0;  // Fixed uses lo only

  double sample(Rng& rng, double image_gb) const;
};

struct ServiceGenSpec {
  int count = 0;
  ValueSpec image, place, refresh, offload;
  bool lifetime_exponential = false;
  double lifetime_mean = 4.0;  ///< when exponential; rounded up to >= 1 slot
  int lifetime_fixed = 1;
};

struct TopologySpec {
  bool is_grid = false;
  int rows = 0, cols = 0;
  double hop_coefficient = 0.0;
  std::vector<std::vector<double>> gamma;  ///< explicit (n+1)^2 incl. cloud
  int n_servers = 0;

  enum class Storage { Uniform, PerServer, Ratio };
  Storage storage_kind = Storage::Uniform;
  double storage_gb = 0.0;
  std::vector<double> storage_list;
  double storage_ratio = 0.0;
};

struct WorkloadSpec {
  enum class Type { Synthetic, Trace, File };
  Type type = Type::Synthetic;
  // Synthetic and trace share the popularity and noise parameters.
  double zipf_shape = 0.6;
  double rerank_prob = 0.3;
  std::int64_t users_per_server = 1000;
  std::int64_t requests_per_user_per_slot = 1;
  double noise_low = 0.7, noise_high = 1.3;
  // Trace / file input.
  std::string path;
  std::vector<std::pair<double, double>> server_positions;
  double coverage_radius_m = 1000.0;
  std::int64_t requests_per_taxi_per_slot = 12;
  std::optional<std::array<double, 4>> bbox;  ///< lat_lo, lon_lo, lat_hi, lon_hi
};

struct SolverGuards {
  std::int64_t node_budget = 2'000'000;
  std::int64_t oracle_guard_sequences = std::int64_t(1) << 20;
  RrOptions rr;
};

struct Scenario {
  std::string name;
  int horizon = 0;
  std::uint64_t default_seed = 1;

  bool explicit_services = false;
  ServiceList services;  ///< when explicit
  ServiceGenSpec service_gen;

  TopologySpec topology;
  WorkloadSpec workload;

  double theta = 0.6;
  double delta_scalar = 1.0;
  std::string delta_matrix_file;  ///< optional CSV, s rows x n columns
  double horizon_epsilon = 1e-3;
  double capacity_quantum_gb = 0.01;

  SolverGuards guards;
  std::filesystem::path dir;  ///< directory of the scenario file
};

/// Parses and validates a scenario file. Unknown keys are rejected with the
/// offending location; throws ConfigError.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& dir);

struct SweepOverride {
  std::string param;  ///< theta | delta | storage_ratio | zipf_shape
  double value = 0.0;
};

/// One concrete, runnable instance for a seed.
struct MaterializedRun {
  ServiceList services;
  Topology topo;
  RequestMatrix requests;
  int horizon;
  DvaConfig dva;
  SolverGuards guards;
};

MaterializedRun materialize(const Scenario& scenario, std::uint64_t seed,
                            const SweepOverride* sweep = nullptr);

}  // namespace trsp
