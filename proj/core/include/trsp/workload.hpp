#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "trsp/requests.hpp"
#include "trsp/service.hpp"
#include "trsp/topology.hpp"

namespace trsp {

struct SyntheticConfig {
  int n_services = 0;
  int n_servers = 0;
  int horizon = 0;
  double zipf_shape = 0.6;
  double rerank_prob = 0.3;  ///< chance per slot of drawing fresh popularity ranks
  std::int64_t users_per_server = 1000;
  std::int64_t requests_per_user_per_slot = 1;
  double noise_low = 0.7;   ///< prediction multiplier bounds
  double noise_high = 1.3;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Zipf-distributed demand with popularity re-ranking; predictions are the
/// actual counts scaled by a per-entry uniform noise multiplier.
RequestMatrix generate_synthetic(const SyntheticConfig& cfg, const ServiceList& services);

/// rows x cols grid of edge servers: coefficients are hop_coefficient times
/// the Manhattan hop distance, the cloud costs 1, storage is uniform.
Topology grid_topology(int rows, int cols, double hop_coefficient, double storage_gb);

struct TraceRecord {
  std::string taxi_id;
  double longitude = 0, latitude = 0;
  double velocity = 0, heading = 0;
  std::int64_t minute = 0;  ///< epoch minutes
};

struct TraceConfig {
  std::vector<std::pair<double, double>> server_positions;  ///< (lat, lon) per server
  double coverage_radius_m = 1000.0;
  std::int64_t requests_per_taxi_per_slot = 12;
  double zipf_shape = 0.6;
  double rerank_prob = 0.3;
  double noise_low = 0.7, noise_high = 1.3;
  double bbox_lat_lo = -90, bbox_lat_hi = 90;
  double bbox_lon_lo = -180, bbox_lon_hi = 180;
  int max_slots = 0;  ///< 0 derives the horizon from the trace span
  std::uint64_t seed = 1;

  void validate() const;
};

struct TraceIngestStats {
  std::int64_t parsed = 0;
  std::int64_t malformed = 0;
  std::int64_t out_of_horizon = 0;
  std::vector<std::string> warnings;  ///< one per malformed record, with line number
};

/// Reads "taxi_id,longitude,latitude,velocity,heading,timestamp" CSV rows
/// (timestamp at minute resolution, ISO "YYYY-MM-DD HH:MM" or plain epoch
/// minutes), assigns each taxi-minute to the nearest covering server, and
/// expands taxi counts into per-service demand through the same Zipf
/// re-ranking process the synthetic generator uses. Malformed records are
/// skipped and reported in `stats`.
RequestMatrix ingest_trace(std::istream& csv, const TraceConfig& cfg,
                           const ServiceList& services,
                           TraceIngestStats* stats = nullptr);

/// Great-circle distance in meters (haversine).
double great_circle_m(double lat1, double lon1, double lat2, double lon2);

}  // namespace trsp
