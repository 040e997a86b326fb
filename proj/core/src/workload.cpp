#include "trsp/workload.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "trsp/rng.hpp"

namespace trsp {

namespace {

/// Popularity ranks with re-ranking plus categorical sampling of request
/// counts. Shared by the synthetic and trace paths.
class ZipfPopularity {
 public:
  ZipfPopularity(int n_services, double shape) : shape_(shape), rank_(n_services) {
    // Initial ranks follow service ids: service 0 is the most popular.
    std::iota(rank_.begin(), rank_.end(), 1);
    rebuild_cdf();
  }

  void maybe_rerank(Rng& rng, double prob) {
    if (rng.bernoulli(prob)) {
      rng.shuffle(rank_);
      rebuild_cdf();
    }
  }

  /// Distributes `total` requests over services, one categorical draw each,
  /// so per-slot conservation is exact.
  void sample_counts(Rng& rng, std::int64_t total, std::vector<std::int64_t>& out) const {
    std::fill(out.begin(), out.end(), 0);
    for (std::int64_t r = 0; r < total; ++r) {
      const double u = rng.next_double() * cdf_.back();
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      const std::size_t i = std::min<std::size_t>(it - cdf_.begin(), out.size() - 1);
      ++out[i];
    }
  }

 private:
  void rebuild_cdf() {
    cdf_.resize(rank_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < rank_.size(); ++i) {
      acc += std::pow(static_cast<double>(rank_[i]), -shape_);
      cdf_[i] = acc;
    }
  }

  double shape_;
  std::vector<int> rank_;
  std::vector<double> cdf_;
};

std::int64_t noisy_prediction(Rng& rng, std::int64_t actual, double lo, double hi) {
  const double mult = rng.uniform(lo, hi);
  return std::llround(static_cast<double>(actual) * mult);
}

}  // namespace

void SyntheticConfig::validate() const {
  if (n_services < 1 || n_servers < 1 || horizon < 1) {
    throw std::invalid_argument("synthetic workload dimensions must be positive");
  }
  if (zipf_shape <= 0) throw std::invalid_argument("zipf_shape must be positive");
  if (rerank_prob < 0 || rerank_prob > 1) {
    throw std::invalid_argument("rerank_prob must be in [0, 1]");
  }
  if (users_per_server < 0 || requests_per_user_per_slot < 0) {
    throw std::invalid_argument("request volumes must be non-negative");
  }
  if (noise_low < 0 || noise_low > noise_high) {
    throw std::invalid_argument("need 0 <= noise_low <= noise_high");
  }
}

RequestMatrix generate_synthetic(const SyntheticConfig& cfg, const ServiceList& services) {
  cfg.validate();
  if (static_cast<int>(services.size()) != cfg.n_services) {
    throw std::invalid_argument("service list does not match n_services");
  }
  RequestMatrix m(cfg.n_services, cfg.n_servers, cfg.horizon);
  ZipfPopularity pop(cfg.n_services, cfg.zipf_shape);
  const std::int64_t total = cfg.users_per_server * cfg.requests_per_user_per_slot;
  std::vector<std::int64_t> counts(cfg.n_services);
  for (int t = 1; t <= cfg.horizon; ++t) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    pop.maybe_rerank(rng, cfg.rerank_prob);
    for (int j = 1; j <= cfg.n_servers; ++j) {
      pop.sample_counts(rng, total, counts);
      for (int i = 0; i < cfg.n_services; ++i) {
        m.set_actual(i, j, t, counts[i]);
        m.set_predicted(i, j, t,
                        noisy_prediction(rng, counts[i], cfg.noise_low, cfg.noise_high));
      }
    }
  }
  return m;
}

Topology grid_topology(int rows, int cols, double hop_coefficient, double storage_gb) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid needs rows, cols >= 1");
  if (hop_coefficient < 0) throw std::invalid_argument("hop coefficient must be >= 0");
  const int n = rows * cols;
  const Gamma per_hop = gamma_from_double(hop_coefficient);
  std::vector<Gamma> gamma(std::size_t(n + 1) * (n + 1), 0);
  auto at = [&](int j, int k) -> Gamma& { return gamma[std::size_t(j) * (n + 1) + k]; };
  for (int j = 1; j <= n; ++j) {
    at(j, 0) = kGammaOne;
    at(0, j) = kGammaOne;
    const int rj = (j - 1) / cols, cj = (j - 1) % cols;
    for (int k = 1; k <= n; ++k) {
      if (k == j) continue;
      const int rk = (k - 1) / cols, ck = (k - 1) % cols;
      const int hops = std::abs(rj - rk) + std::abs(cj - ck);
      at(j, k) = per_hop * hops;
    }
  }
  return Topology(std::vector<Volume>(n, volume_from_gb(storage_gb)), std::move(gamma));
}

void TraceConfig::validate() const {
  if (server_positions.empty()) {
    throw std::invalid_argument("trace ingest needs at least one server position");
  }
  if (coverage_radius_m <= 0) throw std::invalid_argument("coverage radius must be positive");
  if (requests_per_taxi_per_slot < 0) {
    throw std::invalid_argument("requests per taxi must be non-negative");
  }
  if (zipf_shape <= 0) throw std::invalid_argument("zipf_shape must be positive");
  if (noise_low < 0 || noise_low > noise_high) {
    throw std::invalid_argument("need 0 <= noise_low <= noise_high");
  }
}

double great_circle_m(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadiusM = 6371000.0;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double dlat = (lat2 - lat1) * kDeg;
  const double dlon = (lon2 - lon1) * kDeg;
  const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * kDeg) * std::cos(lat2 * kDeg) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

namespace {

/// "YYYY-MM-DD HH:MM" (or with 'T') to epoch minutes; plain integers pass
/// through as epoch minutes directly.
bool parse_minute(const std::string& text, std::int64_t& out) {
  if (text.empty()) return false;
  if (text.find_first_not_of("0123456789-") == std::string::npos &&
      text.find('-', 1) == std::string::npos) {
    try {
      out = std::stoll(text);
      return true;
    } catch (...) {
      return false;
    }
  }
  int y, mo, d, h, mi;
  char sep;
  std::istringstream ss(text);
  if (!(ss >> y >> sep >> mo) || sep != '-') return false;
  if (!(ss >> sep >> d) || sep != '-') return false;
  if (!(ss >> sep) || (sep != ' ' && sep != 'T')) return false;
  if (!(ss >> h >> sep >> mi) || sep != ':') return false;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59) {
    return false;
  }
  // Civil date to days since 1970-01-01 (Howard Hinnant's algorithm).
  const int yy = y - (mo <= 2);
  const int era = (yy >= 0 ? yy : yy - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(yy - era * 400);
  const unsigned doy = (153u * (mo + (mo > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  const std::int64_t days = era * 146097LL + static_cast<std::int64_t>(doe) - 719468;
  out = days * 24 * 60 + h * 60 + mi;
  return true;
}

}  // namespace

RequestMatrix ingest_trace(std::istream& csv, const TraceConfig& cfg,
                           const ServiceList& services, TraceIngestStats* stats) {
  cfg.validate();
  validate_services(services);
  TraceIngestStats local;
  TraceIngestStats& st = stats ? *stats : local;

  const int n = static_cast<int>(cfg.server_positions.size());
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(csv, line)) throw std::runtime_error("trace: empty input");
  ++line_no;
  if (line != "taxi_id,longitude,latitude,velocity,heading,timestamp") {
    throw std::runtime_error("trace: unexpected header '" + line + "'");
  }

  struct Assigned {
    std::int64_t minute;
    int server;  // 1..n
  };
  std::vector<Assigned> assigned;
  std::map<std::string, std::int64_t> last_minute;  // per-taxi monotonicity
  std::int64_t min_minute = 0, max_minute = 0;
  bool any = false;

  auto warn = [&](const std::string& why) {
    ++st.malformed;
    if (st.warnings.size() < 100) {
      st.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
    }
  };

  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    TraceRecord rec;
    std::string lon, lat, vel, head, ts;
    if (!std::getline(ss, rec.taxi_id, ',') || !std::getline(ss, lon, ',') ||
        !std::getline(ss, lat, ',') || !std::getline(ss, vel, ',') ||
        !std::getline(ss, head, ',') || !std::getline(ss, ts)) {
      warn("expected 6 comma-separated fields");
      continue;
    }
    try {
      rec.longitude = std::stod(lon);
      rec.latitude = std::stod(lat);
      rec.velocity = std::stod(vel);
      rec.heading = std::stod(head);
    } catch (...) {
      warn("non-numeric coordinate field");
      continue;
    }
    if (!parse_minute(ts, rec.minute)) {
      warn("unparseable timestamp '" + ts + "'");
      continue;
    }
    if (rec.latitude < cfg.bbox_lat_lo || rec.latitude > cfg.bbox_lat_hi ||
        rec.longitude < cfg.bbox_lon_lo || rec.longitude > cfg.bbox_lon_hi) {
      warn("coordinates outside the configured bounding box");
      continue;
    }
    const auto it = last_minute.find(rec.taxi_id);
    if (it != last_minute.end() && rec.minute <= it->second) {
      warn("timestamp not increasing for taxi " + rec.taxi_id);
      continue;
    }
    last_minute[rec.taxi_id] = rec.minute;
    ++st.parsed;

    // Nearest covering server; ties go to the lower id.
    int best = 0;
    double best_dist = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double d = great_circle_m(rec.latitude, rec.longitude,
                                      cfg.server_positions[j - 1].first,
                                      cfg.server_positions[j - 1].second);
      if (d <= cfg.coverage_radius_m && (best == 0 || d < best_dist)) {
        best = j;
        best_dist = d;
      }
    }
    if (!any) {
      min_minute = max_minute = rec.minute;
      any = true;
    } else {
      min_minute = std::min(min_minute, rec.minute);
      max_minute = std::max(max_minute, rec.minute);
    }
    if (best > 0) assigned.push_back({rec.minute, best});
  }

  int horizon = any ? static_cast<int>(max_minute - min_minute + 1) : 1;
  if (cfg.max_slots > 0) horizon = std::min(horizon, cfg.max_slots);

  // Taxi counts per (server, slot).
  std::vector<std::int64_t> taxis(std::size_t(n) * horizon, 0);
  for (const Assigned& a : assigned) {
    const std::int64_t slot = a.minute - min_minute + 1;
    if (slot > horizon) {
      ++st.out_of_horizon;
      continue;
    }
    ++taxis[std::size_t(a.server - 1) * horizon + (slot - 1)];
  }

  const int s = static_cast<int>(services.size());
  RequestMatrix m(s, n, horizon);
  ZipfPopularity pop(s, cfg.zipf_shape);
  std::vector<std::int64_t> counts(s);
  for (int t = 1; t <= horizon; ++t) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    pop.maybe_rerank(rng, cfg.rerank_prob);
    for (int j = 1; j <= n; ++j) {
      const std::int64_t total =
          taxis[std::size_t(j - 1) * horizon + (t - 1)] * cfg.requests_per_taxi_per_slot;
      pop.sample_counts(rng, total, counts);
      for (int i = 0; i < s; ++i) {
        m.set_actual(i, j, t, counts[i]);
        m.set_predicted(i, j, t,
                        noisy_prediction(rng, counts[i], cfg.noise_low, cfg.noise_high));
      }
    }
  }
  return m;
}

}  // namespace trsp
