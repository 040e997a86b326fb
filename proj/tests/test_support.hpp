#pragma once

#include <vector>

#include "trsp/cost.hpp"
#include "trsp/rng.hpp"
#include "trsp/workload.hpp"

namespace trsp::test {

inline ServiceSpec make_service(int id, double image_gb, double place_gb,
                                double refresh_gb, double offload_gb, int lf) {
  ServiceSpec svc;
  svc.id = id;
  svc.image_size = volume_from_gb(image_gb);
  svc.place_volume = volume_from_gb(place_gb);
  svc.refresh_volume = volume_from_gb(refresh_gb);
  svc.offload_volume = volume_from_gb(offload_gb);
  svc.refresh_interval = lf;
  return svc;
}

inline Topology make_topology(const std::vector<double>& storage_gb,
                              const std::vector<std::vector<double>>& gamma) {
  std::vector<Volume> storage;
  for (double gb : storage_gb) storage.push_back(volume_from_gb(gb));
  const std::size_t side = storage.size() + 1;
  std::vector<Gamma> g(side * side, 0);
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t k = 0; k < side; ++k) g[j * side + k] = gamma_from_double(gamma[j][k]);
  }
  return Topology(std::move(storage), std::move(g));
}

/// Single edge server whose only neighbor is the cloud.
inline Topology cloud_only(double storage_gb) {
  return make_topology({storage_gb}, {{0, 1}, {1, 0}});
}

/// Requests with predicted == actual, set from a dense (i, j, t) table.
inline RequestMatrix exact_requests(int s, int n, int t_max,
                                    const std::vector<std::int64_t>& values) {
  RequestMatrix m(s, n, t_max);
  std::size_t idx = 0;
  for (int t = 1; t <= t_max; ++t) {
    for (int j = 1; j <= n; ++j) {
      for (int i = 0; i < s; ++i) {
        m.set_actual(i, j, t, values[idx]);
        m.set_predicted(i, j, t, values[idx]);
        ++idx;
      }
    }
  }
  return m;
}

struct RandomInstance {
  ServiceList services;
  Topology topo;
  RequestMatrix requests;
  int horizon;
};

/// Small single-server instance with exact predictions, used by the oracle
/// equivalence and upper-bound checks.
inline RandomInstance random_small_instance(Rng& rng, int max_services = 4,
                                            int max_horizon = 5) {
  const int s = 2 + static_cast<int>(rng.below(max_services - 1));
  const int horizon = 2 + static_cast<int>(rng.below(max_horizon - 1));
  ServiceList services;
  for (int i = 0; i < s; ++i) {
    services.push_back(make_service(i, 1.0, rng.uniform(0.5, 2.0),
                                    rng.uniform(0.2, 1.0), rng.uniform(0.05, 0.3),
                                    1 + static_cast<int>(rng.below(3))));
  }
  const double storage = 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(s)));
  RandomInstance inst{std::move(services), cloud_only(storage),
                      RequestMatrix(s, 1, horizon), horizon};
  for (int t = 1; t <= horizon; ++t) {
    for (int i = 0; i < s; ++i) {
      const std::int64_t lambda = rng.below(12);
      inst.requests.set_actual(i, 1, t, lambda);
      inst.requests.set_predicted(i, 1, t, lambda);
    }
  }
  return inst;
}

}  // namespace trsp::test
