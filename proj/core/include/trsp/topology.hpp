#pragma once

#include <vector>

#include "trsp/units.hpp"

namespace trsp {

/// Offload targets: 0 is the cloud, 1..n are edge servers.
using Target = int;
constexpr Target kCloud = 0;

/// Edge-server storage capacities plus the (n+1) x (n+1) traffic-coefficient
/// matrix. Row/column 0 is the cloud; gamma(j, 0) is pinned to 1.0 and
/// gamma(j, j) to 0 for every edge server j.
class Topology {
 public:
  /// storage_gb is indexed by edge server (size n); gamma is (n+1)^2
  /// row-major including the cloud row/column.
  Topology(std::vector<Volume> storage, std::vector<Gamma> gamma);

  int n_servers() const { return n_; }

  /// j in 1..n.
  Volume storage(int j) const { return storage_[j - 1]; }

  /// j, k in 0..n.
  Gamma gamma(int j, int k) const { return gamma_[j * (n_ + 1) + k]; }

  /// Smallest coefficient from j to any other target including the cloud.
  Gamma min_offload_gamma(int j) const;

  /// Smallest coefficient from j to another edge server, capped at the
  /// cloud's 1.0; equals 1.0 when there is no other edge server.
  Gamma nearest_neighbor_gamma(int j) const;

 private:
  int n_;
  std::vector<Volume> storage_;
  std::vector<Gamma> gamma_;
};

}  // namespace trsp
