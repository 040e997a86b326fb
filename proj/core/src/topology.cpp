#include "trsp/topology.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace trsp {

Topology::Topology(std::vector<Volume> storage, std::vector<Gamma> gamma)
    : n_(static_cast<int>(storage.size())),
      storage_(std::move(storage)),
      gamma_(std::move(gamma)) {
  if (n_ < 1) throw std::invalid_argument("topology needs at least one edge server");
  const std::size_t side = std::size_t(n_) + 1;
  if (gamma_.size() != side * side) {
    throw std::invalid_argument("gamma matrix must be (n+1) x (n+1) including the cloud");
  }
  for (int j = 1; j <= n_; ++j) {
    if (storage_[j - 1] <= 0) {
      throw std::invalid_argument("storage of server " + std::to_string(j) +
                                  " must be positive");
    }
    if (this->gamma(j, 0) != kGammaOne) {
      throw std::invalid_argument("gamma(" + std::to_string(j) +
                                  ", cloud) must equal 1.0");
    }
    if (this->gamma(j, j) != 0) {
      throw std::invalid_argument("gamma(" + std::to_string(j) + ", " +
                                  std::to_string(j) + ") must be 0");
    }
  }
  for (Gamma g : gamma_) {
    if (g < 0) throw std::invalid_argument("gamma entries must be non-negative");
  }
}

Gamma Topology::min_offload_gamma(int j) const {
  Gamma best = gamma(j, 0);
  for (int k = 1; k <= n_; ++k) {
    if (k == j) continue;
    if (gamma(j, k) < best) best = gamma(j, k);
  }
  return best;
}

Gamma Topology::nearest_neighbor_gamma(int j) const {
  Gamma best = kGammaOne;
  for (int k = 1; k <= n_; ++k) {
    if (k == j) continue;
    if (gamma(j, k) < best) best = gamma(j, k);
  }
  return best;
}

}  // namespace trsp
