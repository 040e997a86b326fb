#include "trsp/state.hpp"

#include <stdexcept>
#include <string>

namespace trsp {

SystemState::SystemState(int n_services, int n_servers)
    : s_(n_services), n_(n_servers) {
  if (s_ < 1 || n_ < 1) throw std::invalid_argument("state dimensions must be positive");
  const std::size_t total = std::size_t(s_) * n_;
  placed_.assign(total, 0);
  target_.assign(total, kCloud);
  life_.assign(total, 0);
}

SystemState SystemState::initial(int n_services, int n_servers) {
  return SystemState(n_services, n_servers);
}

Volume SystemState::used_storage(int j, const ServiceList& services) const {
  Volume used = 0;
  for (int i = 0; i < s_; ++i) {
    if (placed(i, j)) used += services[i].image_size;
  }
  return used;
}

void SystemState::validate(const ServiceList& services, const Topology& topo) const {
  if (static_cast<int>(services.size()) != s_ || topo.n_servers() != n_) {
    throw std::invalid_argument("state dimensions do not match services/topology");
  }
  for (int j = 1; j <= n_; ++j) {
    const Volume used = used_storage(j, services);
    if (used > topo.storage(j)) {
      throw std::invalid_argument("storage constraint violated at server " +
                                  std::to_string(j));
    }
    for (int i = 0; i < s_; ++i) {
      const Target k = offload(i, j);
      if (k < 0 || k > n_) {
        throw std::invalid_argument("offload target out of range for service " +
                                    std::to_string(i) + " at server " + std::to_string(j));
      }
      if (k >= 1 && !placed(i, k)) {
        throw std::invalid_argument("offload target " + std::to_string(k) +
                                    " does not hold service " + std::to_string(i));
      }
      if (placed(i, j)) {
        const int l = lifetime(i, j);
        if (l < 0 || l > services[i].refresh_interval) {
          throw std::invalid_argument("lifetime out of range for service " +
                                      std::to_string(i) + " at server " +
                                      std::to_string(j));
        }
      }
    }
  }
}

}  // namespace trsp
