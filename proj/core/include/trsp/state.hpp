#pragma once

#include <cstdint>
#include <vector>

#include "trsp/service.hpp"
#include "trsp/topology.hpp"

namespace trsp {

/// One slot's system state: the placement matrix X, the offload decision Y
/// (stored as one target per (service, server) since exactly one target is
/// chosen), and the remaining-lifetime matrix L.
class SystemState {
 public:
  SystemState(int n_services, int n_servers);

  /// The empty state Q0: nothing placed, lifetimes zero, targets cloud.
  static SystemState initial(int n_services, int n_servers);

  int n_services() const { return s_; }
  int n_servers() const { return n_; }

  bool placed(int i, int j) const { return placed_[idx(i, j)] != 0; }
  Target offload(int i, int j) const { return target_[idx(i, j)]; }
  int lifetime(int i, int j) const { return life_[idx(i, j)]; }

  /// The binary tensor view y_{i,j,k} for callers that want it.
  bool offload_indicator(int i, int j, Target k) const { return offload(i, j) == k; }

  void set_placed(int i, int j, bool v) { placed_[idx(i, j)] = v ? 1 : 0; }
  void set_offload(int i, int j, Target k) { target_[idx(i, j)] = k; }
  void set_lifetime(int i, int j, int l) { life_[idx(i, j)] = l; }

  Volume used_storage(int j, const ServiceList& services) const;

  /// Checks the storage constraint, one-target conservation, target
  /// validity, and lifetime ranges for placed services. Throws
  /// std::invalid_argument with a concrete location on violation.
  void validate(const ServiceList& services, const Topology& topo) const;

  bool operator==(const SystemState& other) const = default;

 private:
  std::size_t idx(int i, int j) const { return std::size_t(j - 1) * s_ + i; }

  int s_, n_;
  std::vector<std::uint8_t> placed_;
  std::vector<Target> target_;
  std::vector<int> life_;
};

using Schedule = std::vector<SystemState>;  // index t-1 holds slot t

}  // namespace trsp
