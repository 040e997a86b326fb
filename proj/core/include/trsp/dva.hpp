#pragma once

#include <vector>

#include "trsp/cost.hpp"

namespace trsp {

/// Spatial approximation factors, either one shared scalar or a per
/// (service, server) table.
class DeltaFactors {
 public:
  DeltaFactors() = default;
  static DeltaFactors uniform(double scalar);
  static DeltaFactors table(int n_services, int n_servers, std::vector<double> values);

  double at(int service, int server) const {
    return table_.empty() ? scalar_ : table_[std::size_t(server - 1) * s_ + service];
  }
  bool is_uniform() const { return table_.empty(); }
  double scalar() const { return scalar_; }

  void validate() const;

 private:
  double scalar_ = 1.0;
  int s_ = 0, n_ = 0;
  std::vector<double> table_;
};

struct DvaConfig {
  double theta = 0.6;            ///< temporal discount on future slots
  DeltaFactors delta;            ///< spatial offload-cost factor(s)
  double horizon_epsilon = 1e-3; ///< drop future terms with weight below this
  double capacity_quantum_gb = 0.01;  ///< knapsack quantization step

  void validate() const;
};

struct KnapsackItem {
  int service = 0;
  std::int64_t weight = 0;   ///< quantized image size, >= 1
  double net_value = 0.0;    ///< discounted benefit of placing, cost units
  bool incumbent = false;    ///< placed in the previous slot
};

/// Discounted weight of the refresh charges a service kept placed from now
/// on will incur: epochs at offsets l_now + k*lf, truncated at `remaining`
/// slots and below `epsilon` discount weight.
double discounted_refresh_cost(int l_now, int lf, double theta, int remaining,
                               double epsilon);

/// Predicted coefficient for offloading from `home`: delta times the nearest
/// previous holder's coefficient, never above the always-available cloud's
/// 1.0; exactly 1.0 when nobody held the service last slot.
double predicted_offload_coefficient(int service, int home,
                                     const SystemState& placement_prev,
                                     const Topology& topo, double delta);

/// Knapsack items for one server and slot: positive-net-value services only.
std::vector<KnapsackItem> build_items(int server, int slot, const SystemState& prev,
                                      const RequestMatrix& requests,
                                      const ServiceList& services, const Topology& topo,
                                      const DvaConfig& cfg);

/// 0-1 knapsack by dynamic programming over quantized capacity. Ties prefer
/// keeping incumbents, then lower service ids. Returns ascending service ids.
std::vector<int> solve_knapsack(const std::vector<KnapsackItem>& items,
                                std::int64_t capacity_units);

/// One slot of the approximate solver: per-server knapsack placements, then
/// the placement exchange, myopic offloads, and lifetime updates.
SystemState dva_step(const SystemState& prev, int slot, const RequestMatrix& requests,
                     const ServiceList& services, const Topology& topo,
                     const DvaConfig& cfg);

struct DvaRun {
  Schedule states;
  CostBreakdown cost;               ///< evaluated on actual requests
  std::vector<double> step_ms;      ///< per-slot decision wall time
};

DvaRun dva_run(const RequestMatrix& requests, const ServiceList& services,
               const Topology& topo, const DvaConfig& cfg, int horizon);

/// Cost of freezing the given state's placements and offloads through the
/// end of the horizon, discounted by theta, with refresh epochs replayed
/// through the exact lifetime dynamics. Upper-bounds the true cost-to-go at
/// theta = 1. Uses predicted requests; returned in cost units.
double keep_unchanged_estimate(const SystemState& q, int slot, int horizon,
                               const RequestMatrix& requests,
                               const ServiceList& services, const Topology& topo,
                               double theta);

}  // namespace trsp
