#pragma once

#include "trsp/cost.hpp"
#include "trsp/simplex.hpp"

namespace trsp {

/// Places the services with the most predicted requests, per server.
SystemState popular_step(const SystemState& prev, int slot,
                         const RequestMatrix& requests, const ServiceList& services,
                         const Topology& topo);

/// Places the services with the largest predicted offload-volume density
/// (lambda * d / r), per server.
SystemState greedy_step(const SystemState& prev, int slot,
                        const RequestMatrix& requests, const ServiceList& services,
                        const Topology& topo);

/// The LP relaxation behind the relaxation-rounding baseline: fractional
/// placements x, churn variables z >= x_t - x_{t-1} charging the placement
/// volume, refresh amortized as beta/LF per placed slot, and offloads at the
/// nearest-neighbor coefficient capped by the cloud. Objectives are in GB.
struct RelaxedLp {
  int n_services = 0, n_servers = 0, horizon = 0;
  LpProblem problem;
  double constant_gb = 0.0;  ///< offload cost at x = 0, dropped from `problem`

  int x_index(int i, int j, int t) const {
    return ((t - 1) * n_servers + (j - 1)) * n_services + i;
  }
  int z_index(int i, int j, int t) const {
    return n_services * n_servers * horizon + x_index(i, j, t);
  }
};

struct RrOptions {
  std::int64_t variable_guard = 100'000;
  std::int64_t tableau_cell_guard = 200'000'000;  // dense tableau entries
};

RelaxedLp build_rr_lp(const RequestMatrix& requests, const ServiceList& services,
                      const Topology& topo, int horizon, const RrOptions& opts = {});

struct RrSolution {
  Schedule states;
  CostBreakdown cost;           ///< evaluated on actual requests
  double lp_objective_gb = 0;   ///< relaxed optimum under the surrogate model
  double surrogate_rounded_gb = 0;  ///< rounded schedule under the same model
  long lp_iterations = 0;
};

/// Solves the relaxation over all slots at once, then rounds per (server,
/// slot) by admitting services in descending fractional value.
RrSolution rr_solve(const RequestMatrix& requests, const ServiceList& services,
                    const Topology& topo, int horizon, const RrOptions& opts = {});

}  // namespace trsp
