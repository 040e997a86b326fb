#pragma once

#include <cstdint>
#include <vector>

#include "trsp/cost.hpp"

namespace trsp {

/// One node of the per-slot state graph: a storage-feasible placement plus a
/// remaining-lifetime assignment. Offload decisions are not part of the node;
/// given a placement they only affect the current slot and are chosen
/// myopically, which preserves every optimum while shrinking the graph.
struct DpNode {
  std::vector<std::uint64_t> placement_masks;  ///< per server, bit i = service i
  std::vector<int> lifetime;                   ///< s*n, LF_i where not placed
  Cost cost_to_go = 0;
  std::int32_t successor = -1;
};

inline bool node_placed(const DpNode& node, int service, int server) {
  return (node.placement_masks[server - 1] >> service) & 1u;
}

struct DpOptions {
  std::int64_t node_budget = 2'000'000;
};

struct DpSolution {
  Schedule states;                    ///< one state per slot
  Cost total_cost = 0;                ///< evaluated on actual requests
  Cost objective_cost = 0;            ///< optimized value on predicted requests
  std::vector<Cost> path_cost_to_go;  ///< A*(Q^(t)) along the optimal path
  std::int64_t explored_nodes = 0;    ///< DP cells processed (nodes x slots)
};

/// All feasible (placement, lifetime) nodes for one slot. The node set is
/// the same for every slot; the parameter is kept for interface symmetry.
/// Throws NodeBudgetError when the count would exceed the budget.
std::vector<DpNode> enumerate_states(const ServiceList& services, const Topology& topo,
                                     int slot, std::int64_t node_budget = 2'000'000);

/// Exact solver: backward dynamic programming over the per-slot state graph.
/// Decisions are made on predicted requests; the reported total is evaluated
/// on actual requests.
DpSolution solve_optimal(const ServiceList& services, const Topology& topo,
                         const RequestMatrix& requests, int horizon,
                         const DpOptions& opts = {});

/// Independent exactness oracle: exhaustive search over placement sequences
/// with myopic offloading, no Bellman recursion. Guarded by the number of
/// placement sequences.
DpSolution brute_force_oracle(const ServiceList& services, const Topology& topo,
                              const RequestMatrix& requests, int horizon,
                              std::int64_t guard_sequences = std::int64_t(1) << 20);

}  // namespace trsp
