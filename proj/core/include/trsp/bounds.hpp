#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trsp/cost.hpp"

namespace trsp {

/// Analytic bracket around the approximate solver's cost: an upper bound on
/// the keep-the-top-services strategy, a lower bound on any solution, and
/// the ratio bound they imply. Costs are exact integers; ratios are doubles.
struct BoundReport {
  Cost d_s = 0;        ///< upper bound (top sets kept all horizon, cloud residual)
  Cost d_ignore = 0;   ///< lower bound (per-slot top sets, nearest-neighbor residual)
  double ratio_bound = 0.0;      ///< averaged-form ratio bound
  double ratio_exact = 0.0;      ///< plain d_s / d_ignore
  double amortized_term_gb = 0.0;  ///< A = sum over kept services of alpha/T + beta/LF
  std::vector<std::vector<int>> u;               ///< kept set per server
  std::vector<std::vector<std::vector<int>>> v;  ///< per-slot top set per server
  std::vector<std::string> warnings;             ///< assumption violations, best-effort notes
};

/// Upper bound: each server keeps the floor(R/r) services with the largest
/// total offload volume for the whole horizon and serves the rest from the
/// cloud. Assumption violations (non-uniform image sizes, services not worth
/// placing) are reported as warnings, and the bound degrades gracefully by
/// using the largest image size for the capacity count.
Cost lemma3_upper_bound(const RequestMatrix& requests, const ServiceList& services,
                        const Topology& topo, int horizon,
                        std::vector<std::vector<int>>* u_out = nullptr,
                        std::vector<std::string>* warnings = nullptr);

/// Lower bound: per (server, slot), even a clairvoyant placement must
/// offload everything outside the slot's top set, at no better than the
/// smallest outgoing coefficient. Non-uniform sizes use the smallest image
/// for the capacity count so the bound stays valid.
Cost lemma4_lower_bound(const RequestMatrix& requests, const ServiceList& services,
                        const Topology& topo, int horizon,
                        std::vector<std::vector<std::vector<int>>>* v_out = nullptr,
                        std::vector<std::string>* warnings = nullptr);

BoundReport compute_bound_report(const RequestMatrix& requests,
                                 const ServiceList& services, const Topology& topo,
                                 int horizon);

std::string bound_report_json(const BoundReport& report);

struct SubmodularityResult {
  bool violation_found = false;
  std::int64_t samples_checked = 0;
  std::vector<int> counter_a, counter_b;  ///< ground-set element indices
  int counter_e = -1;
  Cost margin_a = 0, margin_b = 0;
};

/// Samples chains A subseteq B, e notin B of the placement-set cost function
/// (offloads myopic, capacity ignored) looking for a diminishing-returns
/// violation. The ground set is every (service, server, slot) triple and
/// must have at most 20 elements.
SubmodularityResult check_submodularity(const ServiceList& services,
                                        const Topology& topo,
                                        const RequestMatrix& requests, int horizon,
                                        std::int64_t samples, std::uint64_t seed);

/// Element index helpers for the submodularity ground set.
int ground_element(int service, int server, int slot, int n_services, int n_servers);

}  // namespace trsp
