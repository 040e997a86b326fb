#pragma once

#include <vector>

#include "trsp/requests.hpp"
#include "trsp/state.hpp"

namespace trsp {

/// Remaining-lifetime transition. Returns l_prev - 1 while a service stays
/// placed with l_prev >= 1, and resets to lf otherwise (fresh placement,
/// post-refresh, or not placed). Throws on lf < 1 or l_prev outside [0, lf].
int advance_lifetime(int l_prev, bool placed_prev, bool placed_now, int lf);

/// 1 iff the remaining lifetime has hit zero.
inline bool needs_refresh(int l) { return l == 0; }

/// Cheapest offload target for a service not placed at `home`: the cloud or
/// any edge server currently holding the service. Ties go to the smallest
/// server id, with the cloud last.
Target best_offload(int service, int home, const SystemState& placement_now,
                    const Topology& topo);

/// Per-server cost components of one slot transition.
struct SlotCost {
  std::vector<Cost> placement;  // indexed by server-1
  std::vector<Cost> refresh;
  std::vector<Cost> offload;

  Cost server_total(int j) const {
    return placement[j - 1] + refresh[j - 1] + offload[j - 1];
  }
  Cost total() const;
};

/// State transition cost D(Q_prev, Q_now) for one slot, split per server.
/// Refresh is charged only for services placed in the current slot. The
/// request counts come from the supplied slot view, so the caller picks the
/// actual or the predicted tensor.
SlotCost slot_cost(const SystemState& prev, const SystemState& now,
                   const ServiceList& services, const Topology& topo,
                   const SlotRequests& requests, bool validate_states = true);

/// Placement / refresh / offload cost per (server, slot) plus exact totals.
class CostBreakdown {
 public:
  CostBreakdown(int n_servers, int horizon);

  int n_servers() const { return n_; }
  int horizon() const { return t_; }

  Cost placement(int j, int t) const { return placement_[idx(j, t)]; }
  Cost refresh(int j, int t) const { return refresh_[idx(j, t)]; }
  Cost offload(int j, int t) const { return offload_[idx(j, t)]; }

  Cost slot_total(int t) const;
  Cost slot_placement(int t) const;
  Cost slot_refresh(int t) const;
  Cost slot_offload(int t) const;

  Cost placement_total() const { return placement_total_; }
  Cost refresh_total() const { return refresh_total_; }
  Cost offload_total() const { return offload_total_; }
  Cost total() const { return placement_total_ + refresh_total_ + offload_total_; }

  void add_slot(int t, const SlotCost& sc);

 private:
  std::size_t idx(int j, int t) const { return std::size_t(t - 1) * n_ + (j - 1); }

  int n_, t_;
  std::vector<Cost> placement_, refresh_, offload_;
  Cost placement_total_ = 0, refresh_total_ = 0, offload_total_ = 0;
};

/// Total cost of a schedule evaluated against the actual request counts,
/// starting from Q0. Verifies that every stored lifetime matrix replays
/// exactly from the placement sequence and that each state is feasible.
CostBreakdown evaluate_schedule(const Schedule& states, const ServiceList& services,
                                const Topology& topo, const RequestMatrix& requests);

/// Fills offload targets (placed services serve locally, everything else
/// via best_offload) and lifetimes for a state whose placement is set.
void finalize_state(SystemState& now, const SystemState& prev,
                    const ServiceList& services, const Topology& topo);

}  // namespace trsp
