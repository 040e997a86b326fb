#include "trsp/cost.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace trsp {

int advance_lifetime(int l_prev, bool placed_prev, bool placed_now, int lf) {
  if (lf < 1) throw std::invalid_argument("refresh interval must be at least 1");
  if (l_prev < 0 || l_prev > lf) {
    throw std::invalid_argument("previous lifetime " + std::to_string(l_prev) +
                                " outside [0, " + std::to_string(lf) + "]");
  }
  if (placed_prev && placed_now && l_prev >= 1) return l_prev - 1;
  return lf;
}

Target best_offload(int service, int home, const SystemState& placement_now,
                    const Topology& topo) {
  Gamma best = topo.gamma(home, 0);
  Target choice = kCloud;
  // Scan in ascending id so the smallest id wins ties; the cloud loses them.
  for (int k = topo.n_servers(); k >= 1; --k) {
    if (k == home || !placement_now.placed(service, k)) continue;
    if (topo.gamma(home, k) <= best) {
      best = topo.gamma(home, k);
      choice = k;
    }
  }
  return choice;
}

Cost SlotCost::total() const {
  Cost t = 0;
  for (std::size_t j = 0; j < placement.size(); ++j) {
    t += placement[j] + refresh[j] + offload[j];
  }
  return t;
}

SlotCost slot_cost(const SystemState& prev, const SystemState& now,
                   const ServiceList& services, const Topology& topo,
                   const SlotRequests& requests, bool validate_states) {
  const int s = now.n_services();
  const int n = now.n_servers();
  if (prev.n_services() != s || prev.n_servers() != n) {
    throw std::invalid_argument("slot_cost: state dimensions differ");
  }
  if (validate_states) {
    prev.validate(services, topo);
    now.validate(services, topo);
  }
  SlotCost sc;
  sc.placement.assign(n, 0);
  sc.refresh.assign(n, 0);
  sc.offload.assign(n, 0);
  for (int j = 1; j <= n; ++j) {
    for (int i = 0; i < s; ++i) {
      const ServiceSpec& svc = services[i];
      if (now.placed(i, j)) {
        if (!prev.placed(i, j)) {
          sc.placement[j - 1] += volume_as_cost(svc.place_volume);
        }
        if (needs_refresh(now.lifetime(i, j))) {
          sc.refresh[j - 1] += volume_as_cost(svc.refresh_volume);
        }
      } else {
        const std::int64_t lambda = requests(i, j);
        if (lambda > 0) {
          sc.offload[j - 1] += lambda * svc.offload_volume * topo.gamma(j, now.offload(i, j));
        }
      }
    }
  }
  return sc;
}

CostBreakdown::CostBreakdown(int n_servers, int horizon) : n_(n_servers), t_(horizon) {
  const std::size_t total = std::size_t(n_) * t_;
  placement_.assign(total, 0);
  refresh_.assign(total, 0);
  offload_.assign(total, 0);
}

Cost CostBreakdown::slot_total(int t) const {
  return slot_placement(t) + slot_refresh(t) + slot_offload(t);
}

Cost CostBreakdown::slot_placement(int t) const {
  Cost c = 0;
  for (int j = 1; j <= n_; ++j) c += placement(j, t);
  return c;
}

Cost CostBreakdown::slot_refresh(int t) const {
  Cost c = 0;
  for (int j = 1; j <= n_; ++j) c += refresh(j, t);
  return c;
}

Cost CostBreakdown::slot_offload(int t) const {
  Cost c = 0;
  for (int j = 1; j <= n_; ++j) c += offload(j, t);
  return c;
}

void CostBreakdown::add_slot(int t, const SlotCost& sc) {
  for (int j = 1; j <= n_; ++j) {
    placement_[idx(j, t)] += sc.placement[j - 1];
    refresh_[idx(j, t)] += sc.refresh[j - 1];
    offload_[idx(j, t)] += sc.offload[j - 1];
    placement_total_ += sc.placement[j - 1];
    refresh_total_ += sc.refresh[j - 1];
    offload_total_ += sc.offload[j - 1];
  }
}

CostBreakdown evaluate_schedule(const Schedule& states, const ServiceList& services,
                                const Topology& topo, const RequestMatrix& requests) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  const int horizon = static_cast<int>(states.size());
  if (horizon < 1 || horizon > requests.horizon()) {
    throw std::invalid_argument("schedule length exceeds the request horizon");
  }
  CostBreakdown breakdown(n, horizon);
  SystemState prev = SystemState::initial(s, n);
  for (int t = 1; t <= horizon; ++t) {
    const SystemState& now = states[t - 1];
    for (int j = 1; j <= n; ++j) {
      for (int i = 0; i < s; ++i) {
        const int expected = advance_lifetime(prev.lifetime(i, j), prev.placed(i, j),
                                              now.placed(i, j),
                                              services[i].refresh_interval);
        if (now.lifetime(i, j) != expected) {
          throw std::invalid_argument(
              "lifetime sequence inconsistent at slot " + std::to_string(t) +
              ", service " + std::to_string(i) + ", server " + std::to_string(j));
        }
      }
    }
    breakdown.add_slot(t, slot_cost(prev, now, services, topo, requests.actual_slot(t)));
    prev = now;
  }
  return breakdown;
}

void finalize_state(SystemState& now, const SystemState& prev,
                    const ServiceList& services, const Topology& topo) {
  const int s = now.n_services();
  const int n = now.n_servers();
  for (int j = 1; j <= n; ++j) {
    for (int i = 0; i < s; ++i) {
      now.set_offload(i, j, now.placed(i, j) ? j : best_offload(i, j, now, topo));
      now.set_lifetime(i, j, advance_lifetime(prev.lifetime(i, j), prev.placed(i, j),
                                              now.placed(i, j),
                                              services[i].refresh_interval));
    }
  }
}

}  // namespace trsp
