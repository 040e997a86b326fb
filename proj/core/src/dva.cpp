#include "trsp/dva.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trsp {

DeltaFactors DeltaFactors::uniform(double scalar) {
  DeltaFactors d;
  d.scalar_ = scalar;
  return d;
}

DeltaFactors DeltaFactors::table(int n_services, int n_servers,
                                 std::vector<double> values) {
  if (static_cast<std::size_t>(n_services) * n_servers != values.size()) {
    throw std::invalid_argument("delta table must have s*n entries");
  }
  DeltaFactors d;
  d.s_ = n_services;
  d.n_ = n_servers;
  d.table_ = std::move(values);
  return d;
}

void DeltaFactors::validate() const {
  if (table_.empty()) {
    if (scalar_ < 1.0) throw std::invalid_argument("delta must be >= 1");
    return;
  }
  for (double v : table_) {
    if (v < 1.0) throw std::invalid_argument("delta table entries must be >= 1");
  }
}

void DvaConfig::validate() const {
  if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("theta must be in [0, 1]");
  if (horizon_epsilon <= 0.0 || horizon_epsilon >= 1.0) {
    throw std::invalid_argument("horizon_epsilon must be in (0, 1)");
  }
  if (capacity_quantum_gb <= 0.0) {
    throw std::invalid_argument("capacity_quantum_gb must be positive");
  }
  delta.validate();
}

double discounted_refresh_cost(int l_now, int lf, double theta, int remaining,
                               double epsilon) {
  if (lf < 1) throw std::invalid_argument("refresh interval must be at least 1");
  if (l_now < 0 || l_now > lf) throw std::invalid_argument("lifetime outside [0, lf]");
  if (remaining < 0) throw std::invalid_argument("remaining must be non-negative");
  double sum = 0.0;
  double w = std::pow(theta, l_now);  // pow(0, 0) == 1 covers the due-now case
  const double step = std::pow(theta, lf);
  for (int offset = l_now; offset <= remaining; offset += lf) {
    if (offset > 0 && w < epsilon) break;
    sum += w;
    w *= step;
  }
  return sum;
}

double predicted_offload_coefficient(int service, int home,
                                     const SystemState& placement_prev,
                                     const Topology& topo, double delta) {
  Gamma nearest = -1;
  for (int k = 1; k <= topo.n_servers(); ++k) {
    if (k == home || !placement_prev.placed(service, k)) continue;
    const Gamma g = topo.gamma(home, k);
    if (nearest < 0 || g < nearest) nearest = g;
  }
  if (nearest < 0) return 1.0;  // nobody held it: the cloud is the prediction
  return std::min(delta * gamma_to_double(nearest), 1.0);
}

std::vector<KnapsackItem> build_items(int server, int slot, const SystemState& prev,
                                      const RequestMatrix& requests,
                                      const ServiceList& services, const Topology& topo,
                                      const DvaConfig& cfg) {
  const int s = static_cast<int>(services.size());
  const int horizon = requests.horizon();
  const int remaining = horizon - slot;
  std::vector<KnapsackItem> items;
  items.reserve(s);
  for (int i = 0; i < s; ++i) {
    const ServiceSpec& svc = services[i];
    const bool incumbent = prev.placed(i, server);
    const double gamma_pre =
        predicted_offload_coefficient(i, server, prev, topo, cfg.delta.at(i, server));

    // Discounted predicted demand from this slot on.
    double demand = 0.0;
    double w = 1.0;
    for (int a = slot; a <= horizon; ++a) {
      if (a > slot && w < cfg.horizon_epsilon) break;
      demand += w * static_cast<double>(requests.predicted(i, server, a));
      w *= cfg.theta;
    }

    const int l_now = incumbent && prev.lifetime(i, server) >= 1
                          ? prev.lifetime(i, server) - 1
                          : svc.refresh_interval;
    const double refresh_weight = discounted_refresh_cost(
        l_now, svc.refresh_interval, cfg.theta, remaining, cfg.horizon_epsilon);

    double value = gamma_pre * static_cast<double>(svc.offload_volume) * kGammaOne * demand;
    if (!incumbent) value -= static_cast<double>(volume_as_cost(svc.place_volume));
    value -= static_cast<double>(volume_as_cost(svc.refresh_volume)) * refresh_weight;

    if (value > 0.0) {
      const std::int64_t quantum =
          std::max<std::int64_t>(1, volume_from_gb(cfg.capacity_quantum_gb));
      const std::int64_t weight = (svc.image_size + quantum - 1) / quantum;
      items.push_back({i, weight, value, incumbent});
    }
  }
  return items;
}

std::vector<int> solve_knapsack(const std::vector<KnapsackItem>& items,
                                std::int64_t capacity_units) {
  if (capacity_units < 0) throw std::invalid_argument("capacity must be non-negative");
  if (items.empty() || capacity_units == 0) return {};

  // Priority order: incumbents first, then by service id. On value ties the
  // DP below prefers taking the earlier item, which keeps placements sticky.
  std::vector<int> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (items[a].incumbent != items[b].incumbent) return items[a].incumbent;
    return items[a].service < items[b].service;
  });

  const int m = static_cast<int>(items.size());
  const std::size_t cap = static_cast<std::size_t>(capacity_units);
  std::vector<double> next(cap + 1, 0.0), cur(cap + 1, 0.0);
  std::vector<std::vector<bool>> take(m, std::vector<bool>(cap + 1, false));

  for (int r = m - 1; r >= 0; --r) {
    const KnapsackItem& it = items[order[r]];
    const std::size_t w = static_cast<std::size_t>(it.weight);
    for (std::size_t c = 0; c <= cap; ++c) {
      double best = next[c];
      if (w <= c) {
        const double with = it.net_value + next[c - w];
        if (with >= best) {  // >= takes the earlier item on exact ties
          best = with;
          take[r][c] = true;
        }
      }
      cur[c] = best;
    }
    next.swap(cur);
  }

  std::vector<int> selected;
  std::size_t c = cap;
  for (int r = 0; r < m; ++r) {
    if (take[r][c]) {
      selected.push_back(items[order[r]].service);
      c -= static_cast<std::size_t>(items[order[r]].weight);
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

SystemState dva_step(const SystemState& prev, int slot, const RequestMatrix& requests,
                     const ServiceList& services, const Topology& topo,
                     const DvaConfig& cfg) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  SystemState now(s, n);
  const std::int64_t quantum =
      std::max<std::int64_t>(1, volume_from_gb(cfg.capacity_quantum_gb));
  // Independent per-server knapsacks; the exchange step below is where the
  // completed slot placement becomes visible to everyone.
  for (int j = 1; j <= n; ++j) {
    const auto items = build_items(j, slot, prev, requests, services, topo, cfg);
    const std::int64_t capacity = topo.storage(j) / quantum;
    for (int i : solve_knapsack(items, capacity)) now.set_placed(i, j, true);
  }
  finalize_state(now, prev, services, topo);
  return now;
}

DvaRun dva_run(const RequestMatrix& requests, const ServiceList& services,
               const Topology& topo, const DvaConfig& cfg, int horizon) {
  validate_services(services);
  cfg.validate();
  if (horizon < 1 || horizon > requests.horizon()) {
    throw std::invalid_argument("horizon outside the request matrix range");
  }
  Schedule states;
  states.reserve(horizon);
  std::vector<double> step_ms;
  step_ms.reserve(horizon);
  SystemState prev = SystemState::initial(static_cast<int>(services.size()),
                                          topo.n_servers());
  for (int t = 1; t <= horizon; ++t) {
    const auto begin = std::chrono::steady_clock::now();
    SystemState now = dva_step(prev, t, requests, services, topo, cfg);
    const auto end = std::chrono::steady_clock::now();
    step_ms.push_back(std::chrono::duration<double, std::milli>(end - begin).count());
    states.push_back(now);
    prev = std::move(now);
  }
  CostBreakdown cost = evaluate_schedule(states, services, topo, requests);
  return DvaRun{std::move(states), std::move(cost), std::move(step_ms)};
}

double keep_unchanged_estimate(const SystemState& q, int slot, int horizon,
                               const RequestMatrix& requests,
                               const ServiceList& services, const Topology& topo,
                               double theta) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    for (int i = 0; i < s; ++i) {
      if (q.placed(i, j)) {
        // Refresh charges along the keep-placed lifetime trajectory.
        int l = q.lifetime(i, j);
        double w = 1.0;
        for (int a = slot; a <= horizon; ++a) {
          if (l == 0) total += w * static_cast<double>(
                                       volume_as_cost(services[i].refresh_volume));
          if (a < horizon) l = advance_lifetime(l, true, true, services[i].refresh_interval);
          w *= theta;
        }
      } else {
        const Gamma g = topo.gamma(j, q.offload(i, j));
        double w = 1.0;
        for (int a = slot; a <= horizon; ++a) {
          total += w * static_cast<double>(requests.predicted(i, j, a) *
                                           services[i].offload_volume * g);
          w *= theta;
        }
      }
    }
  }
  return total;
}

}  // namespace trsp
