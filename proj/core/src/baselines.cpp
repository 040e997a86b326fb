#include "trsp/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "trsp/errors.hpp"

namespace trsp {

namespace {

using RankLess = bool (*)(const ServiceList&, const SlotRequests&, int, int, int);

SystemState ranked_admission(const SystemState& prev, int slot,
                             const RequestMatrix& requests, const ServiceList& services,
                             const Topology& topo, RankLess before) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  SystemState now(s, n);
  const SlotRequests lambda = requests.predicted_slot(slot);
  std::vector<int> order(s);
  for (int j = 1; j <= n; ++j) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return before(services, lambda, j, a, b); });
    Volume used = 0;
    const Volume capacity = topo.storage(j);
    for (int i : order) {
      if (used + services[i].image_size <= capacity) {
        used += services[i].image_size;
        now.set_placed(i, j, true);
      }
    }
  }
  finalize_state(now, prev, services, topo);
  return now;
}

bool popular_before(const ServiceList&, const SlotRequests& lambda, int j, int a, int b) {
  const std::int64_t la = lambda(a, j), lb = lambda(b, j);
  if (la != lb) return la > lb;
  return a < b;
}

bool greedy_before(const ServiceList& services, const SlotRequests& lambda, int j,
                   int a, int b) {
  // lambda*d/r compared exactly via cross multiplication.
  using Wide = unsigned __int128;
  const Wide da = Wide(lambda(a, j)) * Wide(services[a].offload_volume) *
                  Wide(services[b].image_size);
  const Wide db = Wide(lambda(b, j)) * Wide(services[b].offload_volume) *
                  Wide(services[a].image_size);
  if (da != db) return da > db;
  return a < b;
}

}  // namespace

SystemState popular_step(const SystemState& prev, int slot,
                         const RequestMatrix& requests, const ServiceList& services,
                         const Topology& topo) {
  return ranked_admission(prev, slot, requests, services, topo, popular_before);
}

SystemState greedy_step(const SystemState& prev, int slot,
                        const RequestMatrix& requests, const ServiceList& services,
                        const Topology& topo) {
  return ranked_admission(prev, slot, requests, services, topo, greedy_before);
}

RelaxedLp build_rr_lp(const RequestMatrix& requests, const ServiceList& services,
                      const Topology& topo, int horizon, const RrOptions& opts) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  RelaxedLp lp;
  lp.n_services = s;
  lp.n_servers = n;
  lp.horizon = horizon;

  const std::int64_t n_x = std::int64_t(s) * n * horizon;
  const std::int64_t n_vars = 2 * n_x;
  if (n_vars > opts.variable_guard) {
    throw LpSizeError("relaxation would need " + std::to_string(n_vars) +
                      " variables, above the guard of " +
                      std::to_string(opts.variable_guard));
  }
  const std::int64_t n_rows = std::int64_t(n) * horizon + 2 * n_x;
  const std::int64_t cells = n_rows * (n_vars + n_rows + 1);
  if (cells > opts.tableau_cell_guard) {
    throw LpSizeError("relaxation tableau would need " + std::to_string(cells) +
                      " cells; shrink the instance or skip the rr baseline");
  }

  lp.problem.n_vars = static_cast<int>(n_vars);
  lp.problem.c.assign(n_vars, 0.0);
  for (int t = 1; t <= horizon; ++t) {
    for (int j = 1; j <= n; ++j) {
      const double gamma_near = gamma_to_double(topo.nearest_neighbor_gamma(j));
      for (int i = 0; i < s; ++i) {
        const ServiceSpec& svc = services[i];
        const double offload_gb = static_cast<double>(requests.predicted(i, j, t)) *
                                  volume_to_gb(svc.offload_volume) * gamma_near;
        lp.constant_gb += offload_gb;
        lp.problem.c[lp.x_index(i, j, t)] =
            volume_to_gb(svc.refresh_volume) / svc.refresh_interval - offload_gb;
        lp.problem.c[lp.z_index(i, j, t)] = volume_to_gb(svc.place_volume);
      }
    }
  }
  // Storage rows.
  for (int t = 1; t <= horizon; ++t) {
    for (int j = 1; j <= n; ++j) {
      LpProblem::Row row;
      row.rhs = volume_to_gb(topo.storage(j));
      for (int i = 0; i < s; ++i) {
        row.terms.emplace_back(lp.x_index(i, j, t), volume_to_gb(services[i].image_size));
      }
      lp.problem.rows.push_back(std::move(row));
    }
  }
  // Churn rows: x_t - x_{t-1} - z_t <= 0, with x_0 = 0.
  for (int t = 1; t <= horizon; ++t) {
    for (int j = 1; j <= n; ++j) {
      for (int i = 0; i < s; ++i) {
        LpProblem::Row row;
        row.terms.emplace_back(lp.x_index(i, j, t), 1.0);
        if (t > 1) row.terms.emplace_back(lp.x_index(i, j, t - 1), -1.0);
        row.terms.emplace_back(lp.z_index(i, j, t), -1.0);
        row.rhs = 0.0;
        lp.problem.rows.push_back(std::move(row));
      }
    }
  }
  // Upper bounds x <= 1.
  for (std::int64_t v = 0; v < n_x; ++v) {
    LpProblem::Row row;
    row.terms.emplace_back(static_cast<int>(v), 1.0);
    row.rhs = 1.0;
    lp.problem.rows.push_back(std::move(row));
  }
  return lp;
}

namespace {

/// Surrogate objective of an integral schedule: churn alpha, amortized
/// refresh, nearest-neighbor offload. Must match the LP's cost model.
double surrogate_cost_gb(const Schedule& states, const RequestMatrix& requests,
                         const ServiceList& services, const Topology& topo) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  double total = 0.0;
  for (int t = 1; t <= static_cast<int>(states.size()); ++t) {
    for (int j = 1; j <= n; ++j) {
      const double gamma_near = gamma_to_double(topo.nearest_neighbor_gamma(j));
      for (int i = 0; i < s; ++i) {
        const bool now = states[t - 1].placed(i, j);
        const bool before = t > 1 && states[t - 2].placed(i, j);
        if (now && !before) total += volume_to_gb(services[i].place_volume);
        if (now) {
          total += volume_to_gb(services[i].refresh_volume) /
                   services[i].refresh_interval;
        } else {
          total += static_cast<double>(requests.predicted(i, j, t)) *
                   volume_to_gb(services[i].offload_volume) * gamma_near;
        }
      }
    }
  }
  return total;
}

}  // namespace

RrSolution rr_solve(const RequestMatrix& requests, const ServiceList& services,
                    const Topology& topo, int horizon, const RrOptions& opts) {
  validate_services(services);
  if (horizon < 1 || horizon > requests.horizon()) {
    throw std::invalid_argument("horizon outside the request matrix range");
  }
  const RelaxedLp lp = build_rr_lp(requests, services, topo, horizon, opts);
  const LpSolution sol = solve_lp(lp.problem);

  const int s = lp.n_services;
  const int n = lp.n_servers;
  Schedule states;
  states.reserve(horizon);
  SystemState prev = SystemState::initial(s, n);
  for (int t = 1; t <= horizon; ++t) {
    SystemState now(s, n);
    for (int j = 1; j <= n; ++j) {
      std::vector<int> order;
      for (int i = 0; i < s; ++i) {
        if (sol.x[lp.x_index(i, j, t)] > 1e-9) order.push_back(i);
      }
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double xa = sol.x[lp.x_index(a, j, t)];
        const double xb = sol.x[lp.x_index(b, j, t)];
        if (xa != xb) return xa > xb;
        return a < b;
      });
      Volume used = 0;
      for (int i : order) {
        if (used + services[i].image_size <= topo.storage(j)) {
          used += services[i].image_size;
          now.set_placed(i, j, true);
        }
      }
    }
    finalize_state(now, prev, services, topo);
    states.push_back(now);
    prev = states.back();
  }

  RrSolution out{std::move(states), CostBreakdown(n, horizon), 0.0, 0.0, sol.iterations};
  out.cost = evaluate_schedule(out.states, services, topo, requests);
  out.lp_objective_gb = sol.objective + lp.constant_gb;
  out.surrogate_rounded_gb = surrogate_cost_gb(out.states, requests, services, topo);
  return out;
}

}  // namespace trsp
