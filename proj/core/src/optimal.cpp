#include "trsp/optimal.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

#include "trsp/errors.hpp"

namespace trsp {

namespace {

constexpr Cost kInfCost = std::numeric_limits<Cost>::max() / 4;

/// Feasible placements and lifetime assignments of a single server.
struct ServerSpace {
  std::vector<std::uint64_t> masks;       // ascending
  std::vector<std::int64_t> mask_base;    // first local id of each mask
  std::int64_t n_locals = 0;
};

std::vector<std::uint64_t> feasible_masks(const ServiceList& services, Volume capacity) {
  const int s = static_cast<int>(services.size());
  std::vector<std::uint64_t> masks;
  // DFS over services; only capacity-feasible subsets are materialized.
  struct Frame {
    int i;
    std::uint64_t mask;
    Volume used;
  };
  std::vector<Frame> stack{{0, 0, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.i == s) {
      masks.push_back(f.mask);
      continue;
    }
    if (f.used + services[f.i].image_size <= capacity) {
      stack.push_back({f.i + 1, f.mask | (std::uint64_t(1) << f.i),
                       f.used + services[f.i].image_size});
    }
    stack.push_back({f.i + 1, f.mask, f.used});
  }
  std::sort(masks.begin(), masks.end());
  return masks;
}

ServerSpace build_server_space(const ServiceList& services, Volume capacity,
                               std::int64_t budget) {
  ServerSpace sp;
  sp.masks = feasible_masks(services, capacity);
  sp.mask_base.reserve(sp.masks.size());
  for (std::uint64_t mask : sp.masks) {
    sp.mask_base.push_back(sp.n_locals);
    std::int64_t combos = 1;
    for (int i = 0; i < static_cast<int>(services.size()); ++i) {
      if ((mask >> i) & 1u) {
        combos *= services[i].refresh_interval + 1;
        if (combos > budget) {
          throw NodeBudgetError(
              "state enumeration exceeds the node budget; use the DVA solver "
              "for instances of this size");
        }
      }
    }
    sp.n_locals += combos;
    if (sp.n_locals > budget) {
      throw NodeBudgetError(
          "state enumeration exceeds the node budget; use the DVA solver for "
          "instances of this size");
    }
  }
  return sp;
}

/// Decodes a local id into (mask index, per-service lifetimes). Unplaced
/// entries get the canonical LF_i.
void decode_local(const ServerSpace& sp, const ServiceList& services,
                  std::int64_t local, int& mask_idx, int* life) {
  const auto it = std::upper_bound(sp.mask_base.begin(), sp.mask_base.end(), local);
  mask_idx = static_cast<int>(it - sp.mask_base.begin()) - 1;
  std::int64_t rem = local - sp.mask_base[mask_idx];
  const std::uint64_t mask = sp.masks[mask_idx];
  for (int i = 0; i < static_cast<int>(services.size()); ++i) {
    if ((mask >> i) & 1u) {
      const int radix = services[i].refresh_interval + 1;
      life[i] = static_cast<int>(rem % radix);
      rem /= radix;
    } else {
      life[i] = services[i].refresh_interval;
    }
  }
}

/// Encodes lifetimes of the services in `mask` into the local id.
std::int64_t encode_local(const ServerSpace& sp, const ServiceList& services,
                          int mask_idx, const int* life) {
  const std::uint64_t mask = sp.masks[mask_idx];
  std::int64_t rank = 0, radix_prod = 1;
  for (int i = 0; i < static_cast<int>(services.size()); ++i) {
    if ((mask >> i) & 1u) {
      rank += life[i] * radix_prod;
      radix_prod *= services[i].refresh_interval + 1;
    }
  }
  return sp.mask_base[mask_idx] + rank;
}

struct StateGraph {
  std::vector<ServerSpace> spaces;       // per server
  std::vector<std::int64_t> node_radix;  // locals per server
  std::int64_t n_nodes = 1;
  std::int64_t n_placements = 1;  // product of per-server mask counts
};

StateGraph build_graph(const ServiceList& services, const Topology& topo,
                       std::int64_t budget) {
  if (services.size() > 63) {
    throw NodeBudgetError("state enumeration supports at most 63 services");
  }
  StateGraph g;
  for (int j = 1; j <= topo.n_servers(); ++j) {
    g.spaces.push_back(build_server_space(services, topo.storage(j), budget));
    const std::int64_t locals = g.spaces.back().n_locals;
    g.node_radix.push_back(locals);
    if (g.n_nodes > budget / locals) {
      throw NodeBudgetError(
          "state enumeration exceeds the node budget; use the DVA solver for "
          "instances of this size");
    }
    g.n_nodes *= locals;
    g.n_placements *= static_cast<std::int64_t>(g.spaces.back().masks.size());
  }
  return g;
}

void decode_node(const StateGraph& g, const ServiceList& services, std::int64_t node,
                 int* mask_idx, int* life /* s*n, server-major */) {
  const int s = static_cast<int>(services.size());
  for (std::size_t j = 0; j < g.spaces.size(); ++j) {
    const std::int64_t local = node % g.node_radix[j];
    node /= g.node_radix[j];
    decode_local(g.spaces[j], services, local, mask_idx[j], life + j * s);
  }
}

Cost node_refresh_cost(const StateGraph& g, const ServiceList& services,
                       const int* mask_idx, const int* life) {
  const int s = static_cast<int>(services.size());
  Cost c = 0;
  for (std::size_t j = 0; j < g.spaces.size(); ++j) {
    const std::uint64_t mask = g.spaces[j].masks[mask_idx[j]];
    for (int i = 0; i < s; ++i) {
      if (((mask >> i) & 1u) && life[j * s + i] == 0) {
        c += volume_as_cost(services[i].refresh_volume);
      }
    }
  }
  return c;
}

Cost node_offload_cost(const ServiceList& services, const Topology& topo,
                       const std::vector<std::uint64_t>& masks,
                       const SlotRequests& lambda) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  Cost c = 0;
  for (int j = 1; j <= n; ++j) {
    for (int i = 0; i < s; ++i) {
      if ((masks[j - 1] >> i) & 1u) continue;
      const std::int64_t count = lambda(i, j);
      if (count == 0) continue;
      Gamma best = topo.gamma(j, 0);
      for (int k = 1; k <= n; ++k) {
        if (k == j || !((masks[k - 1] >> i) & 1u)) continue;
        best = std::min(best, topo.gamma(j, k));
      }
      c += count * services[i].offload_volume * best;
    }
  }
  return c;
}

}  // namespace

std::vector<DpNode> enumerate_states(const ServiceList& services, const Topology& topo,
                                     int /*slot*/, std::int64_t node_budget) {
  validate_services(services);
  const StateGraph g = build_graph(services, topo, node_budget);
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  std::vector<DpNode> nodes(g.n_nodes);
  std::vector<int> mask_idx(n);
  std::vector<int> life(std::size_t(s) * n);
  for (std::int64_t v = 0; v < g.n_nodes; ++v) {
    decode_node(g, services, v, mask_idx.data(), life.data());
    DpNode& node = nodes[v];
    node.placement_masks.resize(n);
    for (int j = 0; j < n; ++j) node.placement_masks[j] = g.spaces[j].masks[mask_idx[j]];
    node.lifetime.assign(life.begin(), life.end());
  }
  return nodes;
}

DpSolution solve_optimal(const ServiceList& services, const Topology& topo,
                         const RequestMatrix& requests, int horizon,
                         const DpOptions& opts) {
  validate_services(services);
  if (horizon < 1 || horizon > requests.horizon()) {
    throw std::invalid_argument("horizon outside the request matrix range");
  }
  const StateGraph g = build_graph(services, topo, opts.node_budget);
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  const std::int64_t nodes = g.n_nodes;

  // Scratch decodings of every node, reused across slots.
  std::vector<int> mask_idx(std::size_t(nodes) * n);
  std::vector<int> life(std::size_t(nodes) * s * n);
  std::vector<Cost> refresh_of(nodes);
  for (std::int64_t v = 0; v < nodes; ++v) {
    decode_node(g, services, v, mask_idx.data() + v * n, life.data() + v * std::size_t(s) * n);
    refresh_of[v] = node_refresh_cost(g, services, mask_idx.data() + v * n,
                                      life.data() + v * std::size_t(s) * n);
  }

  // Destination local id per (source local, destination mask), per server.
  // Derived lazily per transition instead: lifetimes shift deterministically.
  std::vector<Cost> value_next(nodes, 0);  // slot T boundary: cost-to-go 0
  std::vector<Cost> value_cur(nodes, kInfCost);
  std::vector<std::vector<std::int32_t>> succ(
      horizon, std::vector<std::int32_t>(nodes, -1));

  std::vector<int> dest_life(s);
  std::vector<int> combo(n);

  const std::int64_t root = 0;  // empty masks sort first on every server

  for (int t = horizon; t >= 1; --t) {
    // Offload cost of landing in each node this slot (predicted requests).
    std::vector<Cost> offload_of(nodes);
    std::vector<std::uint64_t> masks(n);
    const SlotRequests lambda = requests.predicted_slot(t);
    for (std::int64_t v = 0; v < nodes; ++v) {
      for (int j = 0; j < n; ++j) masks[j] = g.spaces[j].masks[mask_idx[v * n + j]];
      offload_of[v] = node_offload_cost(services, topo, masks, lambda);
    }

    const bool from_root = (t == 1);
    const std::int64_t n_sources = from_root ? 1 : nodes;
    for (std::int64_t u = 0; u < n_sources; ++u) {
      const std::int64_t src = from_root ? root : u;
      const int* src_mask_idx = mask_idx.data() + src * n;
      const int* src_life = life.data() + src * std::size_t(s) * n;
      Cost best = kInfCost;
      std::int32_t best_succ = -1;
      std::fill(combo.begin(), combo.end(), 0);
      // Mixed-radix sweep over per-server destination masks, ascending, so
      // the first strict improvement fixes deterministic tie-breaking.
      while (true) {
        Cost place = 0;
        std::int64_t dest = 0, radix_prod = 1;
        for (int j = 0; j < n; ++j) {
          const ServerSpace& sp = g.spaces[j];
          const std::uint64_t src_mask = sp.masks[src_mask_idx[j]];
          const std::uint64_t dst_mask = sp.masks[combo[j]];
          std::uint64_t added = dst_mask & ~src_mask;
          while (added) {
            const int i = std::countr_zero(added);
            added &= added - 1;
            place += volume_as_cost(services[i].place_volume);
          }
          // Lifetime digits of the destination local state. The root has
          // empty masks, so every placement out of it is fresh.
          for (int i = 0; i < s; ++i) {
            if ((dst_mask >> i) & 1u) {
              const bool held = ((src_mask >> i) & 1u) && src_life[j * s + i] >= 1;
              dest_life[i] = held ? src_life[j * s + i] - 1
                                  : services[i].refresh_interval;
            }
          }
          const std::int64_t local = encode_local(sp, services, combo[j], dest_life.data());
          dest += local * radix_prod;
          radix_prod *= g.node_radix[j];
        }
        const Cost total = place + refresh_of[dest] + offload_of[dest] + value_next[dest];
        if (total < best) {
          best = total;
          best_succ = static_cast<std::int32_t>(dest);
        }
        int j = 0;
        while (j < n && ++combo[j] == static_cast<int>(g.spaces[j].masks.size())) {
          combo[j] = 0;
          ++j;
        }
        if (j == n) break;
      }
      value_cur[src] = best;
      succ[t - 1][src] = best_succ;
    }
    value_next.swap(value_cur);
    if (t > 1) std::fill(value_cur.begin(), value_cur.end(), kInfCost);
  }

  DpSolution sol;
  sol.objective_cost = value_next[root];
  sol.explored_nodes = nodes * horizon;

  // Walk the stored successors and materialize states.
  sol.states.reserve(horizon);
  SystemState prev = SystemState::initial(s, n);
  std::int64_t at = root;
  std::vector<Cost> slot_objective(horizon + 1, 0);
  for (int t = 1; t <= horizon; ++t) {
    at = succ[t - 1][t == 1 ? root : at];
    SystemState now(s, n);
    for (int j = 1; j <= n; ++j) {
      const std::uint64_t mask = g.spaces[j - 1].masks[mask_idx[at * n + (j - 1)]];
      for (int i = 0; i < s; ++i) now.set_placed(i, j, (mask >> i) & 1u);
    }
    finalize_state(now, prev, services, topo);
    slot_objective[t] =
        slot_cost(prev, now, services, topo, requests.predicted_slot(t), false).total();
    sol.states.push_back(now);
    prev = now;
  }

  // A*(Q^(t)) along the path is the tail sum of predicted transition costs.
  sol.path_cost_to_go.assign(horizon, 0);
  Cost tail = 0;
  for (int t = horizon; t >= 1; --t) {
    sol.path_cost_to_go[t - 1] = tail;
    tail += slot_objective[t];
  }
  if (tail != sol.objective_cost) {
    throw std::logic_error("internal: path cost does not reproduce the DP objective");
  }

  sol.total_cost = evaluate_schedule(sol.states, services, topo, requests).total();
  return sol;
}

DpSolution brute_force_oracle(const ServiceList& services, const Topology& topo,
                              const RequestMatrix& requests, int horizon,
                              std::int64_t guard_sequences) {
  validate_services(services);
  if (horizon < 1 || horizon > requests.horizon()) {
    throw std::invalid_argument("horizon outside the request matrix range");
  }
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  if (s > 63) throw std::invalid_argument("oracle supports at most 63 services");

  // Global placements: the cross product of per-server feasible masks.
  std::vector<std::vector<std::uint64_t>> per_server;
  std::int64_t n_placements = 1;
  for (int j = 1; j <= n; ++j) {
    per_server.push_back(feasible_masks(services, topo.storage(j)));
    n_placements *= static_cast<std::int64_t>(per_server.back().size());
    if (n_placements > guard_sequences) {
      throw std::invalid_argument("oracle guard exceeded: too many placements per slot");
    }
  }
  double sequences = 1.0;
  for (int t = 0; t < horizon; ++t) {
    sequences *= static_cast<double>(n_placements);
    if (sequences > static_cast<double>(guard_sequences)) {
      throw std::invalid_argument("oracle guard exceeded: " +
                                  std::to_string(n_placements) + "^" +
                                  std::to_string(horizon) + " placement sequences");
    }
  }

  std::vector<std::vector<std::uint64_t>> combos;
  {
    std::vector<int> idx(n, 0);
    std::vector<std::uint64_t> cur(n);
    while (true) {
      for (int j = 0; j < n; ++j) cur[j] = per_server[j][idx[j]];
      combos.push_back(cur);
      int j = 0;
      while (j < n && ++idx[j] == static_cast<int>(per_server[j].size())) {
        idx[j] = 0;
        ++j;
      }
      if (j == n) break;
    }
  }

  // Reusable per-level states; copies happen only on improvement.
  std::vector<SystemState> level(horizon + 1, SystemState::initial(s, n));
  Cost best_objective = kInfCost;
  Schedule best_states;

  auto dfs = [&](auto&& self, int t, Cost prefix) -> void {
    if (t > horizon) {
      if (prefix < best_objective) {
        best_objective = prefix;
        best_states.assign(level.begin() + 1, level.end());
      }
      return;
    }
    for (const auto& masks : combos) {
      SystemState& now = level[t];
      const SystemState& prev = level[t - 1];
      for (int j = 1; j <= n; ++j) {
        for (int i = 0; i < s; ++i) now.set_placed(i, j, (masks[j - 1] >> i) & 1u);
      }
      finalize_state(now, prev, services, topo);
      const Cost c =
          slot_cost(prev, now, services, topo, requests.predicted_slot(t), false).total();
      self(self, t + 1, prefix + c);
    }
  };
  dfs(dfs, 1, 0);

  DpSolution sol;
  sol.states = std::move(best_states);
  sol.objective_cost = best_objective;
  sol.explored_nodes = n_placements;  // per-slot breadth actually explored
  sol.path_cost_to_go.assign(horizon, 0);
  sol.total_cost = evaluate_schedule(sol.states, services, topo, requests).total();
  return sol;
}

}  // namespace trsp
