#include "trsp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "trsp/rng.hpp"

namespace trsp {

namespace {

/// Capacity count floor(R/r) plus warnings when the uniform-size assumption
/// is broken. `pessimistic` picks the larger image (fewer kept services,
/// valid for the upper bound); otherwise the smaller (valid for the lower).
int capacity_count(const ServiceList& services, Volume storage, bool pessimistic,
                   std::vector<std::string>* warnings) {
  Volume lo = services[0].image_size, hi = services[0].image_size;
  for (const auto& svc : services) {
    lo = std::min(lo, svc.image_size);
    hi = std::max(hi, svc.image_size);
  }
  if (lo != hi && warnings) {
    warnings->push_back("image sizes are not uniform; capacity counts use the " +
                        std::string(pessimistic ? "largest" : "smallest") +
                        " image as a best-effort stand-in");
  }
  const Volume r = pessimistic ? hi : lo;
  return static_cast<int>(storage / r);
}

}  // namespace

Cost lemma3_upper_bound(const RequestMatrix& requests, const ServiceList& services,
                        const Topology& topo, int horizon,
                        std::vector<std::vector<int>>* u_out,
                        std::vector<std::string>* warnings) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();

  // Worth-placing assumption: every slot's offload cost at the cheapest
  // coefficient should exceed the placement volume.
  if (warnings) {
    bool violated = false;
    for (int j = 1; j <= n && !violated; ++j) {
      const Gamma g = topo.min_offload_gamma(j);
      for (int i = 0; i < s && !violated; ++i) {
        for (int t = 1; t <= horizon; ++t) {
          if (requests.actual(i, j, t) * services[i].offload_volume * g <=
              volume_as_cost(services[i].place_volume)) {
            violated = true;
            break;
          }
        }
      }
    }
    if (violated) {
      warnings->push_back(
          "some services are not worth placing in every slot; the upper bound "
          "is best-effort");
    }
  }

  Cost total = 0;
  if (u_out) u_out->assign(n, {});
  for (int j = 1; j <= n; ++j) {
    const int keep = capacity_count(services, topo.storage(j), true, warnings);
    std::vector<Cost> volume(s, 0);
    for (int i = 0; i < s; ++i) {
      for (int t = 1; t <= horizon; ++t) {
        volume[i] += requests.actual(i, j, t) * services[i].offload_volume;
      }
    }
    std::vector<int> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (volume[a] != volume[b]) return volume[a] > volume[b];
      return a < b;
    });
    for (int r = 0; r < s; ++r) {
      const int i = order[r];
      if (r < keep) {
        total += volume_as_cost(services[i].place_volume);
        total += (horizon / services[i].refresh_interval) *
                 volume_as_cost(services[i].refresh_volume);
        if (u_out) (*u_out)[j - 1].push_back(i);
      } else {
        total += volume[i] * kGammaOne;  // offloaded to the cloud
      }
    }
    if (u_out) std::sort((*u_out)[j - 1].begin(), (*u_out)[j - 1].end());
  }
  return total;
}

Cost lemma4_lower_bound(const RequestMatrix& requests, const ServiceList& services,
                        const Topology& topo, int horizon,
                        std::vector<std::vector<std::vector<int>>>* v_out,
                        std::vector<std::string>* warnings) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  Cost total = 0;
  if (v_out) v_out->assign(n, std::vector<std::vector<int>>(horizon));
  for (int j = 1; j <= n; ++j) {
    const int keep = capacity_count(services, topo.storage(j), false,
                                    j == 1 ? warnings : nullptr);
    const Gamma gamma_min = topo.min_offload_gamma(j);
    for (int t = 1; t <= horizon; ++t) {
      std::vector<int> order(s);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Cost va = requests.actual(a, j, t) * services[a].offload_volume;
        const Cost vb = requests.actual(b, j, t) * services[b].offload_volume;
        if (va != vb) return va > vb;
        return a < b;
      });
      for (int r = 0; r < s; ++r) {
        const int i = order[r];
        if (r < keep) {
          if (v_out) (*v_out)[j - 1][t - 1].push_back(i);
        } else {
          total += requests.actual(i, j, t) * services[i].offload_volume * gamma_min;
        }
      }
      if (v_out) {
        std::sort((*v_out)[j - 1][t - 1].begin(), (*v_out)[j - 1][t - 1].end());
      }
    }
  }
  return total;
}

BoundReport compute_bound_report(const RequestMatrix& requests,
                                 const ServiceList& services, const Topology& topo,
                                 int horizon) {
  validate_services(services);
  BoundReport report;
  report.d_s = lemma3_upper_bound(requests, services, topo, horizon, &report.u,
                                  &report.warnings);
  report.d_ignore = lemma4_lower_bound(requests, services, topo, horizon, &report.v,
                                       &report.warnings);

  const int n = topo.n_servers();
  double amortized = 0.0;
  double residual_u_gb = 0.0;
  for (int j = 1; j <= n; ++j) {
    std::vector<bool> in_u(services.size(), false);
    for (int i : report.u[j - 1]) {
      in_u[i] = true;
      amortized += volume_to_gb(services[i].place_volume) / horizon +
                   volume_to_gb(services[i].refresh_volume) /
                       services[i].refresh_interval;
    }
    for (int i = 0; i < static_cast<int>(services.size()); ++i) {
      if (in_u[i]) continue;
      for (int t = 1; t <= horizon; ++t) {
        residual_u_gb += static_cast<double>(requests.actual(i, j, t)) *
                         volume_to_gb(services[i].offload_volume);
      }
    }
  }
  report.amortized_term_gb = amortized;

  const double d_ignore_gb = cost_to_gb(report.d_ignore);
  if (report.d_ignore > 0) {
    report.ratio_bound = (amortized + residual_u_gb / horizon) /
                         (d_ignore_gb / horizon);
    report.ratio_exact = cost_to_gb(report.d_s) / d_ignore_gb;
  } else {
    report.ratio_bound = std::numeric_limits<double>::infinity();
    report.ratio_exact = std::numeric_limits<double>::infinity();
    report.warnings.push_back(
        "the lower bound is zero (storage fits everything); ratio bounds are "
        "vacuous");
  }
  return report;
}

std::string bound_report_json(const BoundReport& report) {
  nlohmann::json j;
  j["d_s_gb"] = cost_to_gb(report.d_s);
  j["d_ignore_gb"] = cost_to_gb(report.d_ignore);
  j["ratio_bound"] = std::isfinite(report.ratio_bound)
                         ? nlohmann::json(report.ratio_bound)
                         : nlohmann::json();
  j["ratio_exact"] = std::isfinite(report.ratio_exact)
                         ? nlohmann::json(report.ratio_exact)
                         : nlohmann::json();
  j["amortized_term_gb"] = report.amortized_term_gb;
  j["top_sets"]["u"] = report.u;
  j["top_sets"]["v"] = report.v;
  j["warnings"] = report.warnings;
  return j.dump(2);
}

int ground_element(int service, int server, int slot, int n_services, int n_servers) {
  return ((slot - 1) * n_servers + (server - 1)) * n_services + service;
}

namespace {

/// Cost of a placement set over the whole horizon: myopic offloads, exact
/// lifetime replay, no capacity constraint. This is the set function whose
/// diminishing-returns property the sampler probes.
Cost placement_set_cost(const std::vector<std::uint8_t>& chosen,
                        const ServiceList& services, const Topology& topo,
                        const RequestMatrix& requests, int horizon) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  Cost total = 0;
  std::vector<int> life(std::size_t(s) * n, 0);
  std::vector<std::uint8_t> prev(std::size_t(s) * n, 0);
  std::vector<std::uint8_t> now(std::size_t(s) * n, 0);
  for (int t = 1; t <= horizon; ++t) {
    for (int j = 1; j <= n; ++j) {
      for (int i = 0; i < s; ++i) {
        now[(j - 1) * s + i] = chosen[ground_element(i, j, t, s, n)];
      }
    }
    for (int j = 1; j <= n; ++j) {
      for (int i = 0; i < s; ++i) {
        const std::size_t idx = std::size_t(j - 1) * s + i;
        life[idx] = advance_lifetime(life[idx], prev[idx] != 0, now[idx] != 0,
                                     services[i].refresh_interval);
        if (now[idx]) {
          if (!prev[idx]) total += volume_as_cost(services[i].place_volume);
          if (life[idx] == 0) total += volume_as_cost(services[i].refresh_volume);
        } else {
          const std::int64_t lambda = requests.actual(i, j, t);
          if (lambda > 0) {
            Gamma best = topo.gamma(j, 0);
            for (int k = 1; k <= n; ++k) {
              if (k != j && now[(k - 1) * s + i]) best = std::min(best, topo.gamma(j, k));
            }
            total += lambda * services[i].offload_volume * best;
          }
        }
      }
    }
    prev = now;
  }
  return total;
}

}  // namespace

SubmodularityResult check_submodularity(const ServiceList& services,
                                        const Topology& topo,
                                        const RequestMatrix& requests, int horizon,
                                        std::int64_t samples, std::uint64_t seed) {
  validate_services(services);
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  const int ground = s * n * horizon;
  if (ground > 20) {
    throw std::invalid_argument("ground set has " + std::to_string(ground) +
                                " elements; the checker supports at most 20");
  }
  Rng rng(seed);
  SubmodularityResult result;
  std::vector<std::uint8_t> a(ground), b(ground);
  for (std::int64_t it = 0; it < samples; ++it) {
    int outside = 0;
    for (int g = 0; g < ground; ++g) {
      switch (rng.below(3)) {
        case 0:
          a[g] = b[g] = 0;
          ++outside;
          break;
        case 1:
          a[g] = 0;
          b[g] = 1;
          break;
        default:
          a[g] = b[g] = 1;
      }
    }
    if (outside == 0) continue;
    int pick = static_cast<int>(rng.below(outside));
    int e = -1;
    for (int g = 0; g < ground; ++g) {
      if (!b[g] && pick-- == 0) {
        e = g;
        break;
      }
    }
    ++result.samples_checked;
    const Cost fa = placement_set_cost(a, services, topo, requests, horizon);
    const Cost fb = placement_set_cost(b, services, topo, requests, horizon);
    a[e] = 1;
    const Cost fae = placement_set_cost(a, services, topo, requests, horizon);
    b[e] = 1;
    const Cost fbe = placement_set_cost(b, services, topo, requests, horizon);
    a[e] = 0;
    b[e] = 0;
    const Cost margin_a = fae - fa;
    const Cost margin_b = fbe - fb;
    if (margin_a < margin_b) {
      result.violation_found = true;
      result.counter_e = e;
      result.margin_a = margin_a;
      result.margin_b = margin_b;
      for (int g = 0; g < ground; ++g) {
        if (a[g]) result.counter_a.push_back(g);
        if (b[g]) result.counter_b.push_back(g);
      }
      return result;
    }
  }
  return result;
}

}  // namespace trsp
