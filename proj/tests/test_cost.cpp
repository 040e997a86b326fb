#include "trsp/cost.hpp"

#include <doctest.h>

#include <stdexcept>

#include "test_support.hpp"

using namespace trsp;
using namespace trsp::test;

TEST_CASE("advance_lifetime follows the decay-and-reset rule") {
  CHECK(advance_lifetime(3, true, true, 4) == 2);
  CHECK(advance_lifetime(0, true, true, 4) == 4);  // reset after refresh
  CHECK(advance_lifetime(2, false, true, 4) == 4); // fresh placement
  CHECK(advance_lifetime(2, true, false, 4) == 4);
  CHECK(advance_lifetime(1, true, true, 1) == 0);
  CHECK_THROWS_AS(advance_lifetime(0, true, true, 0), std::invalid_argument);
  CHECK_THROWS_AS(advance_lifetime(5, true, true, 4), std::invalid_argument);
}

TEST_CASE("needs_refresh fires exactly at zero") {
  CHECK(needs_refresh(0));
  CHECK_FALSE(needs_refresh(1));
  CHECK_FALSE(needs_refresh(4));  // just placed with l = LF
}

TEST_CASE("slot_cost charges placement, refresh, and offload per the model") {
  const ServiceList services = {make_service(0, 1.0, 2.0, 0.5, 0.1, 4),
                                make_service(1, 1.0, 1.0, 0.4, 0.5, 4)};
  const Topology topo = cloud_only(10.0);
  const SystemState prev = SystemState::initial(2, 1);

  SUBCASE("new placement plus cloud offload") {
    SystemState now(2, 1);
    now.set_placed(0, 1, true);
    finalize_state(now, prev, services, topo);
    const RequestMatrix req = exact_requests(2, 1, 1, {0, 3});
    const SlotCost sc = slot_cost(prev, now, services, topo, req.actual_slot(1));
    CHECK(sc.placement[0] == volume_from_gb(2.0) * kGammaOne);
    CHECK(sc.refresh[0] == 0);
    CHECK(sc.offload[0] == 3 * volume_from_gb(0.5) * kGammaOne);
    CHECK(cost_to_gb(sc.total()) == doctest::Approx(3.5));
  }

  SUBCASE("steady state with local serving costs nothing") {
    SystemState a(2, 1), b(2, 1);
    a.set_placed(0, 1, true);
    a.set_offload(0, 1, 1);
    a.set_lifetime(0, 1, 3);
    a.set_lifetime(1, 1, 4);
    b = a;
    b.set_lifetime(0, 1, 2);
    const RequestMatrix req = exact_requests(2, 1, 1, {7, 0});
    CHECK(slot_cost(a, b, services, topo, req.actual_slot(1)).total() == 0);
  }

  SUBCASE("refresh due charges beta only") {
    const ServiceList one = {make_service(0, 1.0, 2.0, 1.5, 0.1, 4)};
    SystemState a(1, 1), b(1, 1);
    a.set_placed(0, 1, true);
    a.set_offload(0, 1, 1);
    a.set_lifetime(0, 1, 1);
    b = a;
    b.set_lifetime(0, 1, 0);
    const RequestMatrix req = exact_requests(1, 1, 1, {0});
    const SlotCost sc = slot_cost(a, b, one, cloud_only(10.0), req.actual_slot(1));
    CHECK(sc.refresh[0] == volume_from_gb(1.5) * kGammaOne);
    CHECK(sc.total() == volume_from_gb(1.5) * kGammaOne);
  }
}

TEST_CASE("slot_cost rejects infeasible states") {
  const ServiceList services = {make_service(0, 5.0, 1.0, 0.5, 0.1, 2)};
  const Topology topo = cloud_only(1.0);
  SystemState prev = SystemState::initial(1, 1);
  SystemState now(1, 1);
  now.set_placed(0, 1, true);  // image 5 GB > storage 1 GB
  now.set_lifetime(0, 1, 2);
  now.set_offload(0, 1, 1);
  const RequestMatrix req = exact_requests(1, 1, 1, {0});
  CHECK_THROWS_AS(slot_cost(prev, now, services, topo, req.actual_slot(1)),
                  std::invalid_argument);
}

TEST_CASE("state validation enforces the offload constraints") {
  const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.1, 2)};
  const Topology topo = make_topology({5.0, 5.0}, {{0, 1, 1}, {1, 0, 0.3}, {1, 0.3, 0}});
  SystemState st = SystemState::initial(1, 2);

  // Offloading to a server that does not hold the service violates (6).
  st.set_offload(0, 1, 2);
  CHECK_THROWS_AS(st.validate(services, topo), std::invalid_argument);
  st.set_placed(0, 2, true);
  st.set_lifetime(0, 2, 2);
  st.set_offload(0, 2, 2);
  CHECK_NOTHROW(st.validate(services, topo));

  // A target outside 0..n violates conservation.
  st.set_offload(0, 1, 3);
  CHECK_THROWS_AS(st.validate(services, topo), std::invalid_argument);
}

TEST_CASE("evaluate_schedule totals and reconciles") {
  SUBCASE("single slot, everything to the cloud") {
    const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.2, 2),
                                  make_service(1, 1.0, 1.0, 0.5, 0.3, 2)};
    const Topology topo = cloud_only(5.0);
    const RequestMatrix req = exact_requests(2, 1, 1, {4, 6});
    SystemState empty(2, 1);
    finalize_state(empty, SystemState::initial(2, 1), services, topo);
    const CostBreakdown cost = evaluate_schedule({empty}, services, topo, req);
    CHECK(cost.total() == 4 * volume_from_gb(0.2) * kGammaOne +
                              6 * volume_from_gb(0.3) * kGammaOne);
    CHECK(cost.total() == cost.offload_total());
  }

  SUBCASE("a kept service with LF=1 refreshes in slot 2") {
    const ServiceList services = {make_service(0, 1.0, 1.0, 0.7, 0.2, 1)};
    const Topology topo = cloud_only(5.0);
    const RequestMatrix req = exact_requests(1, 1, 2, {0, 0});
    SystemState q0 = SystemState::initial(1, 1);
    SystemState s1(1, 1), s2(1, 1);
    s1.set_placed(0, 1, true);
    finalize_state(s1, q0, services, topo);
    CHECK(s1.lifetime(0, 1) == 1);
    s2.set_placed(0, 1, true);
    finalize_state(s2, s1, services, topo);
    CHECK(s2.lifetime(0, 1) == 0);
    const CostBreakdown cost = evaluate_schedule({s1, s2}, services, topo, req);
    CHECK(cost.refresh(1, 2) == volume_from_gb(0.7) * kGammaOne);
    CHECK(cost.refresh(1, 1) == 0);
    CHECK(cost.placement(1, 1) == volume_from_gb(1.0) * kGammaOne);
  }

  SUBCASE("tampered lifetimes are rejected") {
    const ServiceList services = {make_service(0, 1.0, 1.0, 0.7, 0.2, 3)};
    const Topology topo = cloud_only(5.0);
    const RequestMatrix req = exact_requests(1, 1, 1, {0});
    SystemState s1(1, 1);
    s1.set_placed(0, 1, true);
    finalize_state(s1, SystemState::initial(1, 1), services, topo);
    s1.set_lifetime(0, 1, 1);  // replay expects LF = 3
    CHECK_THROWS_AS(evaluate_schedule({s1}, services, topo, req),
                    std::invalid_argument);
  }
}

namespace {

/// Test-local replay of the cost formulas, written independently of
/// CostBreakdown: plain loops over the definition.
Cost reference_cost(const Schedule& states, const ServiceList& services,
                    const Topology& topo, const RequestMatrix& req) {
  const int s = static_cast<int>(services.size());
  const int n = topo.n_servers();
  Cost total = 0;
  for (int t = 1; t <= static_cast<int>(states.size()); ++t) {
    for (int j = 1; j <= n; ++j) {
      for (int i = 0; i < s; ++i) {
        const bool now = states[t - 1].placed(i, j);
        const bool before = t > 1 ? states[t - 2].placed(i, j) : false;
        if (now && !before) total += services[i].place_volume * kGammaOne;
        if (now && states[t - 1].lifetime(i, j) == 0) {
          total += services[i].refresh_volume * kGammaOne;
        }
        if (!now) {
          total += req.actual(i, j, t) * services[i].offload_volume *
                   topo.gamma(j, states[t - 1].offload(i, j));
        }
      }
    }
  }
  return total;
}

}  // namespace

TEST_CASE("random schedules reconcile exactly against a reference replay") {
  Rng rng(20240811);
  for (int round = 0; round < 40; ++round) {
    const auto inst = random_small_instance(rng);
    const int s = static_cast<int>(inst.services.size());
    // Random feasible schedule by greedy admission of a random order.
    Schedule states;
    SystemState prev = SystemState::initial(s, 1);
    for (int t = 1; t <= inst.horizon; ++t) {
      SystemState now(s, 1);
      Volume used = 0;
      for (int i = 0; i < s; ++i) {
        if (rng.bernoulli(0.5) &&
            used + inst.services[i].image_size <= inst.topo.storage(1)) {
          used += inst.services[i].image_size;
          now.set_placed(i, 1, true);
        }
      }
      finalize_state(now, prev, inst.services, inst.topo);
      states.push_back(now);
      prev = states.back();
    }
    const CostBreakdown cost =
        evaluate_schedule(states, inst.services, inst.topo, inst.requests);
    CHECK(cost.total() ==
          cost.placement_total() + cost.refresh_total() + cost.offload_total());
    Cost slot_sum = 0;
    for (int t = 1; t <= inst.horizon; ++t) slot_sum += cost.slot_total(t);
    CHECK(cost.total() == slot_sum);
    CHECK(cost.total() == reference_cost(states, inst.services, inst.topo,
                                         inst.requests));
  }
}

TEST_CASE("refresh cadence of a continuously held service") {
  // Holding for H slots yields floor(H / (LF + 1)) charges; for k <= LF that
  // equals k charges over k*LF + LF slots.
  for (int lf = 1; lf <= 4; ++lf) {
    const ServiceList services = {make_service(0, 1.0, 1.0, 1.0, 0.1, lf)};
    const Topology topo = cloud_only(5.0);
    const int hold = 24;
    const RequestMatrix req = exact_requests(1, 1, hold, std::vector<std::int64_t>(hold, 0));
    Schedule states;
    SystemState prev = SystemState::initial(1, 1);
    for (int t = 1; t <= hold; ++t) {
      SystemState now(1, 1);
      now.set_placed(0, 1, true);
      finalize_state(now, prev, services, topo);
      states.push_back(now);
      prev = states.back();
    }
    const CostBreakdown cost = evaluate_schedule(states, services, topo, req);
    for (int h = 1; h <= hold; ++h) {
      Cost charges = 0;
      for (int t = 1; t <= h; ++t) charges += cost.refresh(1, t);
      CHECK(charges == (h / (lf + 1)) * volume_from_gb(1.0) * kGammaOne);
    }
    for (int k = 1; k <= lf; ++k) {
      const int h = k * lf + lf;
      Cost charges = 0;
      for (int t = 1; t <= h; ++t) charges += cost.refresh(1, t);
      CHECK(charges == Cost(k) * volume_from_gb(1.0) * kGammaOne);
    }
  }
}

TEST_CASE("best_offload picks the cheapest holder with the cloud last") {
  const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.1, 2)};
  const Topology topo = make_topology(
      {5, 5, 5}, {{0, 1, 1, 1}, {1, 0, 0.3, 0.6}, {1, 0.3, 0, 0.2}, {1, 0.6, 0.2, 0}});

  SystemState st = SystemState::initial(1, 3);
  SUBCASE("nearer of two holders wins") {
    st.set_placed(0, 2, true);
    st.set_placed(0, 3, true);
    st.set_lifetime(0, 2, 2);
    st.set_lifetime(0, 3, 2);
    CHECK(best_offload(0, 1, st, topo) == 2);  // 0.3 beats 0.6
  }
  SUBCASE("no holder means cloud") { CHECK(best_offload(0, 1, st, topo) == kCloud); }
  SUBCASE("an edge tie with the cloud prefers the edge server") {
    const Topology tie = make_topology({5, 5}, {{0, 1, 1}, {1, 0, 1.0}, {1, 1.0, 0}});
    st = SystemState::initial(1, 2);
    st.set_placed(0, 2, true);
    CHECK(best_offload(0, 1, st, tie) == 2);
  }
  SUBCASE("holders dearer than the cloud lose to it") {
    const Topology dear = make_topology({5, 5}, {{0, 1, 1}, {1, 0, 1.2}, {1, 1.2, 0}});
    st = SystemState::initial(1, 2);
    st.set_placed(0, 2, true);
    CHECK(best_offload(0, 1, st, dear) == kCloud);
  }
}

TEST_CASE("best_offload never exceeds the cloud coefficient") {
  Rng rng(7);
  for (int round = 0; round < 200; ++round) {
    const int n = 2 + static_cast<int>(rng.below(3));
    std::vector<std::vector<double>> gamma(n + 1, std::vector<double>(n + 1, 0.0));
    for (int j = 1; j <= n; ++j) {
      gamma[j][0] = 1.0;
      gamma[0][j] = 1.0;
      for (int k = 1; k <= n; ++k) {
        if (j != k) gamma[j][k] = rng.uniform(0.05, 2.0);
      }
    }
    const Topology topo = make_topology(std::vector<double>(n, 5.0), gamma);
    const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.1, 2)};
    SystemState st = SystemState::initial(1, n);
    for (int k = 1; k <= n; ++k) {
      if (rng.bernoulli(0.5)) {
        st.set_placed(0, k, true);
        st.set_lifetime(0, k, 2);
      }
    }
    for (int j = 1; j <= n; ++j) {
      const Target tgt = best_offload(0, j, st, topo);
      CHECK(topo.gamma(j, tgt) <= kGammaOne);
    }
  }
}
