#include "trsp/optimal.hpp"

#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "trsp/errors.hpp"
#include "test_support.hpp"

using namespace trsp;
using namespace trsp::test;

TEST_CASE("enumerate_states counts (placement, lifetime) combinations") {
  SUBCASE("one service, LF 2: unplaced plus three lifetimes") {
    const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.1, 2)};
    CHECK(enumerate_states(services, cloud_only(2.0), 1).size() == 4);
  }
  SUBCASE("nothing fits: only the empty placement") {
    const ServiceList services = {make_service(0, 3.0, 1.0, 0.5, 0.1, 2),
                                  make_service(1, 4.0, 1.0, 0.5, 0.1, 3)};
    CHECK(enumerate_states(services, cloud_only(2.0), 1).size() == 1);
  }
  SUBCASE("two LF-1 services that both fit") {
    const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.1, 1),
                                  make_service(1, 1.0, 1.0, 0.5, 0.1, 1)};
    CHECK(enumerate_states(services, cloud_only(2.0), 1).size() == 9);
  }
  SUBCASE("the node budget fails loudly") {
    const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.1, 2),
                                  make_service(1, 1.0, 1.0, 0.5, 0.1, 2)};
    CHECK_THROWS_AS(enumerate_states(services, cloud_only(2.0), 1, 3), NodeBudgetError);
  }
}

TEST_CASE("solve_optimal on trivial instances") {
  SUBCASE("zero requests keep everything in the cloud at zero cost") {
    const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.1, 2),
                                  make_service(1, 1.0, 1.0, 0.5, 0.2, 1)};
    const RequestMatrix req = exact_requests(2, 1, 3, std::vector<std::int64_t>(6, 0));
    const DpSolution sol = solve_optimal(services, cloud_only(2.0), req, 3);
    CHECK(sol.total_cost == 0);
    CHECK(sol.objective_cost == 0);
    for (const auto& st : sol.states) {
      CHECK_FALSE(st.placed(0, 1));
      CHECK_FALSE(st.placed(1, 1));
    }
  }
}

TEST_CASE("oracle equivalence on random small instances") {
  Rng rng(99);
  for (int round = 0; round < 12; ++round) {
    const auto inst = random_small_instance(rng, 3, 4);
    const DpSolution dp = solve_optimal(inst.services, inst.topo, inst.requests,
                                        inst.horizon);
    const DpSolution bf = brute_force_oracle(inst.services, inst.topo, inst.requests,
                                             inst.horizon);
    CHECK(dp.objective_cost == bf.objective_cost);
    CHECK(dp.total_cost == bf.total_cost);  // exact predictions in these instances
  }
}

TEST_CASE("a single-slot instance solves the embedded knapsack") {
  // Items (weight w, value v) with lambda = (v + alpha) / d, r = w: the
  // optimal placement must match the exhaustively solved knapsack.
  struct Item {
    double w, v;
  };
  const std::vector<Item> items = {{2, 3.0}, {3, 4.0}, {4, 5.0}, {5, 6.0}};
  const double R = 8.0, alpha = 1.0, d = 0.5;
  ServiceList services;
  RequestMatrix req(static_cast<int>(items.size()), 1, 1);
  for (std::size_t i = 0; i < items.size(); ++i) {
    services.push_back(make_service(static_cast<int>(i), items[i].w, alpha, 0.5, d, 2));
    const auto lambda = static_cast<std::int64_t>((items[i].v + alpha) / d);
    req.set_actual(static_cast<int>(i), 1, 1, lambda);
    req.set_predicted(static_cast<int>(i), 1, 1, lambda);
  }
  const DpSolution sol = solve_optimal(services, cloud_only(R), req, 1);

  // Exhaustive 0-1 knapsack over the four items.
  double best_value = -1;
  int best_mask = 0;
  for (int mask = 0; mask < 16; ++mask) {
    double weight = 0, value = 0;
    for (int i = 0; i < 4; ++i) {
      if (mask & (1 << i)) {
        weight += items[i].w;
        value += items[i].v;
      }
    }
    if (weight <= R && value > best_value) {
      best_value = value;
      best_mask = mask;
    }
  }
  for (int i = 0; i < 4; ++i) {
    CHECK(sol.states[0].placed(i, 1) == ((best_mask >> i) & 1));
  }
}

TEST_CASE("bellman consistency on a small instance") {
  // Recompute every retained cost-to-go with an independent loop: on the
  // optimal path, A*(Q_t) = D(Q_t, Q_{t+1}) + A*(Q_{t+1}).
  Rng rng(5);
  const auto inst = random_small_instance(rng, 3, 4);
  const DpSolution sol = solve_optimal(inst.services, inst.topo, inst.requests,
                                       inst.horizon);
  Cost tail = 0;
  for (int t = inst.horizon; t >= 1; --t) {
    CHECK(sol.path_cost_to_go[t - 1] == tail);
    const SystemState prev = t == 1 ? SystemState::initial(
                                          static_cast<int>(inst.services.size()), 1)
                                    : sol.states[t - 2];
    tail += slot_cost(prev, sol.states[t - 1], inst.services, inst.topo,
                      inst.requests.predicted_slot(t))
                .total();
  }
  CHECK(tail == sol.objective_cost);
  CHECK(sol.path_cost_to_go[inst.horizon - 1] == 0);  // terminal condition
}

TEST_CASE("optimal cost is monotone in the horizon") {
  Rng rng(17);
  for (int round = 0; round < 5; ++round) {
    const auto inst = random_small_instance(rng, 3, 5);
    Cost last = 0;
    for (int horizon = 1; horizon <= inst.horizon; ++horizon) {
      const DpSolution sol = solve_optimal(inst.services, inst.topo, inst.requests,
                                           horizon);
      CHECK(sol.objective_cost >= last);
      last = sol.objective_cost;
    }
  }
}

TEST_CASE("solvers only read predictions; evaluation only reads actuals") {
  const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.2, 2)};
  RequestMatrix a(1, 1, 2), b(1, 1, 2);
  for (int t = 1; t <= 2; ++t) {
    a.set_predicted(0, 1, t, 9);
    b.set_predicted(0, 1, t, 9);
    a.set_actual(0, 1, t, 9);
    b.set_actual(0, 1, t, 2);  // same predictions, different realizations
  }
  const DpSolution sa = solve_optimal(services, cloud_only(2.0), a, 2);
  const DpSolution sb = solve_optimal(services, cloud_only(2.0), b, 2);
  CHECK(sa.objective_cost == sb.objective_cost);
  for (int t = 0; t < 2; ++t) CHECK(sa.states[t] == sb.states[t]);
  CHECK(sa.total_cost != sb.total_cost);
}

TEST_CASE("the oracle guard rejects oversized instances") {
  const ServiceList services = {make_service(0, 1.0, 1.0, 0.5, 0.1, 1),
                                make_service(1, 1.0, 1.0, 0.5, 0.1, 1)};
  const RequestMatrix req = exact_requests(2, 1, 3, std::vector<std::int64_t>(6, 1));
  CHECK_THROWS_AS(brute_force_oracle(services, cloud_only(2.0), req, 3, 10),
                  std::invalid_argument);
}
