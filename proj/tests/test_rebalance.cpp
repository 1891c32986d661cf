#include "channelmesh/rebalance.hpp"

#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

using namespace channelmesh;

namespace {

HubRebalanceInput two_channel_example() {
  // Channel 1 holds (client 50, hub 150); channel 2 (client 120, hub 80).
  // With a floor of 100 both floors bind on both channels: x = (50, -20)
  // is the only feasible point.
  HubRebalanceInput in;
  in.hub = 0;
  in.channels = {{1, 50, 150, 1.0}, {2, 120, 80, 1.0}};
  in.l_min = 100;
  in.l_available = 100;
  return in;
}

CircularInput k2_example(Msat l_min) {
  CircularInput in;
  in.loop = {0, 1, 2, 3};
  in.liquidity = {100, 40, 60, 10};
  in.l_min = l_min;
  return in;
}

Msat abs_sum(const std::vector<Msat>& x, Msat y) {
  Msat total = std::abs(y);
  for (Msat v : x) total += std::abs(v);
  return total;
}

struct RandomHub {
  std::mt19937_64 rng;
  explicit RandomHub(std::uint64_t seed) : rng(seed) {}

  HubRebalanceInput next(std::size_t max_channels, Msat max_side) {
    HubRebalanceInput in;
    in.hub = 0;
    std::size_t n = 1 + rng() % max_channels;
    for (std::size_t i = 0; i < n; ++i) {
      HubChannelLiquidity ch;
      ch.client = static_cast<NodeId>(i + 1);
      ch.client_msat = static_cast<Msat>(rng() % (max_side + 1));
      ch.hub_msat = static_cast<Msat>(rng() % (max_side + 1));
      ch.cost = static_cast<double>(1 + rng() % 3);
      in.channels.push_back(ch);
    }
    in.l_min = static_cast<Msat>(rng() % 101);
    in.l_available = static_cast<Msat>(rng() % 301);
    return in;
  }
};

}  // namespace

TEST_CASE("hub planner solves the two channel floor case uniquely") {
  HubRebalancePlan plan = plan_hub_rebalance(two_channel_example());
  REQUIRE(plan.status == PlanStatus::Feasible);
  REQUIRE(plan.x.size() == 2);
  CHECK(plan.x[0] == 50);
  CHECK(plan.x[1] == -20);
  CHECK(plan.objective_cost == doctest::Approx(70.0));
  // Linearization witnesses collapse to |x| at the optimum.
  CHECK(plan.y_aux[0] == 50);
  CHECK(plan.y_aux[1] == 20);
}

TEST_CASE("hub planner returns the zero plan when every side is at the floor") {
  HubRebalanceInput in;
  in.channels = {{1, 100, 100, 1.0}, {2, 250, 400, 2.0}};
  in.l_min = 100;
  in.l_available = 50;
  HubRebalancePlan plan = plan_hub_rebalance(in);
  REQUIRE(plan.status == PlanStatus::Feasible);
  CHECK(plan.x == std::vector<Msat>{0, 0});
  CHECK(plan.objective_cost == doctest::Approx(0.0));
}

TEST_CASE("hub planner reports infeasible when a capacity cannot host two floors") {
  // Capacity 150 < 2 * 100: both sides can never reach the floor.
  HubRebalanceInput in;
  in.channels = {{1, 70, 80, 1.0}};
  in.l_min = 100;
  in.l_available = 1000;
  CHECK(plan_hub_rebalance(in).status == PlanStatus::Infeasible);
  CHECK(hub_bruteforce_oracle(in, 1).status == PlanStatus::Infeasible);
}

TEST_CASE("hub oracle confirms the worked example on a coarse grid") {
  HubOracleResult oracle = hub_bruteforce_oracle(two_channel_example(), 10);
  REQUIRE(oracle.status == PlanStatus::Feasible);
  CHECK(oracle.objective_cost == doctest::Approx(70.0));
}

TEST_CASE("lp planner dominates the greedy baseline") {
  // Channel 1 needs +50; the budget only allows a net 20 outflow. The
  // greedy pass gives up, the planner funds the move by pulling 30 back
  // from the rich channel 2.
  HubRebalanceInput in;
  in.hub = 0;
  in.channels = {{1, 50, 150, 1.0}, {2, 200, 100, 1.0}};
  in.l_min = 100;
  in.l_available = 20;

  CHECK(plan_hub_rebalance_greedy(in).status == PlanStatus::Infeasible);

  HubRebalancePlan plan = plan_hub_rebalance(in);
  REQUIRE(plan.status == PlanStatus::Feasible);
  CHECK(plan.x == std::vector<Msat>{50, -30});
  CHECK(plan.objective_cost == doctest::Approx(80.0));
}

TEST_CASE("hub planner matches the oracle on random small instances") {
  RandomHub gen(2024);
  int feasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    HubRebalanceInput in = gen.next(2, 200);
    HubRebalancePlan plan = plan_hub_rebalance(in);
    HubOracleResult oracle = hub_bruteforce_oracle(in, 1);
    REQUIRE(plan.status == oracle.status);
    if (plan.status != PlanStatus::Feasible) continue;
    ++feasible_seen;
    CHECK(plan.objective_cost ==
          doctest::Approx(oracle.objective_cost).epsilon(1e-6));

    // Greedy never beats the planner and never solves what it cannot.
    HubRebalancePlan greedy = plan_hub_rebalance_greedy(in);
    if (greedy.status == PlanStatus::Feasible) {
      CHECK(plan.objective_cost <= greedy.objective_cost + 1e-6);
    }

    // Integer plan re-verifies: floors, budget, availability.
    Msat outflow = 0;
    for (std::size_t i = 0; i < in.channels.size(); ++i) {
      const HubChannelLiquidity& ch = in.channels[i];
      CHECK(ch.client_msat + plan.x[i] >= in.l_min);
      CHECK(ch.hub_msat - plan.x[i] >= in.l_min);
      CHECK(ch.client_msat + plan.x[i] >= 0);
      CHECK(ch.hub_msat - plan.x[i] >= 0);
      outflow += plan.x[i];
    }
    CHECK(outflow <= in.l_available);
  }
  CHECK(feasible_seen > 10);
}

TEST_CASE("raising the budget never worsens the optimum") {
  RandomHub gen(515);
  for (int trial = 0; trial < 40; ++trial) {
    HubRebalanceInput in = gen.next(3, 100);
    HubRebalancePlan tight = plan_hub_rebalance(in);
    in.l_available += 50;
    HubRebalancePlan roomy = plan_hub_rebalance(in);
    if (tight.status == PlanStatus::Feasible) {
      REQUIRE(roomy.status == PlanStatus::Feasible);
      CHECK(roomy.objective_cost <= tight.objective_cost + 1e-6);
    }
  }
}

TEST_CASE("circular planner reproduces the k=2 loop example") {
  CircularPlan plan = plan_circular_rebalance(k2_example(20));
  REQUIRE(plan.status == PlanStatus::Feasible);
  CHECK(plan.x == std::vector<Msat>{10, 0});
  CHECK(plan.y == 10);
  CHECK(plan.objective_msat == 20);

  // Post-state from the transfer identities.
  std::vector<Msat> deltas = circular_channel_deltas(plan.input, plan.x, plan.y);
  REQUIRE(deltas.size() == 4);
  CHECK(deltas == std::vector<Msat>{-10, 10, -10, 10});
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(plan.input.liquidity[j] + deltas[j] >= 20);
  }
}

TEST_CASE("circular planner reports infeasible when the floor is too high") {
  CHECK(plan_circular_rebalance(k2_example(50)).status ==
        PlanStatus::Infeasible);
  CHECK(circular_bruteforce_oracle(k2_example(50), 1).status ==
        PlanStatus::Infeasible);
}

TEST_CASE("circular oracle confirms the worked example") {
  CircularOracleResult oracle = circular_bruteforce_oracle(k2_example(20), 1);
  REQUIRE(oracle.status == PlanStatus::Feasible);
  CHECK(oracle.objective_msat == 20);
}

TEST_CASE("loop deltas cancel for any transfer vector") {
  // Conservation is an identity of the update equations, not a property
  // of optimal plans.
  CircularInput in = k2_example(20);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Msat> x = {static_cast<Msat>(rng() % 201) - 100,
                           static_cast<Msat>(rng() % 201) - 100};
    Msat y = x[0] + x[1];
    std::vector<Msat> deltas = circular_channel_deltas(in, x, y);
    CHECK(std::accumulate(deltas.begin(), deltas.end(), Msat{0}) == 0);
  }
}

TEST_CASE("circular planner matches the oracle on random loops") {
  std::mt19937_64 rng(7777);
  int feasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t k = 1 + rng() % 2;
    CircularInput in;
    for (NodeId node = 0; node < k + 2; ++node) in.loop.push_back(node);
    for (std::size_t j = 0; j < k + 2; ++j) {
      in.liquidity.push_back(static_cast<Msat>(rng() % 201));
    }
    in.l_min = static_cast<Msat>(rng() % 101);

    CircularPlan plan = plan_circular_rebalance(in);
    CircularOracleResult oracle = circular_bruteforce_oracle(in, 1);
    REQUIRE(plan.status == oracle.status);
    if (plan.status != PlanStatus::Feasible) continue;
    ++feasible_seen;
    CHECK(plan.objective_msat == oracle.objective_msat);
    CHECK(plan.objective_msat == abs_sum(plan.x, plan.y));

    // Closing transfer equals the sum of hop transfers; floors hold.
    CHECK(std::accumulate(plan.x.begin(), plan.x.end(), Msat{0}) == plan.y);
    std::vector<Msat> deltas = circular_channel_deltas(in, plan.x, plan.y);
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      CHECK(in.liquidity[j] + deltas[j] >= in.l_min);
    }
  }
  CHECK(feasible_seen > 10);
}

TEST_CASE("oracles refuse grids beyond their enumeration budget") {
  HubRebalanceInput hub;
  hub.channels = {{1, 5'000'000, 5'000'000, 1.0},
                  {2, 5'000'000, 5'000'000, 1.0},
                  {3, 5'000'000, 5'000'000, 1.0}};
  hub.l_min = 0;
  hub.l_available = 5'000'000;
  CHECK_THROWS_AS(hub_bruteforce_oracle(hub, 1), too_large_error);

  CircularInput loop;
  loop.loop = {0, 1, 2, 3, 4};
  loop.liquidity = {5'000'000, 5'000'000, 5'000'000, 5'000'000, 5'000'000};
  loop.l_min = 0;
  CHECK_THROWS_AS(circular_bruteforce_oracle(loop, 1), too_large_error);
}

TEST_CASE("needs_rebalance reports each low side once") {
  NetworkState state = make_network(build_star(3));
  fund_uniform(state, 100, 100);
  CHECK(needs_rebalance(state, 100).empty());
  CHECK(needs_rebalance(state, 101).size() == 6);

  // Drain one client below a floor of 50: exactly one entry.
  state.channel(0, 2).balance_b = 30;
  state.channel(0, 2).balance_a = 170;
  auto low = needs_rebalance(state, 50);
  REQUIRE(low.size() == 1);
  CHECK(low[0].edge == Edge{0, 2});
  CHECK(low[0].node == 2);
  CHECK(low[0].balance == 30);

  // Both sides below: two entries for the same channel.
  state.channel(0, 2).balance_b = 30;
  state.channel(0, 2).balance_a = 40;
  CHECK(needs_rebalance(state, 50).size() == 2);
}

TEST_CASE("hub plans apply to live state and detect staleness") {
  NetworkState state = make_network(build_star(2));
  open_channel(state, 0, 1, 150, 50);   // hub side a=150, client b=50
  open_channel(state, 0, 2, 80, 120);

  HubRebalanceInput in = make_hub_input(state, 0, 100, 100);
  REQUIRE(in.channels.size() == 2);
  CHECK(in.channels[0].client == 1);
  CHECK(in.channels[0].client_msat == 50);
  CHECK(in.channels[0].hub_msat == 150);

  HubRebalancePlan plan = plan_hub_rebalance(in);
  REQUIRE(plan.status == PlanStatus::Feasible);
  CHECK(plan.x == std::vector<Msat>{50, -20});

  Msat cap_before = state.channel(0, 1).capacity();
  apply_plan(state, plan);
  CHECK(state.channel(0, 1).balance_b == 100);
  CHECK(state.channel(0, 1).balance_a == 100);
  CHECK(state.channel(0, 2).balance_b == 100);
  CHECK(state.channel(0, 2).balance_a == 100);
  CHECK(state.channel(0, 1).capacity() == cap_before);

  // Replaying the same plan no longer matches the snapshot.
  CHECK_THROWS_AS(apply_plan(state, plan), stale_plan_error);
}

TEST_CASE("plans referencing closed channels are stale") {
  NetworkState state = make_network(build_star(2));
  open_channel(state, 0, 1, 150, 50);
  open_channel(state, 0, 2, 80, 120);
  HubRebalancePlan plan = plan_hub_rebalance(make_hub_input(state, 0, 100, 100));
  REQUIRE(plan.status == PlanStatus::Feasible);
  close_channel(state, 0, 2);
  CHECK_THROWS_AS(apply_plan(state, plan), stale_plan_error);
}

TEST_CASE("circular plans move liquidity around a live loop") {
  NetworkState state = make_network(build_multi_hub(2, 2));
  // Loop hub0 -> hub1 -> client2 -> hub0. Tracked sides: hub0 on (0,1),
  // hub1 on (1,2), client2 on (0,2).
  open_channel(state, 0, 1, 100, 0);
  open_channel(state, 1, 2, 60, 40);
  open_channel(state, 0, 2, 90, 10);
  open_channel(state, 1, 3, 50, 50);
  open_channel(state, 0, 3, 50, 50);

  CircularInput in = make_circular_input(state, {0, 1, 2}, 20);
  CHECK(in.liquidity == std::vector<Msat>{100, 60, 10});
  CHECK(in.opposite == std::vector<Msat>{0, 40, 90});

  CircularPlan plan = plan_circular_rebalance(in);
  REQUIRE(plan.status == PlanStatus::Feasible);
  Msat total_before = state.channel(0, 1).capacity() +
                      state.channel(1, 2).capacity() +
                      state.channel(0, 2).capacity();
  apply_plan(state, plan);
  // The closing side (client 2 toward hub 0) reached the floor.
  CHECK(state.channel(0, 2).balance_b >= 20);
  CHECK(state.channel(0, 1).capacity() + state.channel(1, 2).capacity() +
            state.channel(0, 2).capacity() ==
        total_before);
  for (const auto& [edge, ch] : state.channels) {
    CHECK(ch.balance_a >= 0);
    CHECK(ch.balance_b >= 0);
  }

  CHECK_THROWS_AS(apply_plan(state, plan), stale_plan_error);
}

TEST_CASE("planner input validation") {
  CircularInput bad;
  bad.loop = {0, 1};  // below the k >= 1 minimum of three nodes
  bad.liquidity = {10, 10};
  CHECK_THROWS_AS(plan_circular_rebalance(bad), invalid_argument_error);

  CircularInput mismatched;
  mismatched.loop = {0, 1, 2};
  mismatched.liquidity = {10, 10};  // needs k + 2 = 3 entries
  CHECK_THROWS_AS(plan_circular_rebalance(mismatched), invalid_argument_error);

  HubRebalanceInput negative;
  negative.channels = {{1, -5, 10, 1.0}};
  CHECK_THROWS_AS(plan_hub_rebalance(negative), invalid_argument_error);
}
