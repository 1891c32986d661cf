#pragma once
// Liquidity rebalancing planners.
//
// Hub planner: given the hub's channels, computes signed per-channel
// transfers x_i (positive pushes hub -> client) so every side ends at or
// above l_min, subject to per-side availability and a net-outflow budget,
// minimizing the cost-weighted total moved. Solved as a linear program
// with |x_i| linearized through auxiliary variables.
//
// Circular planner: given a loop CR -> P1 -> ... -> Pk -> DN -> CR with
// one directed liquidity figure per loop channel, computes hop transfers
// x_1..x_k and the closing transfer y. Post-state per channel:
//
//   L'[0]   = L[0]   - x_1
//   L'[j]   = L[j]   + x_j - x_{j+1}      j = 1..k-1
//   L'[k]   = L[k]   + x_k - y
//   L'[k+1] = L[k+1] + y
//
// subject to L'[j] >= l_min everywhere and sum(x) = y, minimizing
// sum|x_i| + |y|. Total loop liquidity telescopes to a constant for any
// transfer vector. Transfers may be negative (reverse flow).
//
// Both planners resolve ties among optimal solutions deterministically:
// a second solve over the optimal face minimizes index-weighted totals,
// which concentrates movement on the earliest channels.
//
// Plans are integral (msat). The LP solves in doubles; results are
// rounded to integers and re-verified against the constraints in exact
// integer arithmetic.

#include <cstdint>
#include <optional>
#include <vector>

#include "channelmesh/channel_state.hpp"
#include "channelmesh/types.hpp"

namespace channelmesh {

enum class PlanStatus {
  Feasible,
  Infeasible,
};

struct HubChannelLiquidity {
  NodeId client = 0;
  Msat client_msat = 0;  // balance held by the client side
  Msat hub_msat = 0;     // balance held by the hub side
  double cost = 1.0;     // per-msat weight in the objective
};

struct HubRebalanceInput {
  NodeId hub = 0;
  std::vector<HubChannelLiquidity> channels;
  Msat l_min = 0;
  // Budget for the hub's net outflow across all channels.
  Msat l_available = 0;
};

struct HubRebalancePlan {
  PlanStatus status = PlanStatus::Infeasible;
  NodeId hub = 0;
  std::vector<Msat> x;      // signed transfer per channel; + is hub -> client
  std::vector<Msat> y_aux;  // |x|, the linearization witnesses
  double objective_cost = 0.0;
  // Snapshot used for stale-plan detection at apply time.
  HubRebalanceInput input;
};

HubRebalancePlan plan_hub_rebalance(const HubRebalanceInput& input);

// Per-channel local baseline: fixes each deficient side with the minimal
// move for that channel alone, ignoring global trade-offs, then checks
// the budget. Never beats the LP planner; may report Infeasible on inputs
// the LP planner can still solve.
HubRebalancePlan plan_hub_rebalance_greedy(const HubRebalanceInput& input);

struct CircularInput {
  std::vector<NodeId> loop;     // CR, P1..Pk, DN; k >= 1
  std::vector<Msat> liquidity;  // size k+2, one per loop channel incl DN->CR
  Msat l_min = 0;
  // Optional opposite-side balances per loop channel. When present, each
  // channel's net change is capped so the unlisted side stays >= 0.
  std::vector<Msat> opposite;
};

struct CircularPlan {
  PlanStatus status = PlanStatus::Infeasible;
  std::vector<Msat> x;  // size k
  Msat y = 0;
  Msat objective_msat = 0;  // sum |x_i| + |y|
  CircularInput input;
};

CircularPlan plan_circular_rebalance(const CircularInput& input);

// Net balance change per loop channel implied by a transfer vector.
std::vector<Msat> circular_channel_deltas(const CircularInput& input,
                                          const std::vector<Msat>& x, Msat y);

// Exhaustive integer-grid minimizers used to cross-check the planners.
// The grid is anchored at each variable's lower bound and stepped by
// grid_step; enumeration above 10^7 points is refused (too_large_error).
struct HubOracleResult {
  PlanStatus status = PlanStatus::Infeasible;
  double objective_cost = 0.0;
};
HubOracleResult hub_bruteforce_oracle(const HubRebalanceInput& input,
                                      Msat grid_step);

struct CircularOracleResult {
  PlanStatus status = PlanStatus::Infeasible;
  Msat objective_msat = 0;
};
CircularOracleResult circular_bruteforce_oracle(const CircularInput& input,
                                                Msat grid_step);

// Channels with a side under l_min, reported per side.
struct LowBalance {
  Edge edge;
  NodeId node = 0;
  Msat balance = 0;
};
std::vector<LowBalance> needs_rebalance(const NetworkState& state, Msat l_min);

// Builds planner input from live state. Hub input covers the hub's
// client channels in client-id order.
HubRebalanceInput make_hub_input(const NetworkState& state, NodeId hub,
                                 Msat l_min, Msat l_available);

// Circular input for an explicit loop; liquidity entries are the
// balances held by each loop channel's upstream node, opposite entries
// the downstream side.
CircularInput make_circular_input(const NetworkState& state,
                                  const std::vector<NodeId>& loop, Msat l_min);

// Applies a plan to live state. Balances shift side-to-side, so every
// channel keeps its capacity. Throws stale_plan_error when the state no
// longer matches the snapshot the plan was computed from or a balance
// would go negative.
void apply_plan(NetworkState& state, const HubRebalancePlan& plan);
void apply_plan(NetworkState& state, const CircularPlan& plan);

}  // namespace channelmesh
