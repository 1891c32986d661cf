#include "channelmesh/rebalance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "channelmesh/lp.hpp"

namespace channelmesh {

namespace {

constexpr double kOraclePointBudget = 1e7;

void validate_hub_input(const HubRebalanceInput& input) {
  if (input.l_min < 0) {
    throw invalid_argument_error("l_min must be non-negative");
  }
  if (input.l_available < 0) {
    throw invalid_argument_error("l_available must be non-negative");
  }
  for (const auto& ch : input.channels) {
    if (ch.client_msat < 0 || ch.hub_msat < 0) {
      throw invalid_argument_error("channel liquidity must be non-negative");
    }
    if (ch.cost < 0.0) {
      throw invalid_argument_error("channel cost must be non-negative");
    }
  }
}

// Per-transfer integer bounds implied by the floor constraints plus the
// side-capacity limits: l_min - client <= x <= hub - l_min intersected
// with -client <= x <= hub.
struct XBounds {
  Msat lo = 0;
  Msat hi = 0;
};

XBounds hub_x_bounds(const HubChannelLiquidity& ch, Msat l_min) {
  return {std::max(l_min - ch.client_msat, -ch.client_msat),
          std::min(ch.hub_msat - l_min, ch.hub_msat)};
}

void validate_circular_input(const CircularInput& input) {
  if (input.loop.size() < 3) {
    throw invalid_argument_error(
        "circular loop needs at least CR, one client and DN");
  }
  const std::size_t channels = input.loop.size();
  if (input.liquidity.size() != channels) {
    throw invalid_argument_error(
        "circular liquidity must list one value per loop channel");
  }
  if (!input.opposite.empty() && input.opposite.size() != channels) {
    throw invalid_argument_error(
        "opposite balances must be empty or one per loop channel");
  }
  if (input.l_min < 0) {
    throw invalid_argument_error("l_min must be non-negative");
  }
  for (Msat v : input.liquidity) {
    if (v < 0) {
      throw invalid_argument_error("loop liquidity must be non-negative");
    }
  }
  for (Msat v : input.opposite) {
    if (v < 0) {
      throw invalid_argument_error("opposite balances must be non-negative");
    }
  }
}

}  // namespace

HubRebalancePlan plan_hub_rebalance(const HubRebalanceInput& input) {
  validate_hub_input(input);
  const std::size_t m = input.channels.size();

  HubRebalancePlan plan;
  plan.hub = input.hub;
  plan.input = input;
  if (m == 0) {
    plan.status = PlanStatus::Feasible;
    return plan;
  }

  // Variables: x_0..x_{m-1}, then the |x| witnesses y_0..y_{m-1}.
  LpProblem lp;
  lp.objective.assign(2 * m, 0.0);
  lp.lower.assign(2 * m, -kLpInfinity);
  lp.upper.assign(2 * m, kLpInfinity);
  for (std::size_t i = 0; i < m; ++i) {
    const XBounds b = hub_x_bounds(input.channels[i], input.l_min);
    lp.lower[i] = static_cast<double>(b.lo);
    lp.upper[i] = static_cast<double>(b.hi);
    lp.lower[m + i] = 0.0;
    lp.objective[m + i] = input.channels[i].cost;
  }
  {
    std::vector<double> budget(2 * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) budget[i] = 1.0;
    lp.add_row(std::move(budget), LpSense::LessEqual,
               static_cast<double>(input.l_available));
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> low(2 * m, 0.0);
    low[m + i] = 1.0;
    low[i] = -1.0;
    lp.add_row(std::move(low), LpSense::GreaterEqual, 0.0);
    std::vector<double> high(2 * m, 0.0);
    high[m + i] = 1.0;
    high[i] = 1.0;
    lp.add_row(std::move(high), LpSense::GreaterEqual, 0.0);
  }

  LpSolution first = solve_lp(lp);
  if (first.status != LpStatus::Optimal) {
    plan.status = PlanStatus::Infeasible;
    return plan;
  }

  // Tie-break pass: hold the objective at its optimum and minimize
  // index-weighted movement, which pins one optimal vertex.
  {
    double mag = 1.0;
    for (const auto& ch : input.channels) {
      mag = std::max({mag, std::abs(static_cast<double>(ch.client_msat)),
                      std::abs(static_cast<double>(ch.hub_msat))});
    }
    LpProblem second = lp;
    std::vector<double> cap(2 * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) cap[m + i] = input.channels[i].cost;
    second.add_row(std::move(cap), LpSense::LessEqual,
                   first.objective + 1e-7 * mag);
    second.objective.assign(2 * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      second.objective[m + i] = static_cast<double>(i + 1);
    }
    LpSolution refined = solve_lp(second);
    if (refined.status == LpStatus::Optimal) {
      first.values = refined.values;
    }
  }

  // Integerize and re-verify exactly.
  plan.x.resize(m);
  Msat sum = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const XBounds b = hub_x_bounds(input.channels[i], input.l_min);
    Msat v = std::llround(first.values[i]);
    v = std::clamp(v, b.lo, b.hi);
    plan.x[i] = v;
    sum += v;
  }
  if (sum > input.l_available) {
    // Rounding can overshoot the budget by a few msat; walk transfers
    // back toward their lower bounds, later channels first.
    Msat excess = sum - input.l_available;
    for (std::size_t i = m; i-- > 0 && excess > 0;) {
      const XBounds b = hub_x_bounds(input.channels[i], input.l_min);
      const Msat room = plan.x[i] - b.lo;
      const Msat take = std::min(room, excess);
      plan.x[i] -= take;
      excess -= take;
    }
    if (excess > 0) {
      plan.status = PlanStatus::Infeasible;
      return plan;
    }
  }

  plan.y_aux.resize(m);
  plan.objective_cost = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    plan.y_aux[i] = std::abs(plan.x[i]);
    plan.objective_cost +=
        input.channels[i].cost * static_cast<double>(plan.y_aux[i]);
  }
  plan.status = PlanStatus::Feasible;
  return plan;
}

HubRebalancePlan plan_hub_rebalance_greedy(const HubRebalanceInput& input) {
  validate_hub_input(input);
  const std::size_t m = input.channels.size();
  HubRebalancePlan plan;
  plan.hub = input.hub;
  plan.input = input;
  plan.x.assign(m, 0);
  Msat sum = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& ch = input.channels[i];
    const XBounds b = hub_x_bounds(ch, input.l_min);
    if (b.lo > b.hi) {
      plan.x.clear();
      plan.status = PlanStatus::Infeasible;
      return plan;
    }
    Msat move = 0;
    if (ch.client_msat < input.l_min) {
      move = input.l_min - ch.client_msat;  // push toward the client
    } else if (ch.hub_msat < input.l_min) {
      move = -(input.l_min - ch.hub_msat);  // pull back to the hub
    }
    move = std::clamp(move, b.lo, b.hi);
    plan.x[i] = move;
    sum += move;
  }
  if (sum > input.l_available) {
    plan.x.clear();
    plan.status = PlanStatus::Infeasible;
    return plan;
  }
  plan.y_aux.resize(m);
  plan.objective_cost = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    plan.y_aux[i] = std::abs(plan.x[i]);
    plan.objective_cost +=
        input.channels[i].cost * static_cast<double>(plan.y_aux[i]);
  }
  plan.status = PlanStatus::Feasible;
  return plan;
}

std::vector<Msat> circular_channel_deltas(const CircularInput& input,
                                          const std::vector<Msat>& x,
                                          Msat y) {
  const std::size_t k = input.loop.size() - 2;
  std::vector<Msat> delta(k + 2, 0);
  delta[0] = -x[0];
  for (std::size_t j = 1; j < k; ++j) delta[j] = x[j - 1] - x[j];
  delta[k] = x[k - 1] - y;
  delta[k + 1] = y;
  return delta;
}

namespace {

bool circular_feasible_exact(const CircularInput& input,
                             const std::vector<Msat>& x, Msat y) {
  Msat sum = 0;
  for (Msat v : x) sum += v;
  if (sum != y) return false;
  const auto delta = circular_channel_deltas(input, x, y);
  for (std::size_t j = 0; j < delta.size(); ++j) {
    if (input.liquidity[j] + delta[j] < input.l_min) return false;
    if (!input.opposite.empty() && delta[j] > input.opposite[j]) return false;
  }
  return true;
}

Msat circular_objective(const std::vector<Msat>& x, Msat y) {
  Msat total = std::abs(y);
  for (Msat v : x) total += std::abs(v);
  return total;
}

}  // namespace

CircularPlan plan_circular_rebalance(const CircularInput& input) {
  validate_circular_input(input);
  const std::size_t k = input.loop.size() - 2;
  const auto& L = input.liquidity;

  CircularPlan plan;
  plan.input = input;

  // Variables: x_0..x_{k-1}, y, then |.| witnesses a_0..a_{k-1}, b.
  const std::size_t yv = k;
  const std::size_t aux = k + 1;
  const std::size_t nv = 2 * k + 2;
  LpProblem lp;
  lp.objective.assign(nv, 0.0);
  lp.lower.assign(nv, -kLpInfinity);
  lp.upper.assign(nv, kLpInfinity);
  for (std::size_t i = 0; i <= k; ++i) {
    lp.lower[aux + i] = 0.0;
    lp.objective[aux + i] = 1.0;
  }

  auto floor_row = [&](std::size_t j) {
    // Post-liquidity of loop channel j stays at or above l_min.
    std::vector<double> r(nv, 0.0);
    if (j == 0) {
      r[0] = -1.0;
    } else if (j < k) {
      r[j - 1] = 1.0;
      r[j] = -1.0;
    } else if (j == k) {
      r[k - 1] = 1.0;
      r[yv] = -1.0;
    } else {
      r[yv] = 1.0;
    }
    return r;
  };

  for (std::size_t j = 0; j < k + 2; ++j) {
    lp.add_row(floor_row(j), LpSense::GreaterEqual,
               static_cast<double>(input.l_min - L[j]));
  }
  {
    std::vector<double> conserve(nv, 0.0);
    for (std::size_t i = 0; i < k; ++i) conserve[i] = 1.0;
    conserve[yv] = -1.0;
    lp.add_row(std::move(conserve), LpSense::Equal, 0.0);
  }
  if (!input.opposite.empty()) {
    // The unlisted side of channel j loses delta_j, so the net change
    // may not exceed what that side holds.
    for (std::size_t j = 0; j < k + 2; ++j) {
      lp.add_row(floor_row(j), LpSense::LessEqual,
                 static_cast<double>(input.opposite[j]));
    }
  }
  for (std::size_t i = 0; i <= k; ++i) {
    const std::size_t var = i < k ? i : yv;
    std::vector<double> low(nv, 0.0);
    low[aux + i] = 1.0;
    low[var] = -1.0;
    lp.add_row(std::move(low), LpSense::GreaterEqual, 0.0);
    std::vector<double> high(nv, 0.0);
    high[aux + i] = 1.0;
    high[var] = 1.0;
    lp.add_row(std::move(high), LpSense::GreaterEqual, 0.0);
  }

  LpSolution first = solve_lp(lp);
  if (first.status != LpStatus::Optimal) {
    plan.status = PlanStatus::Infeasible;
    return plan;
  }

  {
    double mag = 1.0;
    for (Msat v : L) mag = std::max(mag, std::abs(static_cast<double>(v)));
    LpProblem second = lp;
    std::vector<double> cap(nv, 0.0);
    for (std::size_t i = 0; i <= k; ++i) cap[aux + i] = 1.0;
    second.add_row(std::move(cap), LpSense::LessEqual,
                   first.objective + 1e-7 * mag);
    second.objective.assign(nv, 0.0);
    for (std::size_t i = 0; i <= k; ++i) {
      second.objective[aux + i] = static_cast<double>(i + 1);
    }
    LpSolution refined = solve_lp(second);
    if (refined.status == LpStatus::Optimal) {
      first.values = refined.values;
    }
  }

  plan.x.resize(k);
  for (std::size_t i = 0; i < k; ++i) plan.x[i] = std::llround(first.values[i]);
  plan.y = 0;
  for (Msat v : plan.x) plan.y += v;

  if (!circular_feasible_exact(input, plan.x, plan.y)) {
    // The LP vertex should be integral; if rounding still landed off the
    // feasible lattice, search the floor/ceil neighborhood.
    if (k > 16) {
      throw std::runtime_error(
          "circular plan integer refinement failed on a large loop");
    }
    bool found = false;
    std::vector<Msat> best_x;
    Msat best_y = 0;
    Msat best_obj = 0;
    for (std::size_t mask = 0; mask < (1u << k); ++mask) {
      std::vector<Msat> cand(k);
      for (std::size_t i = 0; i < k; ++i) {
        const double v = first.values[i];
        cand[i] = (mask >> i) & 1 ? static_cast<Msat>(std::ceil(v))
                                  : static_cast<Msat>(std::floor(v));
      }
      Msat ysum = 0;
      for (Msat v : cand) ysum += v;
      if (!circular_feasible_exact(input, cand, ysum)) continue;
      const Msat obj = circular_objective(cand, ysum);
      if (!found || obj < best_obj) {
        found = true;
        best_x = cand;
        best_y = ysum;
        best_obj = obj;
      }
    }
    if (!found) {
      plan.status = PlanStatus::Infeasible;
      return plan;
    }
    plan.x = best_x;
    plan.y = best_y;
  }

  plan.objective_msat = circular_objective(plan.x, plan.y);
  plan.status = PlanStatus::Feasible;
  return plan;
}

HubOracleResult hub_bruteforce_oracle(const HubRebalanceInput& input,
                                      Msat grid_step) {
  validate_hub_input(input);
  if (grid_step < 1) {
    throw invalid_argument_error("grid_step must be at least 1");
  }
  const std::size_t m = input.channels.size();
  std::vector<Msat> lo(m), hi(m);
  double points = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const XBounds b = hub_x_bounds(input.channels[i], input.l_min);
    lo[i] = b.lo;
    hi[i] = b.hi;
    if (b.lo > b.hi) {
      return {PlanStatus::Infeasible, 0.0};
    }
    points *= static_cast<double>((b.hi - b.lo) / grid_step + 1);
  }
  if (points > kOraclePointBudget) {
    throw too_large_error("oracle grid exceeds the enumeration budget");
  }

  Msat lo_sum = 0;
  for (Msat v : lo) lo_sum += v;

  bool found = false;
  double best = 0.0;
  std::vector<Msat> x(m, 0);

  auto recurse = [&](auto&& self, std::size_t level, Msat sum_prefix,
                     Msat lo_rest, double cost_prefix) -> void {
    if (level == m) {
      if (sum_prefix <= input.l_available && (!found || cost_prefix < best)) {
        found = true;
        best = cost_prefix;
      }
      return;
    }
    // Remaining transfers are at least their lower bounds; prune
    // branches that already bust the budget.
    const Msat rest_after = lo_rest - lo[level];
    for (Msat v = lo[level]; v <= hi[level]; v += grid_step) {
      if (sum_prefix + v + rest_after > input.l_available) continue;
      x[level] = v;
      self(self, level + 1, sum_prefix + v, rest_after,
           cost_prefix + input.channels[level].cost *
                             static_cast<double>(std::abs(v)));
    }
  };
  recurse(recurse, 0, 0, lo_sum, 0.0);

  if (!found) return {PlanStatus::Infeasible, 0.0};
  return {PlanStatus::Feasible, best};
}

CircularOracleResult circular_bruteforce_oracle(const CircularInput& input,
                                                Msat grid_step) {
  validate_circular_input(input);
  if (grid_step < 1) {
    throw invalid_argument_error("grid_step must be at least 1");
  }
  const std::size_t k = input.loop.size() - 2;
  const auto& L = input.liquidity;

  // Static enumeration windows from constraint propagation. Upper
  // bounds chain forward along the loop floors; lower bounds come from
  // the closing transfer's floor plus everyone else at their maximum.
  std::vector<Msat> ub(k);
  ub[0] = L[0] - input.l_min;
  if (!input.opposite.empty()) {
    // delta_0 = -x_0 <= opp_0 has no upper effect; handled below via lo.
  }
  for (std::size_t i = 1; i < k; ++i) {
    ub[i] = ub[i - 1] + L[i] - input.l_min;
  }
  const Msat y_lo = input.l_min - L[k + 1];
  Msat ub_total = 0;
  for (Msat v : ub) ub_total += v;

  std::vector<Msat> lo(k);
  for (std::size_t i = 0; i < k; ++i) {
    lo[i] = y_lo - (ub_total - ub[i]);
    if (!input.opposite.empty() && i == 0) {
      lo[i] = std::max(lo[i], -input.opposite[0]);
    }
  }

  double points = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (lo[i] > ub[i]) return {PlanStatus::Infeasible, 0};
    points *= static_cast<double>((ub[i] - lo[i]) / grid_step + 1);
  }
  if (points > kOraclePointBudget) {
    throw too_large_error("oracle grid exceeds the enumeration budget");
  }

  bool found = false;
  Msat best = 0;
  std::vector<Msat> x(k, 0);

  auto recurse = [&](auto&& self, std::size_t level, Msat sum_prefix,
                     Msat obj_prefix) -> void {
    if (level == k) {
      // Channels 0..k-1 were enforced while descending; only the two
      // closing channels depend on y.
      const Msat y = sum_prefix;
      if (L[k] + x[k - 1] - y < input.l_min) return;
      if (L[k + 1] + y < input.l_min) return;
      if (!input.opposite.empty()) {
        if (x[k - 1] - y > input.opposite[k]) return;
        if (y > input.opposite[k + 1]) return;
      }
      const Msat obj = obj_prefix + std::abs(y);
      if (!found || obj < best) {
        found = true;
        best = obj;
      }
      return;
    }
    for (Msat v = lo[level]; v <= ub[level]; v += grid_step) {
      // Forward floor for the channel between x_{level-1} and x_level.
      if (level > 0 && L[level] + x[level - 1] - v < input.l_min) continue;
      if (level == 0 && L[0] - v < input.l_min) continue;
      if (!input.opposite.empty()) {
        const Msat delta =
            level == 0 ? -v : x[level - 1] - v;  // channel `level` net change
        if (delta > input.opposite[level]) continue;
      }
      x[level] = v;
      self(self, level + 1, sum_prefix + v, obj_prefix + std::abs(v));
    }
  };
  recurse(recurse, 0, 0, 0);

  if (!found) return {PlanStatus::Infeasible, 0};
  return {PlanStatus::Feasible, best};
}

std::vector<LowBalance> needs_rebalance(const NetworkState& state,
                                        Msat l_min) {
  std::vector<LowBalance> out;
  for (const auto& [edge, ch] : state.channels) {
    if (ch.balance_a < l_min) out.push_back({edge, ch.a, ch.balance_a});
    if (ch.balance_b < l_min) out.push_back({edge, ch.b, ch.balance_b});
  }
  return out;
}

HubRebalanceInput make_hub_input(const NetworkState& state, NodeId hub,
                                 Msat l_min, Msat l_available) {
  HubRebalanceInput input;
  input.hub = hub;
  input.l_min = l_min;
  input.l_available = l_available;
  for (const auto& [edge, ch] : state.channels) {
    NodeId other;
    if (ch.a == hub) {
      other = ch.b;
    } else if (ch.b == hub) {
      other = ch.a;
    } else {
      continue;
    }
    if (state.topology.nodes[other].role != NodeRole::Client) continue;
    HubChannelLiquidity liq;
    liq.client = other;
    liq.client_msat = ch.a == hub ? ch.balance_b : ch.balance_a;
    liq.hub_msat = ch.a == hub ? ch.balance_a : ch.balance_b;
    input.channels.push_back(liq);
  }
  std::sort(input.channels.begin(), input.channels.end(),
            [](const auto& l, const auto& r) { return l.client < r.client; });
  return input;
}

CircularInput make_circular_input(const NetworkState& state,
                                  const std::vector<NodeId>& loop,
                                  Msat l_min) {
  if (loop.size() < 3) {
    throw invalid_argument_error("circular loop needs at least three nodes");
  }
  CircularInput input;
  input.loop = loop;
  input.l_min = l_min;
  const std::size_t n = loop.size();
  input.liquidity.resize(n);
  input.opposite.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const NodeId from = loop[j];
    const NodeId to = loop[(j + 1) % n];
    const Channel& ch = state.channel(from, to);
    input.liquidity[j] = ch.a == from ? ch.balance_a : ch.balance_b;
    input.opposite[j] = ch.a == from ? ch.balance_b : ch.balance_a;
  }
  return input;
}

void apply_plan(NetworkState& state, const HubRebalancePlan& plan) {
  if (plan.status != PlanStatus::Feasible) {
    throw invalid_argument_error("cannot apply an infeasible plan");
  }
  const auto& channels = plan.input.channels;
  // Verify the whole snapshot before touching anything.
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (!state.has_channel(plan.hub, channels[i].client)) {
      throw stale_plan_error("plan references a closed channel");
    }
    const Channel& ch = state.channel(plan.hub, channels[i].client);
    const Msat hub_side = ch.a == plan.hub ? ch.balance_a : ch.balance_b;
    const Msat client_side = ch.a == plan.hub ? ch.balance_b : ch.balance_a;
    if (hub_side != channels[i].hub_msat ||
        client_side != channels[i].client_msat) {
      throw stale_plan_error("channel balances changed since planning");
    }
    if (hub_side - plan.x[i] < 0 || client_side + plan.x[i] < 0) {
      throw stale_plan_error("plan would drive a balance negative");
    }
  }
  for (std::size_t i = 0; i < channels.size(); ++i) {
    Channel& ch = state.channel(plan.hub, channels[i].client);
    Msat& hub_side = ch.a == plan.hub ? ch.balance_a : ch.balance_b;
    Msat& client_side = ch.a == plan.hub ? ch.balance_b : ch.balance_a;
    hub_side -= plan.x[i];
    client_side += plan.x[i];
  }
}

void apply_plan(NetworkState& state, const CircularPlan& plan) {
  if (plan.status != PlanStatus::Feasible) {
    throw invalid_argument_error("cannot apply an infeasible plan");
  }
  const auto& loop = plan.input.loop;
  const std::size_t n = loop.size();
  const auto delta = circular_channel_deltas(plan.input, plan.x, plan.y);
  for (std::size_t j = 0; j < n; ++j) {
    const NodeId from = loop[j];
    const NodeId to = loop[(j + 1) % n];
    if (!state.has_channel(from, to)) {
      throw stale_plan_error("plan references a closed channel");
    }
    const Channel& ch = state.channel(from, to);
    const Msat upstream = ch.a == from ? ch.balance_a : ch.balance_b;
    const Msat downstream = ch.a == from ? ch.balance_b : ch.balance_a;
    if (upstream != plan.input.liquidity[j]) {
      throw stale_plan_error("channel balances changed since planning");
    }
    if (upstream + delta[j] < 0 || downstream - delta[j] < 0) {
      throw stale_plan_error("plan would drive a balance negative");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const NodeId from = loop[j];
    const NodeId to = loop[(j + 1) % n];
    Channel& ch = state.channel(from, to);
    Msat& upstream = ch.a == from ? ch.balance_a : ch.balance_b;
    Msat& downstream = ch.a == from ? ch.balance_b : ch.balance_a;
    upstream += delta[j];
    downstream -= delta[j];
  }
}

}  // namespace channelmesh
