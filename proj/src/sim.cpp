#include "channelmesh/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

namespace channelmesh {

namespace {

constexpr std::int64_t kDayMs = 86'400'000;

std::int64_t to_ms(double seconds) {
  return std::llround(seconds * 1000.0);
}

double to_seconds(std::int64_t ms) {
  return static_cast<double>(ms) / 1000.0;
}

// Unbiased draw in [0, n) via rejection; stable across platforms.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t cutoff = max - max % n;
  for (;;) {
    std::uint64_t v = rng();
    if (v < cutoff) return v % n;
  }
}

// Client visit order plus the pair covered by a given attempt index.
// Any m*(m-1) consecutive attempts hit every ordered pair once.
struct Workload {
  std::vector<NodeId> order;
  std::uint64_t cycle = 0;  // m * (m - 1)

  Workload(const SimConfig& config) {
    const std::uint64_t m = config.clients;
    order.resize(m);
    for (std::uint64_t i = 0; i < m; ++i) {
      order[i] = static_cast<NodeId>(config.hub_tiers + i);
    }
    std::mt19937_64 rng(config.seed + 1);
    for (std::uint64_t i = m - 1; i > 0; --i) {
      std::swap(order[i], order[bounded(rng, i + 1)]);
    }
    cycle = m * (m - 1);
  }

  std::pair<NodeId, NodeId> pair_for(std::uint64_t attempt) const {
    const std::uint64_t m = order.size();
    const std::uint64_t p = attempt % cycle;
    const std::uint64_t i = p / (m - 1);
    const std::uint64_t j = (i + 1 + p % (m - 1)) % m;
    return {order[i], order[j]};
  }
};

void ensure_valid(const SimConfig& config) {
  auto issues = validate(config);
  if (!issues.empty()) throw validation_error(std::move(issues));
}

// Everything both engines share: the network, the counters, the
// maintenance calendar arithmetic and the attempt bookkeeping.
struct Driver {
  const SimConfig& cfg;
  NetworkState state;
  HealthMap health;
  Workload workload;
  SimReport rep;

  std::int64_t dur_ms;
  std::int64_t svc_ms;
  std::int64_t interval_ms;
  std::int64_t window_ms;

  std::uint64_t attempt_n = 0;
  bool hub_down = false;       // failed active hub, standby not live yet
  std::int64_t rejected_pending = 0;
  bool switchover_open = false;

  explicit Driver(const SimConfig& config)
      : cfg(config),
        state(build_sim_network(config)),
        workload(config),
        dur_ms(to_ms(config.duration_s)),
        svc_ms(to_ms(config.payment_service_time_s)),
        interval_ms(to_ms(config.rebalance_interval_s)),
        window_ms(to_ms(config.rebalance_downtime_s)) {
    rep.duration_s = config.duration_s;
    rep.clients = config.clients;
    rep.per_day_completed.assign((dur_ms + kDayMs - 1) / kDayMs, 0);
    for (const Node& node : state.topology.nodes) {
      if (node.role != NodeRole::Client) {
        health[node.id] = HubHealth{node.id, 0.0, HubStatus::Healthy};
      }
    }
  }

  void note_completion(std::int64_t at_ms) {
    ++rep.payments_completed;
    auto day = static_cast<std::size_t>((at_ms - 1) / kDayMs);
    if (day < rep.per_day_completed.size()) ++rep.per_day_completed[day];
  }

  // Completions land at first_ms + i * svc_ms for i in [1, count].
  void note_completion_series(std::int64_t first_ms, std::int64_t count) {
    if (count <= 0) return;
    rep.payments_completed += count;
    std::int64_t seen = 0;
    std::int64_t day = (first_ms + svc_ms - 1) / kDayMs;
    while (seen < count) {
      const std::int64_t day_end = (day + 1) * kDayMs;
      std::int64_t upto = (day_end - first_ms) / svc_ms;
      upto = std::min(upto, count);
      if (static_cast<std::size_t>(day) < rep.per_day_completed.size()) {
        rep.per_day_completed[day] += upto - seen;
      }
      seen = upto;
      ++day;
    }
  }

  void note_failure(PaymentStatus status, std::int64_t count = 1) {
    rep.payments_failed += count;
    rep.failed_by_reason[status] += count;
    if (status == PaymentStatus::NetworkDown) rejected_pending += count;
  }

  // Runs one attempt's balance effect. Completion is counted by the
  // caller once the service interval has elapsed.
  PaymentStatus attempt_once() {
    auto [sender, receiver] = workload.pair_for(attempt_n);
    ++attempt_n;
    ++rep.payments_issued;
    if (hub_down) {
      note_failure(PaymentStatus::NetworkDown);
      return PaymentStatus::NetworkDown;
    }
    PaymentResult res =
        execute_payment(state, sender, receiver, cfg.payment_amount_msat);
    if (res.status != PaymentStatus::Success) note_failure(res.status);
    return res.status;
  }

  // Next maintenance window start strictly after t.
  std::int64_t next_window_start(std::int64_t t) const {
    return (t / interval_ms + 1) * interval_ms;
  }

  // Wall-clock completion of a service interval starting at t, with
  // the clock paused inside maintenance windows.
  std::int64_t completion_time(std::int64_t start_ms) const {
    std::int64_t end = start_ms + svc_ms;
    std::int64_t ws = next_window_start(start_ms);
    while (ws < end) {
      end += window_ms;
      ws += interval_ms;
    }
    return end;
  }

  void freeze_hub(NodeId hub) {
    if (!state.is_hub_frozen(hub)) state.frozen_hubs.push_back(hub);
  }

  NodeId hub_for_tier(std::uint32_t tier) const {
    for (const Node& node : state.topology.nodes) {
      if (node.role != NodeRole::Client && node.tier == tier) return node.id;
    }
    throw invalid_argument_error("no hub with tier " + std::to_string(tier));
  }

  void inject_failure(std::uint32_t tier, double at_s, bool& was_active) {
    NodeId hub = hub_for_tier(tier);
    force_fail(health.at(hub));
    freeze_hub(hub);
    was_active = hub == state.active_hub;
    if (was_active) {
      hub_down = true;
      rejected_pending = 0;
      (void)at_s;
    }
  }

  // Detection fires once the heartbeat gap strictly exceeds the
  // timeout, i.e. at last_heartbeat + timeout on a continuous monitor.
  std::int64_t detection_time_ms(NodeId hub) const {
    std::int64_t last_ms = to_ms(health.at(hub).last_heartbeat_s);
    return last_ms + to_ms(cfg.failover.failure_timeout_s);
  }

  // Returns the activation instant, or -1 when no standby remains.
  std::int64_t run_detection(std::int64_t at_ms) {
    try {
      SwitchoverReport sw =
          trigger_switchover(state, health, cfg.failover, to_seconds(at_ms));
      rep.switchovers.push_back(sw);
      switchover_open = true;
      return to_ms(sw.active_at);
    } catch (const no_standby_error&) {
      rep.network_dead = true;
      return -1;
    }
  }

  void finish_activation() {
    hub_down = false;
    if (switchover_open) {
      rep.switchovers.back().payments_rejected_during_window =
          rejected_pending;
      switchover_open = false;
    }
    rejected_pending = 0;
  }

  void run_window_rebalance() {
    ++rep.rebalances_executed;
    if (cfg.rebalance_l_min_msat <= 0) return;
    if (hub_down || state.is_hub_frozen(state.active_hub)) return;
    auto low = needs_rebalance(state, cfg.rebalance_l_min_msat);
    if (low.empty()) return;
    if (cfg.rebalance_mode == RebalanceMode::Lp) {
      HubRebalanceInput input =
          make_hub_input(state, state.active_hub, cfg.rebalance_l_min_msat,
                         cfg.rebalance_l_available_msat);
      HubRebalancePlan plan = plan_hub_rebalance(input);
      if (plan.status == PlanStatus::Feasible) apply_plan(state, plan);
      return;
    }
    // Circular mode: push liquidity around active hub -> standby ->
    // client so the client's outbound side (the closing leg) refills.
    NodeId client = 0;
    Msat worst = std::numeric_limits<Msat>::max();
    for (const LowBalance& entry : low) {
      bool is_client = entry.node >= cfg.hub_tiers;
      if (is_client && entry.balance < worst) {
        worst = entry.balance;
        client = entry.node;
      }
    }
    if (worst == std::numeric_limits<Msat>::max()) return;
    NodeId standby = 0;
    bool found = false;
    for (const Node& node : state.topology.nodes) {
      if (node.role == NodeRole::DormantHub && node.id != state.active_hub &&
          !state.is_hub_frozen(node.id)) {
        standby = node.id;
        found = true;
        break;
      }
    }
    if (!found) return;
    CircularInput input = make_circular_input(
        state, {state.active_hub, standby, client}, cfg.rebalance_l_min_msat);
    CircularPlan plan = plan_circular_rebalance(input);
    if (plan.status == PlanStatus::Feasible) apply_plan(state, plan);
  }

  void finalize(bool pending_success) {
    if (pending_success) rep.payments_in_flight = 1;
  }
};

// ---- closed-form engine ----------------------------------------------

// Fee the hub collects from one payment sent by the client on this
// channel (charged on the inbound hop).
Msat channel_hop_fee(const Channel& ch, NodeId hub, Msat amount) {
  const FeePolicy& policy = ch.a == hub ? ch.policy_a : ch.policy_b;
  return fee_for_hop(policy, amount);
}

struct EpochPlan {
  bool ok = false;
  std::int64_t max_epochs = 0;
};

// A full pair-cycle leaves every channel at its starting amount level
// and only moves fees hubward. Safe to apply algebraically while every
// side keeps a comfortable margin over the worst mid-cycle excursion.
EpochPlan epoch_headroom(const Driver& d) {
  const std::uint64_t m = d.cfg.clients;
  const Msat amount = d.cfg.payment_amount_msat;
  EpochPlan plan;
  plan.max_epochs = std::numeric_limits<std::int64_t>::max();
  for (const auto& [edge, ch] : d.state.channels) {
    if (edge.first != d.state.active_hub && edge.second != d.state.active_hub)
      continue;
    NodeId other = edge.first == d.state.active_hub ? edge.second : edge.first;
    bool other_is_client = false;
    for (const Node& node : d.state.topology.nodes) {
      if (node.id == other) {
        other_is_client = node.role == NodeRole::Client;
        break;
      }
    }
    if (!other_is_client) continue;
    const Msat fee = channel_hop_fee(ch, d.state.active_hub, amount);
    const Msat hub_side =
        ch.a == d.state.active_hub ? ch.balance_a : ch.balance_b;
    const Msat client_side =
        ch.a == d.state.active_hub ? ch.balance_b : ch.balance_a;
    const Msat need_client = 2 * static_cast<Msat>(m) * (amount + fee);
    const Msat need_hub = 2 * static_cast<Msat>(m) * amount;
    if (client_side < need_client || hub_side < need_hub) return plan;
    const Msat drain = static_cast<Msat>(m - 1) * fee;
    if (drain > 0) {
      plan.max_epochs =
          std::min(plan.max_epochs, (client_side - need_client) / drain);
    }
  }
  plan.ok = plan.max_epochs > 0;
  return plan;
}

void apply_epochs(Driver& d, std::int64_t epochs) {
  const std::uint64_t m = d.cfg.clients;
  const Msat amount = d.cfg.payment_amount_msat;
  for (auto& [edge, ch] : d.state.channels) {
    if (edge.first != d.state.active_hub && edge.second != d.state.active_hub)
      continue;
    NodeId other = edge.first == d.state.active_hub ? edge.second : edge.first;
    bool other_is_client = false;
    for (const Node& node : d.state.topology.nodes) {
      if (node.id == other) {
        other_is_client = node.role == NodeRole::Client;
        break;
      }
    }
    if (!other_is_client) continue;
    const Msat fee = channel_hop_fee(ch, d.state.active_hub, amount);
    const Msat shift = epochs * static_cast<Msat>(m - 1) * fee;
    if (ch.a == d.state.active_hub) {
      ch.balance_a += shift;
      ch.balance_b -= shift;
    } else {
      ch.balance_b += shift;
      ch.balance_a -= shift;
    }
  }
  const std::int64_t count =
      epochs * static_cast<std::int64_t>(d.workload.cycle);
  d.attempt_n += static_cast<std::uint64_t>(count);
  d.rep.payments_issued += count;
}

struct Analytic {
  Driver d;
  std::int64_t cursor = 0;
  std::int64_t next_start = 0;  // next attempt start / pending completion
  bool pending = false;
  bool pending_success = false;

  explicit Analytic(const SimConfig& config) : d(config) {}

  // Runs saturation over [a, b) under the current regime.
  void advance(std::int64_t a, std::int64_t b) {
    if (b <= a) return;
    if (d.state.maintenance) {
      // Clock paused: everything scheduled shifts by the pause.
      next_start += b - a;
      return;
    }
    if (pending && next_start <= b) {
      if (pending_success) d.note_completion(next_start);
      pending = false;
    }
    if (next_start >= b) return;
    const std::int64_t s0 = next_start;
    const std::int64_t total = (b - s0 + d.svc_ms - 1) / d.svc_ms;
    const std::int64_t full = (b - s0) / d.svc_ms;

    if (d.hub_down) {
      d.rep.payments_issued += total;
      d.note_failure(PaymentStatus::NetworkDown, total);
      d.attempt_n += static_cast<std::uint64_t>(total);
    } else {
      std::int64_t done = 0;
      std::int64_t next_headroom_check = 0;
      while (done < total) {
        const std::int64_t full_left = full - done;
        const auto cycle = static_cast<std::int64_t>(d.workload.cycle);
        if (full_left >= cycle && done >= next_headroom_check) {
          EpochPlan head = epoch_headroom(d);
          if (head.ok) {
            std::int64_t q = std::min(full_left / cycle, head.max_epochs);
            apply_epochs(d, q);
            d.note_completion_series(s0 + done * d.svc_ms, q * cycle);
            done += q * cycle;
            continue;
          }
          // Tight liquidity: fall back to stepping for one whole cycle.
          next_headroom_check = done + cycle;
        }
        PaymentStatus status = d.attempt_once();
        if (done < full) {
          if (status == PaymentStatus::Success) {
            d.note_completion(s0 + (done + 1) * d.svc_ms);
          }
        } else {
          pending = true;
          pending_success = status == PaymentStatus::Success;
        }
        ++done;
      }
    }
    if (total > full && !pending) {
      // Bulk-failed partial slot: nothing to complete, clock still runs.
      pending = true;
      pending_success = false;
    }
    next_start = s0 + total * d.svc_ms;
  }

  SimReport run() {
    EventQueue q;
    for (std::int64_t ws = 0; ws < d.dur_ms; ws += d.interval_ms) {
      q.push(ws, EventKind::RebalanceStart);
      q.push(ws + d.window_ms, EventKind::RebalanceEnd);
    }
    for (std::size_t i = 0; i < d.cfg.failures.size(); ++i) {
      q.push(to_ms(d.cfg.failures[i].at_s), EventKind::Failure,
             static_cast<std::uint32_t>(i));
    }
    while (!q.empty()) {
      Event ev = q.pop();
      if (ev.at_ms >= d.dur_ms) break;
      advance(cursor, ev.at_ms);
      cursor = ev.at_ms;
      switch (ev.kind) {
        case EventKind::RebalanceStart: {
          d.rep.total_downtime_s +=
              to_seconds(std::min(d.window_ms, d.dur_ms - ev.at_ms));
          d.run_window_rebalance();
          d.state.maintenance = true;
          break;
        }
        case EventKind::RebalanceEnd:
          d.state.maintenance = false;
          break;
        case EventKind::Failure: {
          const FailureInjection& inj = d.cfg.failures[ev.subject];
          bool was_active = false;
          d.inject_failure(inj.hub_tier, inj.at_s, was_active);
          if (was_active) {
            // The monitor notices when the heartbeat gap lapses.
            NodeId failed = d.hub_for_tier(inj.hub_tier);
            std::int64_t last_ms = (ev.at_ms / to_ms(
                d.cfg.failover.heartbeat_interval_s)) *
                to_ms(d.cfg.failover.heartbeat_interval_s);
            if (last_ms >= ev.at_ms) {
              last_ms -= to_ms(d.cfg.failover.heartbeat_interval_s);
            }
            if (last_ms < 0) last_ms = 0;
            d.health.at(failed).last_heartbeat_s = to_seconds(last_ms);
            q.push(d.detection_time_ms(failed), EventKind::SwitchoverDetect);
          }
          break;
        }
        case EventKind::SwitchoverDetect: {
          std::int64_t active_at = d.run_detection(ev.at_ms);
          if (active_at >= 0) {
            q.push(active_at, EventKind::SwitchoverActivate);
          }
          break;
        }
        case EventKind::SwitchoverActivate: {
          if (d.health.at(d.state.active_hub).status == HubStatus::Failed) {
            q.push(ev.at_ms, EventKind::SwitchoverDetect);
          } else {
            d.finish_activation();
          }
          break;
        }
        default:
          break;
      }
    }
    advance(cursor, d.dur_ms);
    cursor = d.dur_ms;
    if (d.switchover_open) {
      d.rep.switchovers.back().payments_rejected_during_window =
          d.rejected_pending;
      d.switchover_open = false;
    }
    d.finalize(pending && pending_success);
    d.rep.final_state = std::move(d.state);
    return std::move(d.rep);
  }
};

// ---- event-stepped engine --------------------------------------------

struct Stepped {
  Driver d;
  EventQueue q;
  bool pending = false;
  bool pending_success = false;
  std::int64_t cur_window_start = 0;
  std::int64_t cur_window_end = 0;

  explicit Stepped(const SimConfig& config) : d(config) {}

  SimReport run() {
    const std::int64_t hb_ms = to_ms(d.cfg.failover.heartbeat_interval_s);
    q.push(0, EventKind::RebalanceStart);
    for (const auto& [hub, health] : d.health) {
      q.push(0, EventKind::Heartbeat, hub);
    }
    for (std::size_t i = 0; i < d.cfg.failures.size(); ++i) {
      q.push(to_ms(d.cfg.failures[i].at_s), EventKind::Failure,
             static_cast<std::uint32_t>(i));
    }
    q.push(0, EventKind::PaymentReady);

    while (!q.empty()) {
      Event ev = q.pop();
      switch (ev.kind) {
        case EventKind::RebalanceStart: {
          if (ev.at_ms >= d.dur_ms) break;
          d.rep.total_downtime_s +=
              to_seconds(std::min(d.window_ms, d.dur_ms - ev.at_ms));
          d.run_window_rebalance();
          d.state.maintenance = true;
          cur_window_start = ev.at_ms;
          cur_window_end = ev.at_ms + d.window_ms;
          q.push(cur_window_end, EventKind::RebalanceEnd);
          if (ev.at_ms + d.interval_ms < d.dur_ms) {
            q.push(ev.at_ms + d.interval_ms, EventKind::RebalanceStart);
          }
          break;
        }
        case EventKind::RebalanceEnd:
          d.state.maintenance = false;
          break;
        case EventKind::Heartbeat: {
          if (ev.at_ms >= d.dur_ms) break;
          record_heartbeat(d.health.at(ev.subject), to_seconds(ev.at_ms));
          q.push(ev.at_ms + hb_ms, EventKind::Heartbeat, ev.subject);
          break;
        }
        case EventKind::Failure: {
          if (ev.at_ms >= d.dur_ms) break;
          const FailureInjection& inj = d.cfg.failures[ev.subject];
          bool was_active = false;
          d.inject_failure(inj.hub_tier, inj.at_s, was_active);
          if (was_active) {
            NodeId failed = d.hub_for_tier(inj.hub_tier);
            q.push(d.detection_time_ms(failed), EventKind::SwitchoverDetect);
          }
          break;
        }
        case EventKind::SwitchoverDetect: {
          if (ev.at_ms >= d.dur_ms) break;
          std::int64_t active_at = d.run_detection(ev.at_ms);
          if (active_at >= 0) {
            q.push(active_at, EventKind::SwitchoverActivate);
          }
          break;
        }
        case EventKind::SwitchoverActivate: {
          if (ev.at_ms >= d.dur_ms) break;
          if (d.health.at(d.state.active_hub).status == HubStatus::Failed) {
            q.push(ev.at_ms, EventKind::SwitchoverDetect);
          } else {
            d.finish_activation();
          }
          break;
        }
        case EventKind::PaymentReady:
          on_payment_ready(ev.at_ms);
          break;
      }
    }
    if (d.switchover_open) {
      d.rep.switchovers.back().payments_rejected_during_window =
          d.rejected_pending;
      d.switchover_open = false;
    }
    d.finalize(pending && pending_success);
    d.rep.final_state = std::move(d.state);
    return std::move(d.rep);
  }

  void on_payment_ready(std::int64_t at_ms) {
    // The ready instant is the previous attempt's completion.
    if (pending && at_ms <= d.dur_ms) {
      if (pending_success) d.note_completion(at_ms);
      pending = false;
    }
    if (at_ms >= d.dur_ms) return;
    if (d.state.maintenance) {
      // Defer: the in-window portion of the clock replays after it.
      q.push(cur_window_end + (at_ms - cur_window_start),
             EventKind::PaymentReady);
      return;
    }
    PaymentStatus status = d.attempt_once();
    pending = true;
    pending_success = status == PaymentStatus::Success;
    q.push(d.completion_time(at_ms), EventKind::PaymentReady);
  }
};

bool in_maintenance(const SimConfig& cfg, std::int64_t at_ms,
                    std::int64_t interval_ms, std::int64_t window_ms) {
  (void)cfg;
  return at_ms % interval_ms < window_ms;
}

}  // namespace

void EventQueue::push(std::int64_t at_ms, EventKind kind,
                      std::uint32_t subject) {
  heap_.push(Event{at_ms, kind, next_seq_++, subject});
}

Event EventQueue::pop() {
  Event top = heap_.top();
  heap_.pop();
  return top;
}

std::vector<ValidationIssue> validate(const SimConfig& config) {
  std::vector<ValidationIssue> issues;
  auto bad = [&issues](std::string path, std::string message) {
    issues.push_back({std::move(path), std::move(message)});
  };
  if (!(config.duration_s > 0)) {
    bad("/duration_s", "must be positive");
  }
  if (config.clients < 2) {
    bad("/clients", "needs at least two clients");
  }
  if (config.hub_tiers < 1) {
    bad("/hub_tiers", "needs at least one hub");
  }
  if (!(config.payment_service_time_s > 0)) {
    bad("/payment_service_time_s", "must be positive");
  }
  if (config.tx_processing_time_s < 0) {
    bad("/tx_processing_time_s", "must not be negative");
  }
  if (config.payment_amount_msat <= 0) {
    bad("/payment_amount_msat", "must be positive");
  }
  if (!(config.rebalance_interval_s > 0)) {
    bad("/rebalance_interval_s", "must be positive");
  } else if (config.rebalance_downtime_s < 0 ||
             config.rebalance_downtime_s >= config.rebalance_interval_s) {
    bad("/rebalance_downtime_s", "must lie in [0, rebalance_interval_s)");
  }
  if (config.rebalance_l_min_msat < 0) {
    bad("/rebalance_l_min_msat", "must not be negative");
  }
  if (config.rebalance_l_available_msat < 0) {
    bad("/rebalance_l_available_msat", "must not be negative");
  }
  if (config.funding_client_msat < 0) {
    bad("/funding_client_msat", "must not be negative");
  }
  if (config.funding_hub_msat < 0) {
    bad("/funding_hub_msat", "must not be negative");
  }
  if (config.hub_fee.base_fee_msat < 0) {
    bad("/hub_fee/base_fee_msat", "must not be negative");
  }
  if (!(config.failover.heartbeat_interval_s > 0)) {
    bad("/failover/heartbeat_interval_s", "must be positive");
  }
  if (!(config.failover.failure_timeout_s > 0)) {
    bad("/failover/failure_timeout_s", "must be positive");
  }
  if (config.failover.activation_delay_s < 0) {
    bad("/failover/activation_delay_s", "must not be negative");
  }
  if (config.failover.mirror_ratio < 0) {
    bad("/failover/mirror_ratio", "must not be negative");
  }
  if (config.failover.replenish_delay_s < 0) {
    bad("/failover/replenish_delay_s", "must not be negative");
  }
  for (std::size_t i = 0; i < config.failures.size(); ++i) {
    const FailureInjection& inj = config.failures[i];
    const std::string base = "/failures/" + std::to_string(i);
    if (inj.at_s < 0 || inj.at_s >= config.duration_s) {
      bad(base + "/at_s", "must lie inside [0, duration_s)");
    }
    if (inj.hub_tier >= config.hub_tiers) {
      bad(base + "/hub_tier", "no hub with this tier");
    }
  }
  return issues;
}

NetworkState build_sim_network(const SimConfig& config) {
  Topology topo = config.hub_tiers == 1
                      ? build_star(config.clients)
                      : build_multi_hub(config.clients, config.hub_tiers);
  NetworkState state = make_network(topo);
  fund_uniform(state, config.funding_client_msat, config.funding_hub_msat,
               config.hub_fee, FeePolicy{});
  return state;
}

SimReport run_simulation(const SimConfig& config) {
  ensure_valid(config);
  Analytic engine(config);
  return engine.run();
}

SimReport run_simulation_stepped(const SimConfig& config) {
  ensure_valid(config);
  Stepped engine(config);
  return engine.run();
}

SimReport workload_replay(NetworkState& state, const SimConfig& config,
                          const std::vector<TraceEntry>& trace) {
  ensure_valid(config);
  std::vector<ValidationIssue> issues;
  double prev = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceEntry& entry = trace[i];
    const std::string base = "/trace/" + std::to_string(i);
    if (entry.at_s < prev) {
      issues.push_back({base + "/at_s", "times must not decrease"});
    }
    prev = std::max(prev, entry.at_s);
    if (entry.sender == entry.receiver) {
      issues.push_back({base + "/receiver", "sender equals receiver"});
    }
    if (entry.amount_msat <= 0) {
      issues.push_back({base + "/amount_msat", "must be positive"});
    }
    bool sender_known = false;
    bool receiver_known = false;
    for (const Node& node : state.topology.nodes) {
      sender_known = sender_known || node.id == entry.sender;
      receiver_known = receiver_known || node.id == entry.receiver;
    }
    if (!sender_known) issues.push_back({base + "/sender", "unknown node"});
    if (!receiver_known) {
      issues.push_back({base + "/receiver", "unknown node"});
    }
  }
  if (!issues.empty()) throw validation_error(std::move(issues));

  const std::int64_t interval_ms = to_ms(config.rebalance_interval_s);
  const std::int64_t window_ms = to_ms(config.rebalance_downtime_s);
  SimReport rep;
  rep.duration_s = config.duration_s;
  rep.clients = config.clients;
  const bool was_maintenance = state.maintenance;
  for (const TraceEntry& entry : trace) {
    state.maintenance =
        in_maintenance(config, to_ms(entry.at_s), interval_ms, window_ms);
    PaymentResult res = execute_payment(state, entry.sender, entry.receiver,
                                        entry.amount_msat);
    ++rep.payments_issued;
    if (res.status == PaymentStatus::Success) {
      ++rep.payments_completed;
    } else {
      ++rep.payments_failed;
      ++rep.failed_by_reason[res.status];
    }
  }
  state.maintenance = was_maintenance;
  return rep;
}

namespace {

std::string format_seconds(double v) {
  if (v == std::floor(v) && std::abs(v) < 9e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string reports_to_csv(const std::vector<SimReport>& reports) {
  std::ostringstream out;
  out << "scenario,duration_s,clients,payments_completed,payments_failed,"
         "downtime_s,rebalances,switchovers\n";
  for (const SimReport& rep : reports) {
    out << rep.scenario << ',' << format_seconds(rep.duration_s) << ','
        << rep.clients << ',' << rep.payments_completed << ','
        << rep.payments_failed << ',' << format_seconds(rep.total_downtime_s)
        << ',' << rep.rebalances_executed << ',' << rep.switchovers.size()
        << '\n';
  }
  return out.str();
}

}  // namespace channelmesh
