#pragma once
// Deterministic discrete-event throughput simulation.
//
// Traffic model: saturation. Payment attempts run back to back, each
// occupying payment_service_time_s of network uptime; senders cycle
// round-robin through a seed-shuffled client order and each sender
// block visits every counterparty once, so any m*(m-1) consecutive
// attempts cover every ordered client pair exactly once.
//
// Maintenance: a rebalance window of rebalance_downtime_s opens at
// every multiple of rebalance_interval_s from t = 0. The service clock
// pauses inside windows (in-flight service resumes after), so with
// ample liquidity and no failures
//
//   completed == floor((duration_s - total_downtime_s) / service_time)
//
// holds exactly. Saturation attempts are deferred around windows, never
// failed by them; replayed traces timed inside a window do fail.
//
// Failures: an injected hub failure freezes the hub immediately.
// Attempts from the failure until standby activation are rejected as
// NetworkDown. Detection happens when the missed-heartbeat timeout
// strictly lapses; activation follows after the policy delay plus the
// per-deficit-channel replenishment surcharge.
//
// Two interchangeable engines: run_simulation() fast-forwards through
// saturated uptime in closed form (whole pair-cycles apply their net
// balance effect algebraically); run_simulation_stepped() pushes every
// attempt through the event queue one by one. Both produce identical
// reports for identical configs.

#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "channelmesh/channel_state.hpp"
#include "channelmesh/failover.hpp"
#include "channelmesh/rebalance.hpp"
#include "channelmesh/types.hpp"

namespace channelmesh {

struct FailureInjection {
  double at_s = 0.0;
  std::uint32_t hub_tier = 0;  // 0 = central hub, 1 = first standby, ...
};

enum class RebalanceMode {
  Lp,        // hub-centric planner over all client channels
  Circular,  // one loop through the most deficient client and a standby
};

struct SimConfig {
  double duration_s = 0.0;
  std::uint32_t clients = 0;
  std::uint32_t hub_tiers = 1;  // 1 = plain star, no standby

  double tx_processing_time_s = 0.3;
  double payment_service_time_s = 1.0;
  Msat payment_amount_msat = 100000;

  double rebalance_interval_s = 86400.0;
  double rebalance_downtime_s = 3600.0;
  RebalanceMode rebalance_mode = RebalanceMode::Lp;
  // 0 disables live rebalancing inside maintenance windows.
  Msat rebalance_l_min_msat = 0;
  Msat rebalance_l_available_msat = 0;

  Msat funding_client_msat = 0;
  Msat funding_hub_msat = 0;
  FeePolicy hub_fee;

  std::uint64_t seed = 42;
  std::vector<FailureInjection> failures;
  FailoverPolicy failover;
};

// Structural problems with a config, reported with JSON-pointer paths
// relative to the sim object.
std::vector<ValidationIssue> validate(const SimConfig& config);

struct SimReport {
  std::string scenario;
  double duration_s = 0.0;
  std::uint32_t clients = 0;
  std::int64_t payments_issued = 0;
  std::int64_t payments_completed = 0;
  std::int64_t payments_failed = 0;
  std::map<PaymentStatus, std::int64_t> failed_by_reason;
  std::int64_t payments_in_flight = 0;
  double total_downtime_s = 0.0;
  std::int64_t rebalances_executed = 0;
  std::vector<SwitchoverReport> switchovers;
  // True when every standby was exhausted and the run ended dark.
  bool network_dead = false;
  std::vector<std::int64_t> per_day_completed;  // day = 86400 s
  NetworkState final_state;
};

// Event machinery for the stepped engine; exposed for direct testing.
enum class EventKind : std::uint8_t {
  Failure = 0,
  Heartbeat = 1,
  RebalanceStart = 2,
  RebalanceEnd = 3,
  SwitchoverDetect = 4,
  SwitchoverActivate = 5,
  PaymentReady = 6,
};

struct Event {
  std::int64_t at_ms = 0;
  EventKind kind = EventKind::PaymentReady;
  std::uint64_t seq = 0;  // assigned on push; breaks remaining ties
  std::uint32_t subject = 0;

  // Earliest time first; equal times ordered by kind, then push order.
  bool after(const Event& other) const {
    if (at_ms != other.at_ms) return at_ms > other.at_ms;
    if (kind != other.kind) return kind > other.kind;
    return seq > other.seq;
  }
};

class EventQueue {
public:
  void push(std::int64_t at_ms, EventKind kind, std::uint32_t subject = 0);
  Event pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

private:
  struct Order {
    bool operator()(const Event& l, const Event& r) const {
      return l.after(r);
    }
  };
  std::priority_queue<Event, std::vector<Event>, Order> heap_;
  std::uint64_t next_seq_ = 0;
};

// Closed-form fast-forward engine.
SimReport run_simulation(const SimConfig& config);

// Event-per-attempt engine; same observable behavior.
SimReport run_simulation_stepped(const SimConfig& config);

struct TraceEntry {
  double at_s = 0.0;
  NodeId sender = 0;
  NodeId receiver = 0;
  Msat amount_msat = 0;
};

// Executes exactly the given trace against the state, honoring the
// config's maintenance calendar. Trace times must be non-decreasing and
// endpoints known, else validation_error.
SimReport workload_replay(NetworkState& state, const SimConfig& config,
                          const std::vector<TraceEntry>& trace);

// Builds the funded initial network for a config.
NetworkState build_sim_network(const SimConfig& config);

// One CSV row per report under the fixed header
// scenario,duration_s,clients,payments_completed,payments_failed,
// downtime_s,rebalances,switchovers.
std::string reports_to_csv(const std::vector<SimReport>& reports);

}  // namespace channelmesh
