#pragma once
// Hub health tracking and dormant-hub switchover.
//
// A hub is considered failed once the time since its last heartbeat
// strictly exceeds failure_timeout_s. Failed is absorbing: further
// heartbeats are ignored until an explicit repair. Switchover hands the
// active role to the lowest-tier dormant hub that is still healthy,
// freezes the failed hub's channels, and never moves balances.

#include <map>
#include <vector>

#include "channelmesh/channel_state.hpp"
#include "channelmesh/types.hpp"

namespace channelmesh {

enum class HubStatus {
  Healthy,
  Suspect,  // switchover pending: failure detected, standby not active yet
  Failed,
};

std::string to_string(HubStatus status);

struct HubHealth {
  NodeId hub = 0;
  double last_heartbeat_s = 0.0;
  HubStatus status = HubStatus::Healthy;

  bool operator==(const HubHealth&) const = default;
};

using HealthMap = std::map<NodeId, HubHealth>;

struct FailoverPolicy {
  double heartbeat_interval_s = 10.0;
  double failure_timeout_s = 30.0;
  double activation_delay_s = 5.0;
  // Fraction of the reference hub's per-channel balance a standby must
  // mirror to count as ready.
  double mirror_ratio = 1.0;
  // Extra activation delay per under-mirrored standby channel, covering
  // one on-chain replenishment round trip each.
  double replenish_delay_s = 600.0;
};

// Thrown when a switchover is required but every standby has failed.
class no_standby_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Records a heartbeat at time t. Ignored while Failed; throws
// invalid_time_error if t precedes the last recorded heartbeat.
void record_heartbeat(HubHealth& health, double t);

// Pure status query at time t: Failed status sticks, otherwise Failed
// iff t - last_heartbeat > failure_timeout_s (strictly).
HubStatus evaluate(const HubHealth& health, double t,
                   const FailoverPolicy& policy);

// evaluate() plus commit of a Failed verdict into the health record.
HubStatus check_and_update(HubHealth& health, double t,
                           const FailoverPolicy& policy);

// Marks a hub failed immediately (fault injection).
void force_fail(HubHealth& health);

// Clears the failed state and unfreezes the hub's channels.
void repair(NetworkState& state, HubHealth& health, double t);

struct ReadinessDeficit {
  NodeId client = 0;
  Msat standby_msat = 0;
  Msat target_msat = 0;
  Msat deficit_msat = 0;
};

struct ReadinessReport {
  NodeId standby = 0;
  NodeId reference = 0;
  std::vector<ReadinessDeficit> deficits;
};

// Compares the standby hub's side of each client channel against
// mirror_ratio times the reference hub's side of its channel to the
// same client. Channels at or above target are omitted.
ReadinessReport readiness_check(const NetworkState& state, NodeId standby,
                                NodeId reference,
                                const FailoverPolicy& policy);

struct SwitchoverReport {
  NodeId failed_hub = 0;
  NodeId activated_hub = 0;
  double detected_at = 0.0;
  double active_at = 0.0;
  // Standby channels under the mirror target at switchover time.
  std::size_t deficit_channels = 0;
  // Filled by the simulator: payments rejected between the failure
  // instant and standby activation.
  std::int64_t payments_rejected_during_window = 0;
};

// Hands the active role to the lowest-tier healthy dormant hub.
// Requires the currently active hub to be Failed in `health`. Balances
// are untouched; the failed hub's channels freeze. Throws
// no_standby_error when no healthy standby exists.
SwitchoverReport trigger_switchover(NetworkState& state,
                                    const HealthMap& health,
                                    const FailoverPolicy& policy,
                                    double detected_at);

}  // namespace channelmesh
