#include "channelmesh/failover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace channelmesh {

std::string to_string(HubStatus status) {
  switch (status) {
    case HubStatus::Healthy: return "healthy";
    case HubStatus::Suspect: return "suspect";
    case HubStatus::Failed: return "failed";
  }
  return "failed";
}

void record_heartbeat(HubHealth& health, double t) {
  if (health.status == HubStatus::Failed) {
    return;  // absorbing until repair
  }
  if (t < health.last_heartbeat_s) {
    throw invalid_time_error("heartbeat time went backwards");
  }
  health.last_heartbeat_s = t;
  health.status = HubStatus::Healthy;
}

HubStatus evaluate(const HubHealth& health, double t,
                   const FailoverPolicy& policy) {
  if (health.status == HubStatus::Failed) {
    return HubStatus::Failed;
  }
  if (t - health.last_heartbeat_s > policy.failure_timeout_s) {
    return HubStatus::Failed;
  }
  return health.status == HubStatus::Suspect ? HubStatus::Suspect
                                             : HubStatus::Healthy;
}

HubStatus check_and_update(HubHealth& health, double t,
                           const FailoverPolicy& policy) {
  const HubStatus status = evaluate(health, t, policy);
  if (status == HubStatus::Failed) {
    health.status = HubStatus::Failed;
  }
  return status;
}

void force_fail(HubHealth& health) { health.status = HubStatus::Failed; }

void repair(NetworkState& state, HubHealth& health, double t) {
  health.status = HubStatus::Healthy;
  health.last_heartbeat_s = t;
  state.frozen_hubs.erase(
      std::remove(state.frozen_hubs.begin(), state.frozen_hubs.end(),
                  health.hub),
      state.frozen_hubs.end());
}

ReadinessReport readiness_check(const NetworkState& state, NodeId standby,
                                NodeId reference,
                                const FailoverPolicy& policy) {
  ReadinessReport report;
  report.standby = standby;
  report.reference = reference;
  for (const auto& node : state.topology.nodes) {
    if (node.role != NodeRole::Client) continue;
    if (!state.has_channel(reference, node.id) ||
        !state.has_channel(standby, node.id)) {
      continue;
    }
    const Channel& ref = state.channel(reference, node.id);
    const Channel& own = state.channel(standby, node.id);
    const Msat ref_side = ref.a == reference ? ref.balance_a : ref.balance_b;
    const Msat own_side = own.a == standby ? own.balance_a : own.balance_b;
    const Msat target = static_cast<Msat>(
        std::floor(policy.mirror_ratio * static_cast<double>(ref_side)));
    if (own_side < target) {
      report.deficits.push_back({node.id, own_side, target, target - own_side});
    }
  }
  return report;
}

SwitchoverReport trigger_switchover(NetworkState& state,
                                    const HealthMap& health,
                                    const FailoverPolicy& policy,
                                    double detected_at) {
  const NodeId failed = state.active_hub;
  const auto it = health.find(failed);
  if (it == health.end() || it->second.status != HubStatus::Failed) {
    throw invalid_argument_error(
        "switchover requires the active hub to be failed");
  }

  // Lowest-tier dormant hub that has not itself failed.
  const Node* candidate = nullptr;
  for (const auto& node : state.topology.nodes) {
    if (node.role != NodeRole::DormantHub) continue;
    if (node.id == failed) continue;
    const auto hit = health.find(node.id);
    if (hit != health.end() && hit->second.status == HubStatus::Failed) {
      continue;
    }
    if (candidate == nullptr || node.tier < candidate->tier) {
      candidate = &node;
    }
  }
  if (candidate == nullptr) {
    throw no_standby_error("no healthy standby hub available");
  }

  if (!state.is_hub_frozen(failed)) {
    state.frozen_hubs.push_back(failed);
  }
  state.active_hub = candidate->id;

  const ReadinessReport readiness =
      readiness_check(state, candidate->id, failed, policy);

  SwitchoverReport report;
  report.failed_hub = failed;
  report.activated_hub = candidate->id;
  report.detected_at = detected_at;
  report.deficit_channels = readiness.deficits.size();
  report.active_at = detected_at + policy.activation_delay_s +
                     policy.replenish_delay_s *
                         static_cast<double>(readiness.deficits.size());
  return report;
}

}  // namespace channelmesh
