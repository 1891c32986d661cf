#include "channelmesh/channel_state.hpp"

#include <algorithm>

namespace channelmesh {

namespace {

Edge normalized(NodeId a, NodeId b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

bool topology_has_edge(const Topology& t, NodeId a, NodeId b) {
  const Edge e = normalized(a, b);
  return std::find(t.edges.begin(), t.edges.end(), e) != t.edges.end();
}

bool valid_node(const Topology& t, NodeId id) {
  return id < t.nodes.size() && t.nodes[id].id == id;
}

}  // namespace

Msat fee_for_hop(const FeePolicy& policy, Msat amount_msat) {
  if (amount_msat < 0) {
    throw invalid_argument_error("fee_for_hop: negative amount");
  }
  // 128-bit product: amount can be large and rate up to 1e6.
  const auto proportional = static_cast<Msat>(
      (static_cast<unsigned __int128>(amount_msat) * policy.fee_rate_ppm) /
      1000000u);
  return policy.base_fee_msat + proportional;
}

bool NetworkState::has_channel(NodeId a, NodeId b) const {
  return channels.count(normalized(a, b)) != 0;
}

const Channel& NetworkState::channel(NodeId a, NodeId b) const {
  auto it = channels.find(normalized(a, b));
  if (it == channels.end()) {
    throw not_found_error("no channel between nodes " + std::to_string(a) +
                          " and " + std::to_string(b));
  }
  return it->second;
}

Channel& NetworkState::channel(NodeId a, NodeId b) {
  return const_cast<Channel&>(
      static_cast<const NetworkState*>(this)->channel(a, b));
}

bool NetworkState::is_hub_frozen(NodeId hub) const {
  return std::find(frozen_hubs.begin(), frozen_hubs.end(), hub) !=
         frozen_hubs.end();
}

NetworkState make_network(const Topology& topology) {
  NetworkState state;
  state.topology = topology;
  state.active_hub = 0;
  return state;
}

Channel& open_channel(NetworkState& state, NodeId a, NodeId b,
                      Msat funding_a, Msat funding_b,
                      const FeePolicy& policy_a, const FeePolicy& policy_b) {
  if (a == b) {
    throw invalid_edge_error("cannot open a channel from a node to itself");
  }
  if (!valid_node(state.topology, a) || !valid_node(state.topology, b)) {
    throw invalid_edge_error("unknown node in channel endpoints");
  }
  if (!topology_has_edge(state.topology, a, b)) {
    throw invalid_edge_error("nodes " + std::to_string(a) + " and " +
                             std::to_string(b) +
                             " are not adjacent in the topology");
  }
  if (funding_a < 0 || funding_b < 0) {
    throw invalid_argument_error("channel funding must be non-negative");
  }
  const Edge key = normalized(a, b);
  if (state.channels.count(key)) {
    throw already_exists_error("channel " + std::to_string(key.first) + "-" +
                               std::to_string(key.second) + " already open");
  }
  Channel ch;
  ch.id = state.next_channel_id++;
  ch.a = key.first;
  ch.b = key.second;
  // Funding arguments follow the caller's (a, b) order.
  if (key.first == a) {
    ch.balance_a = funding_a;
    ch.balance_b = funding_b;
    ch.policy_a = policy_a;
    ch.policy_b = policy_b;
  } else {
    ch.balance_a = funding_b;
    ch.balance_b = funding_a;
    ch.policy_a = policy_b;
    ch.policy_b = policy_a;
  }
  state.onchain_events += 1;
  return state.channels.emplace(key, ch).first->second;
}

SettledBalances close_channel(NetworkState& state, NodeId a, NodeId b) {
  const Edge key = normalized(a, b);
  auto it = state.channels.find(key);
  if (it == state.channels.end()) {
    throw not_found_error("close of unknown channel " +
                          std::to_string(key.first) + "-" +
                          std::to_string(key.second));
  }
  SettledBalances settled{it->second.a, it->second.b, it->second.balance_a,
                          it->second.balance_b};
  state.channels.erase(it);
  state.onchain_events += 1;
  return settled;
}

void fund_uniform(NetworkState& state, Msat client_side_msat,
                  Msat hub_side_msat, const FeePolicy& hub_policy,
                  const FeePolicy& client_policy) {
  for (const auto& [a, b] : state.topology.edges) {
    const NodeRole role_a = state.topology.nodes[a].role;
    const NodeRole role_b = state.topology.nodes[b].role;
    const bool a_is_hub = role_a != NodeRole::Client;
    const bool b_is_hub = role_b != NodeRole::Client;
    Msat funding_a = client_side_msat;
    Msat funding_b = client_side_msat;
    FeePolicy pol_a = client_policy;
    FeePolicy pol_b = client_policy;
    if (a_is_hub) {
      funding_a = hub_side_msat;
      pol_a = hub_policy;
    }
    if (b_is_hub) {
      funding_b = hub_side_msat;
      pol_b = hub_policy;
    }
    open_channel(state, a, b, funding_a, funding_b, pol_a, pol_b);
  }
}

std::string to_string(PaymentStatus status) {
  switch (status) {
    case PaymentStatus::Success: return "success";
    case PaymentStatus::FailedFirstHop: return "failed_first_hop";
    case PaymentStatus::FailedSecondHop: return "failed_second_hop";
    case PaymentStatus::NetworkDown: return "network_down";
  }
  return "network_down";
}

PaymentResult execute_payment(NetworkState& state, NodeId sender,
                              NodeId receiver, Msat amount_msat) {
  if (sender == receiver) {
    throw invalid_argument_error("sender and receiver must differ");
  }
  if (amount_msat <= 0) {
    throw invalid_argument_error("payment amount must be positive");
  }
  if (!valid_node(state.topology, sender) ||
      !valid_node(state.topology, receiver)) {
    throw invalid_argument_error("payment endpoint is not a known node");
  }

  PaymentResult result;
  result.amount_msat = amount_msat;

  if (state.maintenance || state.is_hub_frozen(state.active_hub) ||
      state.is_hub_frozen(sender) || state.is_hub_frozen(receiver)) {
    result.status = PaymentStatus::NetworkDown;
    return result;
  }

  const NodeId hub = state.active_hub;

  // Single-hop case: the hub itself sends or receives.
  if (sender == hub || receiver == hub) {
    if (!state.has_channel(sender, receiver)) {
      result.status = PaymentStatus::NetworkDown;
      return result;
    }
    Channel& ch = state.channel(sender, receiver);
    Msat& from = ch.a == sender ? ch.balance_a : ch.balance_b;
    Msat& to = ch.a == sender ? ch.balance_b : ch.balance_a;
    if (from < amount_msat) {
      result.status = PaymentStatus::FailedFirstHop;
      return result;
    }
    from -= amount_msat;
    to += amount_msat;
    result.status = PaymentStatus::Success;
    result.hops = 1;
    return result;
  }

  if (!state.has_channel(sender, hub) || !state.has_channel(hub, receiver)) {
    result.status = PaymentStatus::NetworkDown;
    return result;
  }

  Channel& in = state.channel(sender, hub);
  Channel& out = state.channel(hub, receiver);

  // The hub prices the inbound hop with its policy on that channel.
  const FeePolicy& hub_policy = in.a == hub ? in.policy_a : in.policy_b;
  const Msat fee = fee_for_hop(hub_policy, amount_msat);

  Msat& sender_side = in.a == sender ? in.balance_a : in.balance_b;
  Msat& hub_in_side = in.a == hub ? in.balance_a : in.balance_b;
  Msat& hub_out_side = out.a == hub ? out.balance_a : out.balance_b;
  Msat& receiver_side = out.a == receiver ? out.balance_a : out.balance_b;

  // Check both hops before touching anything so failures are atomic.
  if (sender_side < amount_msat + fee) {
    result.status = PaymentStatus::FailedFirstHop;
    return result;
  }
  if (hub_out_side < amount_msat) {
    result.status = PaymentStatus::FailedSecondHop;
    return result;
  }

  sender_side -= amount_msat + fee;
  hub_in_side += amount_msat + fee;
  hub_out_side -= amount_msat;
  receiver_side += amount_msat;

  result.status = PaymentStatus::Success;
  result.fees_paid_msat = fee;
  result.hops = 2;
  return result;
}

}  // namespace channelmesh
