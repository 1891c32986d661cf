#pragma once
// Channel ledger: per-side balances, fee policies, and two-hop payment
// execution through the active hub.
//
// Invariants maintained here:
//   - capacity(channel) == balance_a + balance_b at all times; off-chain
//     operations (payments, rebalances) never change it
//   - no side balance ever goes negative
//   - a failed operation leaves the state bit-identical

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "channelmesh/topology.hpp"
#include "channelmesh/types.hpp"

namespace channelmesh {

struct FeePolicy {
  Msat base_fee_msat = 0;
  // Proportional part, parts-per-million of the forwarded amount.
  std::uint32_t fee_rate_ppm = 0;

  bool operator==(const FeePolicy&) const = default;
};

// Forwarding fee for one hop: base + floor(amount * rate / 1e6).
Msat fee_for_hop(const FeePolicy& policy, Msat amount_msat);

struct Channel {
  ChannelId id = 0;
  NodeId a = 0;
  NodeId b = 0;
  Msat balance_a = 0;
  Msat balance_b = 0;
  FeePolicy policy_a;  // fees node a charges for forwards it relays
  FeePolicy policy_b;

  Msat capacity() const { return balance_a + balance_b; }
  bool operator==(const Channel&) const = default;
};

struct NetworkState {
  Topology topology;
  // Keyed by normalized (low, high) node pair; one channel per edge.
  std::map<Edge, Channel> channels;
  NodeId active_hub = 0;
  // Channels of a failed hub are frozen until repair; payments and
  // rebalances touching them fail.
  std::vector<NodeId> frozen_hubs;
  // Scheduled-maintenance flag; all payments are rejected while set.
  bool maintenance = false;
  // Opens + closes so far; settlement cost proxy.
  std::uint64_t onchain_events = 0;
  ChannelId next_channel_id = 1;

  bool operator==(const NetworkState&) const = default;

  bool has_channel(NodeId a, NodeId b) const;
  const Channel& channel(NodeId a, NodeId b) const;
  Channel& channel(NodeId a, NodeId b);
  bool is_hub_frozen(NodeId hub) const;
};

NetworkState make_network(const Topology& topology);

// Opens the channel backing an existing topology edge. Counts one
// on-chain event. Throws already_exists_error / invalid_edge_error.
Channel& open_channel(NetworkState& state, NodeId a, NodeId b,
                      Msat funding_a, Msat funding_b,
                      const FeePolicy& policy_a = {},
                      const FeePolicy& policy_b = {});

// Cooperative close; both sides settle their current balance on-chain.
// Counts one on-chain event. Throws not_found_error.
struct SettledBalances {
  NodeId a = 0;
  NodeId b = 0;
  Msat amount_a = 0;
  Msat amount_b = 0;
};
SettledBalances close_channel(NetworkState& state, NodeId a, NodeId b);

// Opens every channel of the topology with uniform funding.
void fund_uniform(NetworkState& state, Msat client_side_msat,
                  Msat hub_side_msat, const FeePolicy& hub_policy = {},
                  const FeePolicy& client_policy = {});

enum class PaymentStatus {
  Success,
  FailedFirstHop,   // sender side short on the sender->hub channel
  FailedSecondHop,  // hub side short on the hub->receiver channel
  NetworkDown,      // maintenance window or no reachable hub
};

std::string to_string(PaymentStatus status);

struct PaymentResult {
  PaymentStatus status = PaymentStatus::Success;
  Msat amount_msat = 0;
  Msat fees_paid_msat = 0;
  std::uint32_t hops = 0;
};

// Routes sender -> active hub -> receiver. The hub charges its inbound
// hop fee (its policy on the sender-hub channel); the fee is debited
// from the sender with the amount and credited to the hub's side of
// that channel. Payments with the hub as endpoint take a single hop
// and pay no fee. Either hop short of liquidity fails the payment
// atomically.
PaymentResult execute_payment(NetworkState& state, NodeId sender,
                              NodeId receiver, Msat amount_msat);

}  // namespace channelmesh
