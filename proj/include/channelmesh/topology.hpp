#pragma once
// Network graph construction and query-cost accounting.
//
// Three shapes are supported:
//   Complete      every node pairs with every other node; no hubs
//   Star          one central hub, every other node is a client
//   MultiHubStar  h hubs (central + h-1 dormant standbys, chained),
//                 every hub holds a channel to every client
//
// Node 0 is always the central hub in star-like shapes; dormant hubs
// occupy ids 1..h-1 ordered by tier, clients follow.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "channelmesh/types.hpp"

namespace channelmesh {

struct Node {
  NodeId id = 0;
  NodeRole role = NodeRole::Client;
  // Standby order for dormant hubs: 1 is the first fallback. 0 otherwise.
  std::uint32_t tier = 0;

  bool operator==(const Node&) const = default;
};

// Undirected edge; normalized so a < b.
using Edge = std::pair<NodeId, NodeId>;

struct Topology {
  TopologyKind kind = TopologyKind::Star;
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  bool operator==(const Topology&) const = default;
};

// Fully connected mesh over n client nodes. n >= 1.
Topology build_complete(std::size_t n);

// Central hub plus `clients` client nodes. clients >= 1.
Topology build_star(std::size_t clients);

// `hub_tiers` hubs (>= 1) and `clients` clients (>= 1). Every hub is
// connected to every client and consecutive hub tiers are chained.
Topology build_multi_hub(std::size_t clients, std::size_t hub_tiers);

std::size_t edge_count(const Topology& t);

std::size_t node_degree(const Topology& t, NodeId id);

// Channel-state probes a liquidity facilitator must issue to see the
// whole network: every node reports each channel it participates in,
// so a mesh costs sum-of-degrees while a star is answered by the hub
// alone. For multi-hub stars the hubs jointly cover every channel.
std::size_t query_cost(const Topology& t);

}  // namespace channelmesh
