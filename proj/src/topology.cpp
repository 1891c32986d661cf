#include "channelmesh/topology.hpp"

#include <algorithm>

namespace channelmesh {

std::string to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Client: return "client";
    case NodeRole::CentralHub: return "central_hub";
    case NodeRole::DormantHub: return "dormant_hub";
  }
  return "client";
}

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Complete: return "complete";
    case TopologyKind::Star: return "star";
    case TopologyKind::MultiHubStar: return "multihub";
  }
  return "star";
}

validation_error::validation_error(std::vector<ValidationIssue> issues)
    : std::runtime_error(render(issues)), issues_(std::move(issues)) {}

std::string validation_error::render(const std::vector<ValidationIssue>& issues) {
  std::string out = "validation failed:";
  for (const auto& issue : issues) {
    out += "\n  " + issue.path + ": " + issue.message;
  }
  return out;
}

Topology build_complete(std::size_t n) {
  if (n < 1) {
    throw invalid_argument_error("complete topology needs at least 1 node");
  }
  Topology t;
  t.kind = TopologyKind::Complete;
  t.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.nodes.push_back({static_cast<NodeId>(i), NodeRole::Client, 0});
  }
  t.edges.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      t.edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    }
  }
  return t;
}

Topology build_star(std::size_t clients) {
  if (clients < 1) {
    throw invalid_argument_error("star topology needs at least 1 client");
  }
  Topology t;
  t.kind = TopologyKind::Star;
  t.nodes.reserve(clients + 1);
  t.nodes.push_back({0, NodeRole::CentralHub, 0});
  for (std::size_t i = 1; i <= clients; ++i) {
    t.nodes.push_back({static_cast<NodeId>(i), NodeRole::Client, 0});
  }
  t.edges.reserve(clients);
  for (std::size_t i = 1; i <= clients; ++i) {
    t.edges.emplace_back(0, static_cast<NodeId>(i));
  }
  return t;
}

Topology build_multi_hub(std::size_t clients, std::size_t hub_tiers) {
  if (clients < 1) {
    throw invalid_argument_error("multi-hub topology needs at least 1 client");
  }
  if (hub_tiers < 1) {
    throw invalid_argument_error("multi-hub topology needs at least 1 hub");
  }
  Topology t;
  t.kind = TopologyKind::MultiHubStar;
  t.nodes.reserve(hub_tiers + clients);
  t.nodes.push_back({0, NodeRole::CentralHub, 0});
  for (std::size_t h = 1; h < hub_tiers; ++h) {
    t.nodes.push_back({static_cast<NodeId>(h), NodeRole::DormantHub,
                       static_cast<std::uint32_t>(h)});
  }
  for (std::size_t c = 0; c < clients; ++c) {
    t.nodes.push_back(
        {static_cast<NodeId>(hub_tiers + c), NodeRole::Client, 0});
  }
  t.edges.reserve(hub_tiers * clients + hub_tiers - 1);
  // Hub chain: tier k holds a channel to tier k+1 for mirror traffic.
  for (std::size_t h = 0; h + 1 < hub_tiers; ++h) {
    t.edges.emplace_back(static_cast<NodeId>(h), static_cast<NodeId>(h + 1));
  }
  for (std::size_t h = 0; h < hub_tiers; ++h) {
    for (std::size_t c = 0; c < clients; ++c) {
      t.edges.emplace_back(static_cast<NodeId>(h),
                           static_cast<NodeId>(hub_tiers + c));
    }
  }
  return t;
}

std::size_t edge_count(const Topology& t) { return t.edges.size(); }

std::size_t node_degree(const Topology& t, NodeId id) {
  if (id >= t.nodes.size()) {
    throw invalid_argument_error("degree query for unknown node " +
                                 std::to_string(id));
  }
  std::size_t d = 0;
  for (const auto& [a, b] : t.edges) {
    if (a == id || b == id) ++d;
  }
  return d;
}

std::size_t query_cost(const Topology& t) {
  switch (t.kind) {
    case TopologyKind::Complete:
      // Every node answers for each of its channels: sum of degrees,
      // which counts each edge from both ends.
      return 2 * t.edges.size();
    case TopologyKind::Star:
      // The hub alone sees every channel.
      return node_degree(t, 0);
    case TopologyKind::MultiHubStar:
      // Each channel touches at least one hub; hubs report each of
      // their channels once, and hub-hub channels are reported by the
      // lower-tier end.
      return t.edges.size();
  }
  return 0;
}

}  // namespace channelmesh
