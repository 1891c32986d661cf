#include "channelmesh/topology.hpp"

#include "doctest.h"

#include <algorithm>
#include <set>

using namespace channelmesh;

namespace {

bool edges_unique_and_normalized(const Topology& t) {
  std::set<Edge> seen;
  for (const Edge& e : t.edges) {
    if (e.first >= e.second) return false;
    if (!seen.insert(e).second) return false;
  }
  return true;
}

std::size_t count_role(const Topology& t, NodeRole role) {
  return std::count_if(t.nodes.begin(), t.nodes.end(),
                       [role](const Node& n) { return n.role == role; });
}

}  // namespace

TEST_CASE("complete graph has n(n-1)/2 edges and only client nodes") {
  for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 25u, 100u}) {
    Topology t = build_complete(n);
    CHECK(t.kind == TopologyKind::Complete);
    CHECK(t.nodes.size() == n);
    CHECK(edge_count(t) == n * (n - 1) / 2);
    CHECK(count_role(t, NodeRole::Client) == n);
    CHECK(edges_unique_and_normalized(t));
  }
  // Frozen spot values.
  CHECK(edge_count(build_complete(2)) == 1);
  CHECK(edge_count(build_complete(5)) == 10);
  CHECK(edge_count(build_complete(100)) == 4950);
  CHECK(edge_count(build_complete(1000)) == 499500);
}

TEST_CASE("star wires every client to the central hub") {
  Topology t = build_star(4);
  CHECK(t.kind == TopologyKind::Star);
  CHECK(t.nodes.size() == 5);
  CHECK(edge_count(t) == 4);
  CHECK(t.nodes[0].role == NodeRole::CentralHub);
  CHECK(count_role(t, NodeRole::Client) == 4);
  CHECK(node_degree(t, 0) == 4);
  for (NodeId c = 1; c <= 4; ++c) CHECK(node_degree(t, c) == 1);
  CHECK(edges_unique_and_normalized(t));

  // A star over n total nodes carries n-1 channels.
  CHECK(edge_count(build_star(99)) == 99);
  CHECK(edge_count(build_star(999)) == 999);
}

TEST_CASE("multi hub star chains hubs and connects every hub to every client") {
  Topology t = build_multi_hub(4, 2);
  CHECK(t.kind == TopologyKind::MultiHubStar);
  CHECK(t.nodes.size() == 6);
  // h*m client links plus h-1 chain links.
  CHECK(edge_count(t) == 2 * 4 + 1);
  CHECK(t.nodes[0].role == NodeRole::CentralHub);
  CHECK(t.nodes[0].tier == 0);
  CHECK(t.nodes[1].role == NodeRole::DormantHub);
  CHECK(t.nodes[1].tier == 1);
  CHECK(count_role(t, NodeRole::Client) == 4);
  CHECK(edges_unique_and_normalized(t));
  // Chain edge between tier 0 and tier 1.
  CHECK(std::find(t.edges.begin(), t.edges.end(), Edge{0, 1}) != t.edges.end());
}

TEST_CASE("multi hub star edge counts across sizes") {
  for (std::size_t m : {1u, 3u, 10u, 50u}) {
    for (std::size_t h : {1u, 2u, 3u, 5u}) {
      Topology t = build_multi_hub(m, h);
      CHECK(edge_count(t) == h * m + (h - 1));
      CHECK(t.nodes.size() == h + m);
      CHECK(count_role(t, NodeRole::DormantHub) == h - 1);
      CHECK(edges_unique_and_normalized(t));
      // Dormant hubs occupy ids 1..h-1 with tier == id.
      for (std::size_t i = 1; i < h; ++i) {
        CHECK(t.nodes[i].role == NodeRole::DormantHub);
        CHECK(t.nodes[i].tier == i);
      }
      // Every hub reaches every client.
      for (std::size_t hub = 0; hub < h; ++hub) {
        std::size_t links = 0;
        for (const Edge& e : t.edges) {
          if (e.first == hub && e.second >= h) ++links;
        }
        CHECK(links == m);
      }
    }
  }
  // One tier degenerates to the plain star shape.
  Topology single = build_multi_hub(6, 1);
  CHECK(edge_count(single) == 6);
  CHECK(count_role(single, NodeRole::DormantHub) == 0);
}

TEST_CASE("query cost is sum of degrees on a mesh and hub degree on a star") {
  // Mesh: every node must report each of its channels.
  CHECK(query_cost(build_complete(2)) == 2);
  CHECK(query_cost(build_complete(5)) == 20);
  CHECK(query_cost(build_complete(100)) == 9900);

  // Star: the hub alone sees every channel.
  CHECK(query_cost(build_star(1)) == 1);
  CHECK(query_cost(build_star(4)) == 4);
  CHECK(query_cost(build_star(99)) == 99);

  // Multi hub: the hubs jointly cover each channel once.
  CHECK(query_cost(build_multi_hub(4, 2)) == 9);
  CHECK(query_cost(build_multi_hub(99, 2)) == 199);

  for (std::size_t n : {2u, 10u, 31u}) {
    Topology mesh = build_complete(n);
    std::size_t degree_sum = 0;
    for (const Node& node : mesh.nodes) degree_sum += node_degree(mesh, node.id);
    CHECK(query_cost(mesh) == degree_sum);
    CHECK(query_cost(mesh) == n * (n - 1));
    CHECK(query_cost(build_star(n - 1)) == n - 1);
  }
}

TEST_CASE("builders reject empty shapes") {
  CHECK_THROWS_AS(build_complete(0), invalid_argument_error);
  CHECK_THROWS_AS(build_star(0), invalid_argument_error);
  CHECK_THROWS_AS(build_multi_hub(0, 1), invalid_argument_error);
  CHECK_THROWS_AS(build_multi_hub(4, 0), invalid_argument_error);
}

TEST_CASE("node_degree rejects unknown ids") {
  Topology t = build_star(3);
  CHECK_THROWS_AS(node_degree(t, 9), invalid_argument_error);
}
