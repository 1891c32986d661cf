#include "channelmesh/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace channelmesh {

namespace {

using nlohmann::json;

std::string role_name(NodeRole role) { return to_string(role); }

NodeRole role_from_name(const std::string& name, bool& ok) {
  ok = true;
  if (name == "client") return NodeRole::Client;
  if (name == "central_hub") return NodeRole::CentralHub;
  if (name == "dormant_hub") return NodeRole::DormantHub;
  ok = false;
  return NodeRole::Client;
}

std::string kind_name(TopologyKind kind) { return to_string(kind); }

TopologyKind kind_from_name(const std::string& name, bool& ok) {
  ok = true;
  if (name == "complete") return TopologyKind::Complete;
  if (name == "star") return TopologyKind::Star;
  if (name == "multihub") return TopologyKind::MultiHubStar;
  ok = false;
  return TopologyKind::Complete;
}

std::string channel_key(const Edge& edge) {
  return std::to_string(edge.first) + "-" + std::to_string(edge.second);
}

bool parse_channel_key(const std::string& key, Edge& edge) {
  const auto dash = key.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == key.size()) {
    return false;
  }
  try {
    const unsigned long a = std::stoul(key.substr(0, dash));
    const unsigned long b = std::stoul(key.substr(dash + 1));
    edge = {static_cast<NodeId>(a), static_cast<NodeId>(b)};
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

json policy_to_json(const FeePolicy& policy) {
  return {{"base_fee_msat", policy.base_fee_msat},
          {"fee_rate_ppm", policy.fee_rate_ppm}};
}

FeePolicy policy_from_json(const json& j) {
  FeePolicy policy;
  policy.base_fee_msat = j.value("base_fee_msat", Msat{0});
  policy.fee_rate_ppm = j.value("fee_rate_ppm", std::uint32_t{0});
  return policy;
}

// Collects issues instead of failing fast so a bad file reports every
// problem at once.
struct IssueSink {
  std::vector<ValidationIssue> issues;

  void add(std::string path, std::string message) {
    issues.push_back({std::move(path), std::move(message)});
  }

  void raise_if_any() {
    if (!issues.empty()) throw validation_error(std::move(issues));
  }
};

}  // namespace

json topology_to_json(const Topology& topology) {
  json nodes = json::array();
  for (const Node& node : topology.nodes) {
    json entry = {{"id", node.id}, {"role", role_name(node.role)}};
    if (node.role != NodeRole::Client) entry["tier"] = node.tier;
    nodes.push_back(std::move(entry));
  }
  json edges = json::array();
  for (const Edge& edge : topology.edges) {
    edges.push_back(json::array({edge.first, edge.second}));
  }
  return {{"kind", kind_name(topology.kind)},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

Topology topology_from_json(const json& j) {
  IssueSink sink;
  Topology topology;
  if (!j.is_object()) {
    sink.add("", "expected an object");
    sink.raise_if_any();
  }

  if (!j.contains("kind") || !j["kind"].is_string()) {
    sink.add("/kind", "expected a string");
  } else {
    bool ok = false;
    topology.kind = kind_from_name(j["kind"].get<std::string>(), ok);
    if (!ok) {
      sink.add("/kind", "unknown kind '" + j["kind"].get<std::string>() +
                            "', expected complete, star or multihub");
    }
  }

  std::set<NodeId> ids;
  if (!j.contains("nodes") || !j["nodes"].is_array()) {
    sink.add("/nodes", "expected an array");
  } else {
    const json& nodes = j["nodes"];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string base = "/nodes/" + std::to_string(i);
      const json& entry = nodes[i];
      if (!entry.is_object()) {
        sink.add(base, "expected an object");
        continue;
      }
      Node node;
      if (!entry.contains("id") || !entry["id"].is_number_unsigned()) {
        sink.add(base + "/id", "expected an unsigned integer");
      } else {
        node.id = entry["id"].get<NodeId>();
        if (!ids.insert(node.id).second) {
          sink.add(base + "/id", "duplicate node id");
        }
      }
      if (!entry.contains("role") || !entry["role"].is_string()) {
        sink.add(base + "/role", "expected a string");
      } else {
        bool ok = false;
        node.role = role_from_name(entry["role"].get<std::string>(), ok);
        if (!ok) sink.add(base + "/role", "unknown role");
      }
      node.tier = entry.value("tier", std::uint32_t{0});
      topology.nodes.push_back(node);
    }
  }

  if (!j.contains("edges") || !j["edges"].is_array()) {
    sink.add("/edges", "expected an array");
  } else {
    const json& edges = j["edges"];
    std::set<Edge> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string base = "/edges/" + std::to_string(i);
      const json& entry = edges[i];
      if (!entry.is_array() || entry.size() != 2 ||
          !entry[0].is_number_unsigned() || !entry[1].is_number_unsigned()) {
        sink.add(base, "expected [node, node]");
        continue;
      }
      NodeId a = entry[0].get<NodeId>();
      NodeId b = entry[1].get<NodeId>();
      if (a == b) {
        sink.add(base, "self edges are not allowed");
        continue;
      }
      if (a > b) std::swap(a, b);
      if (!ids.count(a) || !ids.count(b)) {
        sink.add(base, "edge endpoint is not a declared node");
        continue;
      }
      if (!seen.insert({a, b}).second) {
        sink.add(base, "duplicate edge");
        continue;
      }
      topology.edges.push_back({a, b});
    }
  }

  sink.raise_if_any();
  return topology;
}

json state_to_json(const NetworkState& state) {
  json channels = json::object();
  for (const auto& [edge, ch] : state.channels) {
    channels[channel_key(edge)] = {
        {"id", ch.id},
        {"balance_a", ch.balance_a},
        {"balance_b", ch.balance_b},
        {"policy_a", policy_to_json(ch.policy_a)},
        {"policy_b", policy_to_json(ch.policy_b)},
    };
  }
  return {{"topology", topology_to_json(state.topology)},
          {"channels", std::move(channels)},
          {"active_hub", state.active_hub},
          {"frozen_hubs", state.frozen_hubs},
          {"maintenance", state.maintenance},
          {"onchain_events", state.onchain_events},
          {"next_channel_id", state.next_channel_id}};
}

NetworkState state_from_json(const json& j) {
  IssueSink sink;
  if (!j.is_object()) {
    sink.add("", "expected an object");
    sink.raise_if_any();
  }
  if (!j.contains("topology")) {
    sink.add("/topology", "missing");
    sink.raise_if_any();
  }

  NetworkState state;
  try {
    state.topology = topology_from_json(j["topology"]);
  } catch (const validation_error& err) {
    for (const ValidationIssue& issue : err.issues()) {
      sink.add("/topology" + issue.path, issue.message);
    }
    sink.raise_if_any();
  }

  std::set<Edge> known(state.topology.edges.begin(),
                       state.topology.edges.end());
  if (j.contains("channels")) {
    if (!j["channels"].is_object()) {
      sink.add("/channels", "expected an object");
    } else {
      for (const auto& [key, entry] : j["channels"].items()) {
        const std::string base = "/channels/" + key;
        Edge edge;
        if (!parse_channel_key(key, edge)) {
          sink.add(base, "expected a 'low-high' node id key");
          continue;
        }
        if (edge.first >= edge.second) {
          sink.add(base, "key must order ids low-high");
          continue;
        }
        if (!known.count(edge)) {
          sink.add(base, "no such edge in the topology");
          continue;
        }
        Channel ch;
        ch.a = edge.first;
        ch.b = edge.second;
        ch.id = entry.value("id", ChannelId{0});
        ch.balance_a = entry.value("balance_a", Msat{0});
        ch.balance_b = entry.value("balance_b", Msat{0});
        if (ch.balance_a < 0) sink.add(base + "/balance_a", "negative");
        if (ch.balance_b < 0) sink.add(base + "/balance_b", "negative");
        if (entry.contains("policy_a")) {
          ch.policy_a = policy_from_json(entry["policy_a"]);
        }
        if (entry.contains("policy_b")) {
          ch.policy_b = policy_from_json(entry["policy_b"]);
        }
        state.channels[edge] = ch;
      }
    }
  }

  state.active_hub = j.value("active_hub", NodeId{0});
  bool hub_known = false;
  for (const Node& node : state.topology.nodes) {
    hub_known = hub_known || node.id == state.active_hub;
  }
  if (!hub_known) sink.add("/active_hub", "not a declared node");
  if (j.contains("frozen_hubs")) {
    state.frozen_hubs = j["frozen_hubs"].get<std::vector<NodeId>>();
  }
  state.maintenance = j.value("maintenance", false);
  state.onchain_events = j.value("onchain_events", std::uint64_t{0});
  state.next_channel_id = j.value("next_channel_id", ChannelId{1});

  sink.raise_if_any();
  return state;
}

namespace {

json transfer_entry(const Edge& edge, NodeId from, NodeId to, Msat amount) {
  return {{"channel", channel_key(edge)},
          {"from", from},
          {"to", to},
          {"amount_msat", amount}};
}

}  // namespace

json plan_to_json(const HubRebalancePlan& plan) {
  json transfers = json::array();
  for (std::size_t i = 0; i < plan.x.size(); ++i) {
    const Msat x = plan.x[i];
    if (x == 0) continue;
    const HubChannelLiquidity& ch = plan.input.channels[i];
    Edge edge{std::min(plan.hub, ch.client), std::max(plan.hub, ch.client)};
    if (x > 0) {
      transfers.push_back(transfer_entry(edge, plan.hub, ch.client, x));
    } else {
      transfers.push_back(transfer_entry(edge, ch.client, plan.hub, -x));
    }
  }
  return {{"kind", "hub"},
          {"status",
           plan.status == PlanStatus::Feasible ? "feasible" : "infeasible"},
          {"hub", plan.hub},
          {"objective_cost", plan.objective_cost},
          {"transfers", std::move(transfers)}};
}

json plan_to_json(const CircularPlan& plan) {
  json transfers = json::array();
  if (plan.status == PlanStatus::Feasible) {
    const std::vector<Msat> deltas =
        circular_channel_deltas(plan.input, plan.x, plan.y);
    const std::size_t n = plan.input.loop.size();
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      if (deltas[j] == 0) continue;
      NodeId up = plan.input.loop[j];
      NodeId down = plan.input.loop[(j + 1) % n];
      Edge edge{std::min(up, down), std::max(up, down)};
      // Positive delta replenishes the upstream side.
      if (deltas[j] > 0) {
        transfers.push_back(transfer_entry(edge, down, up, deltas[j]));
      } else {
        transfers.push_back(transfer_entry(edge, up, down, -deltas[j]));
      }
    }
  }
  return {{"kind", "circular"},
          {"status",
           plan.status == PlanStatus::Feasible ? "feasible" : "infeasible"},
          {"loop", plan.input.loop},
          {"objective_msat", plan.objective_msat},
          {"transfers", std::move(transfers)}};
}

json report_to_json(const SimReport& report) {
  json by_reason = json::object();
  for (const auto& [status, count] : report.failed_by_reason) {
    by_reason[to_string(status)] = count;
  }
  json switchovers = json::array();
  for (const SwitchoverReport& sw : report.switchovers) {
    switchovers.push_back(
        {{"failed_hub", sw.failed_hub},
         {"activated_hub", sw.activated_hub},
         {"detected_at_s", sw.detected_at},
         {"active_at_s", sw.active_at},
         {"deficit_channels", sw.deficit_channels},
         {"payments_rejected_during_window",
          sw.payments_rejected_during_window}});
  }
  return {{"scenario", report.scenario},
          {"duration_s", report.duration_s},
          {"clients", report.clients},
          {"payments_issued", report.payments_issued},
          {"payments_completed", report.payments_completed},
          {"payments_failed", report.payments_failed},
          {"failed_by_reason", std::move(by_reason)},
          {"payments_in_flight", report.payments_in_flight},
          {"total_downtime_s", report.total_downtime_s},
          {"rebalances_executed", report.rebalances_executed},
          {"switchovers", std::move(switchovers)},
          {"network_dead", report.network_dead},
          {"per_day_completed", report.per_day_completed}};
}

std::string canonical_dump(const json& j) {
  // nlohmann objects already iterate in sorted key order.
  return j.dump();
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
  return j;
}

void save_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace channelmesh
