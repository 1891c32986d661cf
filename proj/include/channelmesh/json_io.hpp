#pragma once
// JSON (de)serialization for topologies, network states, rebalance
// plans and simulation reports.
//
// Wire shapes:
//   topology  {"kind","nodes":[{"id","role"(,"tier")}],"edges":[[a,b]]}
//   state     {"topology",...,"channels":{"a-b":{...}},"active_hub",...}
//   plan      {"status","objective",...,"transfers":[{"channel":"a-b",
//              "from","to","amount_msat"}]}
// Channel keys use the normalized "low-high" node id form.

#include <string>

#include "json.hpp"

#include "channelmesh/channel_state.hpp"
#include "channelmesh/failover.hpp"
#include "channelmesh/rebalance.hpp"
#include "channelmesh/sim.hpp"
#include "channelmesh/topology.hpp"

namespace channelmesh {

nlohmann::json topology_to_json(const Topology& topology);
// Throws validation_error listing every problem by JSON pointer.
Topology topology_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const NetworkState& state);
NetworkState state_from_json(const nlohmann::json& j);

nlohmann::json plan_to_json(const HubRebalancePlan& plan);
nlohmann::json plan_to_json(const CircularPlan& plan);

nlohmann::json report_to_json(const SimReport& report);

// Stable byte form used for hashing: sorted keys, no whitespace.
std::string canonical_dump(const nlohmann::json& j);

// Small file helpers; errors surface as std::runtime_error.
nlohmann::json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& content);

}  // namespace channelmesh
