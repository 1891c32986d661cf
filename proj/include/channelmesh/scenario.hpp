#pragma once
// Config-driven runs: parse a scenario file, execute it, emit the CSV
// row, the full JSON report and a manifest that pins tool version,
// seed and config digest so reruns are verifiable.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "channelmesh/sim.hpp"

namespace channelmesh {

inline constexpr const char* kToolVersion = "0.1.0";

struct Scenario {
  std::string name;
  SimConfig sim;
};

// Throws validation_error with JSON-pointer paths; collects every
// problem in one pass.
Scenario parse_scenario(const nlohmann::json& j);

nlohmann::json scenario_to_json(const Scenario& scenario);

// Digest of the canonical config serialization. Two runs with equal
// effective configs (file plus overrides) share this hash.
std::string config_hash(const Scenario& scenario);

struct RunManifest {
  std::string tool_version;
  std::string scenario;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::int64_t generated_at_unix_s = 0;
  // Output basenames keyed by kind (csv, report, manifest).
  std::vector<std::pair<std::string, std::string>> outputs;
};

nlohmann::json manifest_to_json(const RunManifest& manifest);

struct RunOutcome {
  SimReport report;
  RunManifest manifest;
  std::string csv;
};

// Runs one scenario and, when out_dir is non-empty, writes
// <name>.csv, <name>.report.json and <name>.manifest.json there.
RunOutcome run_scenario(const Scenario& scenario, const std::string& out_dir,
                        bool stepped = false);

// Edge and probe-cost table over total network size, one row per size,
// built from real constructions:
//   nodes,complete_edges,star_edges,multihub2_edges,
//   complete_query_cost,star_query_cost
std::string compare_topologies_csv(std::uint32_t min_nodes,
                                   std::uint32_t max_nodes);

}  // namespace channelmesh
