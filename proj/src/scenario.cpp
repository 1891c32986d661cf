#include "channelmesh/scenario.hpp"

#include <chrono>
#include <filesystem>
#include <sstream>

#include "channelmesh/hashing.hpp"
#include "channelmesh/json_io.hpp"
#include "channelmesh/log.hpp"

namespace channelmesh {

namespace {

using nlohmann::json;

struct FieldReader {
  const json& j;
  std::vector<ValidationIssue>& issues;
  std::string prefix;

  bool has(const char* key) const { return j.contains(key); }

  template <typename T>
  void number(const char* key, T& out) {
    if (!j.contains(key)) return;
    const json& v = j[key];
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) {
        issues.push_back({prefix + "/" + key, "expected a number"});
        return;
      }
    } else {
      if (!v.is_number_integer() && !v.is_number_unsigned()) {
        issues.push_back({prefix + "/" + key, "expected an integer"});
        return;
      }
    }
    out = v.get<T>();
  }
};

RebalanceMode mode_from_name(const std::string& name, bool& ok) {
  ok = true;
  if (name == "lp") return RebalanceMode::Lp;
  if (name == "circular") return RebalanceMode::Circular;
  ok = false;
  return RebalanceMode::Lp;
}

const char* mode_name(RebalanceMode mode) {
  return mode == RebalanceMode::Lp ? "lp" : "circular";
}

}  // namespace

Scenario parse_scenario(const json& j) {
  std::vector<ValidationIssue> issues;
  Scenario scenario;
  if (!j.is_object()) {
    issues.push_back({"", "expected an object"});
    throw validation_error(std::move(issues));
  }
  if (!j.contains("name") || !j["name"].is_string() ||
      j["name"].get<std::string>().empty()) {
    issues.push_back({"/name", "expected a non-empty string"});
  } else {
    scenario.name = j["name"].get<std::string>();
  }
  if (!j.contains("sim") || !j["sim"].is_object()) {
    issues.push_back({"/sim", "expected an object"});
    throw validation_error(std::move(issues));
  }

  const json& sim = j["sim"];
  SimConfig& cfg = scenario.sim;
  FieldReader read{sim, issues, "/sim"};
  read.number("duration_s", cfg.duration_s);
  read.number("clients", cfg.clients);
  read.number("hub_tiers", cfg.hub_tiers);
  read.number("tx_processing_time_s", cfg.tx_processing_time_s);
  read.number("payment_service_time_s", cfg.payment_service_time_s);
  read.number("payment_amount_msat", cfg.payment_amount_msat);
  read.number("rebalance_interval_s", cfg.rebalance_interval_s);
  read.number("rebalance_downtime_s", cfg.rebalance_downtime_s);
  read.number("rebalance_l_min_msat", cfg.rebalance_l_min_msat);
  read.number("rebalance_l_available_msat", cfg.rebalance_l_available_msat);
  read.number("funding_client_msat", cfg.funding_client_msat);
  read.number("funding_hub_msat", cfg.funding_hub_msat);
  read.number("seed", cfg.seed);

  if (sim.contains("rebalance_mode")) {
    if (!sim["rebalance_mode"].is_string()) {
      issues.push_back({"/sim/rebalance_mode", "expected a string"});
    } else {
      bool ok = false;
      cfg.rebalance_mode =
          mode_from_name(sim["rebalance_mode"].get<std::string>(), ok);
      if (!ok) {
        issues.push_back(
            {"/sim/rebalance_mode", "expected 'lp' or 'circular'"});
      }
    }
  }

  if (sim.contains("hub_fee")) {
    if (!sim["hub_fee"].is_object()) {
      issues.push_back({"/sim/hub_fee", "expected an object"});
    } else {
      FieldReader fee{sim["hub_fee"], issues, "/sim/hub_fee"};
      fee.number("base_fee_msat", cfg.hub_fee.base_fee_msat);
      fee.number("fee_rate_ppm", cfg.hub_fee.fee_rate_ppm);
    }
  }

  if (sim.contains("failover")) {
    if (!sim["failover"].is_object()) {
      issues.push_back({"/sim/failover", "expected an object"});
    } else {
      FieldReader fo{sim["failover"], issues, "/sim/failover"};
      fo.number("heartbeat_interval_s", cfg.failover.heartbeat_interval_s);
      fo.number("failure_timeout_s", cfg.failover.failure_timeout_s);
      fo.number("activation_delay_s", cfg.failover.activation_delay_s);
      fo.number("mirror_ratio", cfg.failover.mirror_ratio);
      fo.number("replenish_delay_s", cfg.failover.replenish_delay_s);
    }
  }

  if (sim.contains("failures")) {
    if (!sim["failures"].is_array()) {
      issues.push_back({"/sim/failures", "expected an array"});
    } else {
      const json& failures = sim["failures"];
      for (std::size_t i = 0; i < failures.size(); ++i) {
        const std::string base = "/sim/failures/" + std::to_string(i);
        if (!failures[i].is_object()) {
          issues.push_back({base, "expected an object"});
          continue;
        }
        FailureInjection inj;
        FieldReader f{failures[i], issues, base};
        f.number("at_s", inj.at_s);
        f.number("hub_tier", inj.hub_tier);
        cfg.failures.push_back(inj);
      }
    }
  }

  // Semantic checks only once the shapes parsed.
  if (issues.empty()) {
    for (ValidationIssue issue : validate(cfg)) {
      issues.push_back({"/sim" + issue.path, issue.message});
    }
  }
  if (!issues.empty()) throw validation_error(std::move(issues));
  return scenario;
}

json scenario_to_json(const Scenario& scenario) {
  const SimConfig& cfg = scenario.sim;
  json failures = json::array();
  for (const FailureInjection& inj : cfg.failures) {
    failures.push_back({{"at_s", inj.at_s}, {"hub_tier", inj.hub_tier}});
  }
  json sim = {
      {"duration_s", cfg.duration_s},
      {"clients", cfg.clients},
      {"hub_tiers", cfg.hub_tiers},
      {"tx_processing_time_s", cfg.tx_processing_time_s},
      {"payment_service_time_s", cfg.payment_service_time_s},
      {"payment_amount_msat", cfg.payment_amount_msat},
      {"rebalance_interval_s", cfg.rebalance_interval_s},
      {"rebalance_downtime_s", cfg.rebalance_downtime_s},
      {"rebalance_mode", mode_name(cfg.rebalance_mode)},
      {"rebalance_l_min_msat", cfg.rebalance_l_min_msat},
      {"rebalance_l_available_msat", cfg.rebalance_l_available_msat},
      {"funding_client_msat", cfg.funding_client_msat},
      {"funding_hub_msat", cfg.funding_hub_msat},
      {"hub_fee",
       {{"base_fee_msat", cfg.hub_fee.base_fee_msat},
        {"fee_rate_ppm", cfg.hub_fee.fee_rate_ppm}}},
      {"seed", cfg.seed},
      {"failures", std::move(failures)},
      {"failover",
       {{"heartbeat_interval_s", cfg.failover.heartbeat_interval_s},
        {"failure_timeout_s", cfg.failover.failure_timeout_s},
        {"activation_delay_s", cfg.failover.activation_delay_s},
        {"mirror_ratio", cfg.failover.mirror_ratio},
        {"replenish_delay_s", cfg.failover.replenish_delay_s}}},
  };
  return {{"name", scenario.name}, {"sim", std::move(sim)}};
}

std::string config_hash(const Scenario& scenario) {
  return sha256_hex(canonical_dump(scenario_to_json(scenario)));
}

json manifest_to_json(const RunManifest& manifest) {
  json outputs = json::object();
  for (const auto& [kind, path] : manifest.outputs) {
    outputs[kind] = path;
  }
  return {{"tool_version", manifest.tool_version},
          {"scenario", manifest.scenario},
          {"seed", manifest.seed},
          {"config_hash", manifest.config_hash},
          {"generated_at_unix_s", manifest.generated_at_unix_s},
          {"outputs", std::move(outputs)}};
}

RunOutcome run_scenario(const Scenario& scenario, const std::string& out_dir,
                        bool stepped) {
  log_info("running scenario " + scenario.name);
  RunOutcome outcome;
  outcome.report = stepped ? run_simulation_stepped(scenario.sim)
                           : run_simulation(scenario.sim);
  outcome.report.scenario = scenario.name;
  outcome.csv = reports_to_csv({outcome.report});

  RunManifest& manifest = outcome.manifest;
  manifest.tool_version = kToolVersion;
  manifest.scenario = scenario.name;
  manifest.seed = scenario.sim.seed;
  manifest.config_hash = config_hash(scenario);
  manifest.generated_at_unix_s =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir + "/" + scenario.name;
    manifest.outputs = {{"csv", scenario.name + ".csv"},
                        {"report", scenario.name + ".report.json"},
                        {"manifest", scenario.name + ".manifest.json"}};
    save_text_file(base + ".csv", outcome.csv);
    save_text_file(base + ".report.json",
                   report_to_json(outcome.report).dump(2) + "\n");
    save_text_file(base + ".manifest.json",
                   manifest_to_json(manifest).dump(2) + "\n");
  }
  log_info("scenario " + scenario.name + " done: " +
           std::to_string(outcome.report.payments_completed) + " completed");
  return outcome;
}

std::string compare_topologies_csv(std::uint32_t min_nodes,
                                   std::uint32_t max_nodes) {
  if (min_nodes < 2 || max_nodes < min_nodes) {
    throw invalid_argument_error("node range must satisfy 2 <= min <= max");
  }
  std::ostringstream out;
  out << "nodes,complete_edges,star_edges,multihub2_edges,"
         "complete_query_cost,star_query_cost\n";
  for (std::uint32_t n = min_nodes; n <= max_nodes; ++n) {
    const Topology complete = build_complete(n);
    const Topology star = build_star(n - 1);
    const Topology multihub = build_multi_hub(n - 1, 2);
    out << n << ',' << edge_count(complete) << ',' << edge_count(star) << ','
        << edge_count(multihub) << ',' << query_cost(complete) << ','
        << query_cost(star) << '\n';
  }
  return out.str();
}

}  // namespace channelmesh
