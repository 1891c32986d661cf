// channelmesh command line: topology construction, scenario simulation,
// rebalance planning, failover drills and topology cost comparison.
//
// Exit codes: 0 success, 2 validation failure, 3 infeasible plan,
// 4 network down (no standby left), 1 anything else.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "channelmesh/json_io.hpp"
#include "channelmesh/log.hpp"
#include "channelmesh/scenario.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNetworkDown = 4;

using channelmesh::Scenario;

void print_issues(const channelmesh::validation_error& err) {
  for (const auto& issue : err.issues()) {
    std::cerr << "invalid: " << (issue.path.empty() ? "/" : issue.path)
              << ": " << issue.message << '\n';
  }
}

Scenario load_scenario(const std::string& path, std::uint64_t seed_override,
                       bool has_seed_override) {
  Scenario scenario =
      channelmesh::parse_scenario(channelmesh::load_json_file(path));
  if (has_seed_override) scenario.sim.seed = seed_override;
  return scenario;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    channelmesh::save_text_file(out_path, content);
  }
}

int cmd_topology(const std::string& kind, std::uint32_t nodes,
                 std::uint32_t tiers, const std::string& out_path) {
  channelmesh::Topology topology;
  if (kind == "complete") {
    topology = channelmesh::build_complete(nodes);
  } else if (kind == "star") {
    topology = channelmesh::build_star(nodes);
  } else if (kind == "multihub") {
    topology = channelmesh::build_multi_hub(nodes, tiers);
  } else {
    std::cerr << "invalid: /kind: expected complete, star or multihub\n";
    return kExitValidation;
  }
  emit(out_path, channelmesh::topology_to_json(topology).dump(2) + "\n");
  std::cerr << kind << ": " << topology.nodes.size() << " nodes, "
            << channelmesh::edge_count(topology) << " channels, query cost "
            << channelmesh::query_cost(topology) << '\n';
  return 0;
}

int cmd_simulate(const Scenario& scenario, const std::string& out_dir,
                 bool stepped, const std::string& state_out) {
  channelmesh::RunOutcome outcome =
      channelmesh::run_scenario(scenario, out_dir, stepped);
  std::cout << outcome.csv;
  if (!state_out.empty()) {
    channelmesh::save_text_file(
        state_out,
        channelmesh::state_to_json(outcome.report.final_state).dump(2) +
            "\n");
  }
  return outcome.report.network_dead ? kExitNetworkDown : 0;
}

int cmd_failover_drill(const Scenario& scenario, const std::string& out_dir) {
  if (scenario.sim.failures.empty()) {
    std::cerr << "invalid: /sim/failures: drill needs at least one "
                 "failure injection\n";
    return kExitValidation;
  }
  channelmesh::RunOutcome outcome =
      channelmesh::run_scenario(scenario, out_dir, false);
  if (outcome.report.network_dead) {
    std::cerr << "network down: no standby hub remained\n";
    return kExitNetworkDown;
  }
  std::cout << outcome.csv;
  for (const auto& sw : outcome.report.switchovers) {
    std::cout << "switchover: hub " << sw.failed_hub << " -> hub "
              << sw.activated_hub << ", detected at " << sw.detected_at
              << " s, active at " << sw.active_at << " s, "
              << sw.deficit_channels << " deficit channels, "
              << sw.payments_rejected_during_window
              << " payments rejected\n";
  }
  return 0;
}

int cmd_rebalance(const std::string& state_path, const std::string& mode,
                  channelmesh::Msat l_min, channelmesh::Msat l_available,
                  const std::string& loop_arg, const std::string& out_path,
                  const std::string& state_out) {
  channelmesh::NetworkState state =
      channelmesh::state_from_json(channelmesh::load_json_file(state_path));
  nlohmann::json plan_json;
  bool feasible = false;
  if (mode == "lp") {
    channelmesh::HubRebalanceInput input = channelmesh::make_hub_input(
        state, state.active_hub, l_min, l_available);
    channelmesh::HubRebalancePlan plan =
        channelmesh::plan_hub_rebalance(input);
    feasible = plan.status == channelmesh::PlanStatus::Feasible;
    plan_json = channelmesh::plan_to_json(plan);
    if (feasible && !state_out.empty()) {
      channelmesh::apply_plan(state, plan);
    }
  } else if (mode == "circular") {
    std::vector<channelmesh::NodeId> loop;
    std::stringstream ss(loop_arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        loop.push_back(static_cast<channelmesh::NodeId>(std::stoul(item)));
      } catch (const std::exception&) {
        std::cerr << "invalid: /loop: expected comma-separated node ids\n";
        return kExitValidation;
      }
    }
    channelmesh::CircularInput input =
        channelmesh::make_circular_input(state, loop, l_min);
    channelmesh::CircularPlan plan =
        channelmesh::plan_circular_rebalance(input);
    feasible = plan.status == channelmesh::PlanStatus::Feasible;
    plan_json = channelmesh::plan_to_json(plan);
    if (feasible && !state_out.empty()) {
      channelmesh::apply_plan(state, plan);
    }
  } else {
    std::cerr << "invalid: /mode: expected lp or circular\n";
    return kExitValidation;
  }
  emit(out_path, plan_json.dump(2) + "\n");
  if (!feasible) {
    std::cerr << "no feasible rebalance plan under the given floors\n";
    return kExitInfeasible;
  }
  if (!state_out.empty()) {
    channelmesh::save_text_file(
        state_out, channelmesh::state_to_json(state).dump(2) + "\n");
  }
  return 0;
}

int cmd_run(const std::string& scenario_dir, const std::string& out_dir,
            unsigned parallel, std::uint64_t seed_override,
            bool has_seed_override) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(scenario_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    std::cerr << "invalid: no scenario files in " << scenario_dir << '\n';
    return kExitValidation;
  }

  std::vector<Scenario> scenarios;
  for (const std::string& path : paths) {
    try {
      scenarios.push_back(
          load_scenario(path, seed_override, has_seed_override));
    } catch (const channelmesh::validation_error& err) {
      std::cerr << "in " << path << ":\n";
      print_issues(err);
      return kExitValidation;
    }
  }

  std::vector<channelmesh::SimReport> reports(scenarios.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> network_down{false};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scenarios.size()) return;
      try {
        channelmesh::RunOutcome outcome =
            channelmesh::run_scenario(scenarios[i], out_dir, false);
        if (outcome.report.network_dead) network_down = true;
        reports[i] = std::move(outcome.report);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) {
          first_error = scenarios[i].name + ": " + ex.what();
        }
      }
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(parallel, scenarios.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  if (!first_error.empty()) {
    std::cerr << "run failed: " << first_error << '\n';
    return 1;
  }

  const std::string csv = channelmesh::reports_to_csv(reports);
  std::cout << csv;
  if (!out_dir.empty()) {
    channelmesh::save_text_file(out_dir + "/run_summary.csv", csv);
  }
  return network_down ? kExitNetworkDown : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed payment network modeling toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed_override = 0;
  bool has_seed = false;
  app.add_flag_callback("--version", [] {
    std::cout << "channelmesh " << channelmesh::kToolVersion << '\n';
    std::exit(0);
  });

  // topology
  auto* topo = app.add_subcommand("topology", "build and cost a topology");
  std::string topo_kind = "star";
  std::uint32_t topo_nodes = 0;
  std::uint32_t topo_tiers = 2;
  std::string topo_out;
  topo->add_option("--kind", topo_kind, "complete, star or multihub");
  topo->add_option("--clients", topo_nodes, "client count (node count for "
                                            "complete)")
      ->required();
  topo->add_option("--tiers", topo_tiers, "hub tiers for multihub");
  topo->add_option("--out", topo_out, "write JSON here instead of stdout");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one scenario file");
  std::string sim_scenario;
  std::string sim_out_dir;
  std::string sim_state_out;
  bool sim_stepped = false;
  sim->add_option("--scenario", sim_scenario, "scenario JSON file")
      ->required();
  sim->add_option("--out-dir", sim_out_dir, "directory for csv/report/"
                                            "manifest outputs");
  sim->add_option("--state-out", sim_state_out, "write final network state");
  sim->add_flag("--stepped", sim_stepped,
                "use the event-per-payment engine");
  sim->add_option("--seed", seed_override, "override the scenario seed")
      ->each([&has_seed](const std::string&) { has_seed = true; });

  // rebalance
  auto* reb = app.add_subcommand("rebalance", "plan liquidity movements");
  std::string reb_state;
  std::string reb_mode = "lp";
  std::string reb_loop;
  std::string reb_out;
  std::string reb_state_out;
  channelmesh::Msat reb_l_min = 0;
  channelmesh::Msat reb_l_available = 0;
  reb->add_option("--state", reb_state, "network state JSON file")
      ->required();
  reb->add_option("--mode", reb_mode, "lp or circular");
  reb->add_option("--l-min", reb_l_min, "per-side liquidity floor (msat)");
  reb->add_option("--l-available", reb_l_available,
                  "hub budget for lp mode (msat)");
  reb->add_option("--loop", reb_loop,
                  "comma-separated node loop for circular mode");
  reb->add_option("--out", reb_out, "write the plan here instead of stdout");
  reb->add_option("--state-out", reb_state_out,
                  "apply the plan and write the resulting state");

  // failover-drill
  auto* drill = app.add_subcommand("failover-drill",
                                   "run a scenario with hub failures");
  std::string drill_scenario;
  std::string drill_out_dir;
  drill->add_option("--scenario", drill_scenario, "scenario JSON file")
      ->required();
  drill->add_option("--out-dir", drill_out_dir, "output directory");
  drill->add_option("--seed", seed_override, "override the scenario seed")
      ->each([&has_seed](const std::string&) { has_seed = true; });

  // compare
  auto* cmp = app.add_subcommand("compare",
                                 "edge and probe cost table by size");
  std::uint32_t cmp_min = 2;
  std::uint32_t cmp_max = 101;
  std::string cmp_out;
  cmp->add_option("--min-nodes", cmp_min, "smallest total node count");
  cmp->add_option("--max-nodes", cmp_max, "largest total node count");
  cmp->add_option("--out", cmp_out, "write CSV here instead of stdout");

  // run
  auto* run = app.add_subcommand("run", "run every scenario in a directory");
  std::string run_dir;
  std::string run_out_dir;
  unsigned run_parallel = 1;
  run->add_option("--scenarios", run_dir, "directory of scenario files")
      ->required();
  run->add_option("--out-dir", run_out_dir, "output directory");
  run->add_option("--parallel", run_parallel, "worker threads");
  run->add_option("--seed", seed_override, "override every scenario seed")
      ->each([&has_seed](const std::string&) { has_seed = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (topo->parsed()) {
      return cmd_topology(topo_kind, topo_nodes, topo_tiers, topo_out);
    }
    if (sim->parsed()) {
      return cmd_simulate(load_scenario(sim_scenario, seed_override, has_seed),
                          sim_out_dir, sim_stepped, sim_state_out);
    }
    if (reb->parsed()) {
      return cmd_rebalance(reb_state, reb_mode, reb_l_min, reb_l_available,
                           reb_loop, reb_out, reb_state_out);
    }
    if (drill->parsed()) {
      return cmd_failover_drill(
          load_scenario(drill_scenario, seed_override, has_seed),
          drill_out_dir);
    }
    if (cmp->parsed()) {
      emit(cmp_out, channelmesh::compare_topologies_csv(cmp_min, cmp_max));
      return 0;
    }
    if (run->parsed()) {
      return cmd_run(run_dir, run_out_dir, run_parallel, seed_override,
                     has_seed);
    }
  } catch (const channelmesh::validation_error& err) {
    print_issues(err);
    return kExitValidation;
  } catch (const channelmesh::no_standby_error& err) {
    std::cerr << "network down: " << err.what() << '\n';
    return kExitNetworkDown;
  } catch (const channelmesh::invalid_argument_error& err) {
    std::cerr << "invalid: " << err.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
