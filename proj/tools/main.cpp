// Command-line front end; drives the benchmark through the C API only.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ixsim.h"

namespace {

struct ConfigHandle {
  ixsim_config* ptr = ixsim_config_new();
  ~ConfigHandle() { ixsim_config_free(ptr); }
};

int report(ixsim_status status) {
  if (status != IXSIM_OK) {
    std::fprintf(stderr, "error: %s\n", ixsim_last_error());
  }
  return static_cast<int>(status);
}

/// defaults <- --config file <- repeated --set key=value
ixsim_status resolve_config(ixsim_config* cfg, const std::string& config_file,
                            const std::vector<std::string>& sets) {
  if (!config_file.empty()) {
    const ixsim_status status = ixsim_config_load_file(cfg, config_file.c_str());
    if (status != IXSIM_OK) return status;
  }
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return IXSIM_ERR_CONFIG;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    const ixsim_status status = ixsim_config_set(cfg, key.c_str(), value.c_str());
    if (status != IXSIM_OK) return status;
  }
  return IXSIM_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"un-signalized cross-intersection driving benchmark"};
  app.require_subcommand(1);
  // let --config/--set appear after the subcommand name
  app.fallthrough();

  std::string config_file;
  std::vector<std::string> sets;
  app.add_option("--config", config_file, "configuration file (key = value lines)");
  app.add_option("--set", sets, "override a configuration key (key=value, repeatable)");

  // train
  auto* train = app.add_subcommand("train", "train the TD3 agent for one task");
  std::string task = "left";
  int episodes = 20000;
  uint64_t seed = 0;
  std::string out_dir = "out";
  bool quiet = false;
  train->add_option("--task", task, "left | right | straight")->required();
  train->add_option("--episodes", episodes, "training episodes");
  train->add_option("--seed", seed, "master seed");
  train->add_option("--out", out_dir, "output directory");
  train->add_flag("--quiet", quiet, "suppress progress lines");

  // eval-det
  auto* eval_det = app.add_subcommand("eval-det", "deterministic 288-cell grid benchmark");
  std::string agent = "idm";
  std::string seeds_csv = "0";
  eval_det->add_option("--agent", agent, "td3:<actor-file> | idm | aeb | random[:seed]")
      ->required();
  eval_det->add_option("--seeds", seeds_csv, "comma-separated episode seeds");
  eval_det->add_option("--out", out_dir, "output directory");

  // eval-sto
  auto* eval_sto = app.add_subcommand("eval-sto", "stochastic autopilot-traffic benchmark");
  int sto_episodes = 1000;
  eval_sto->add_option("--agent", agent, "td3:<actor-file> | idm | aeb | random[:seed]")
      ->required();
  eval_sto->add_option("--episodes", sto_episodes, "episodes per task");
  eval_sto->add_option("--seed", seed, "master seed");
  eval_sto->add_option("--out", out_dir, "output directory");

  // sample-traffic
  auto* sample = app.add_subcommand("sample-traffic", "emit OU speed and gap samples as CSV");
  std::string flow = "A";
  int draws = 10000;
  int bins = 50;
  sample->add_option("--flow", flow, "functional scenario whose flow is sampled (A-E)");
  sample->add_option("--draws", draws, "number of spawn parameter draws");
  sample->add_option("--bins", bins, "histogram bins");
  sample->add_option("--seed", seed, "sampling seed");
  sample->add_option("--out", out_dir, "output directory");

  // replay
  auto* replay = app.add_subcommand("replay", "export one episode trajectory as CSV");
  std::string scenario_id = "A";
  std::string cell = "20,30";
  std::string out_path = "replay.csv";
  replay->add_option("--scenario", scenario_id, "functional scenario (A-E)")->required();
  replay->add_option("--cell", cell, "concrete cell as V,d (km/h, m)");
  replay->add_option("--agent", agent, "agent under replay")->required();
  replay->add_option("--seed", seed, "episode seed");
  replay->add_option("--out", out_path, "output CSV path");

  // serve
  auto* serve = app.add_subcommand("serve", "newline-delimited JSON environment server");
  int port = 0;
  serve->add_option("--port", port, "TCP port (0 picks one)");

  CLI11_PARSE(app, argc, argv);

  ConfigHandle cfg;
  ixsim_status status = resolve_config(cfg.ptr, config_file, sets);
  if (status != IXSIM_OK) return report(status);

  if (*train) {
    status = ixsim_run_train(cfg.ptr, task.c_str(), episodes, seed, out_dir.c_str(), !quiet);
  } else if (*eval_det) {
    status = ixsim_run_eval_deterministic(cfg.ptr, agent.c_str(), seeds_csv.c_str(),
                                          out_dir.c_str());
  } else if (*eval_sto) {
    status = ixsim_run_eval_stochastic(cfg.ptr, agent.c_str(), sto_episodes, seed,
                                       out_dir.c_str());
  } else if (*sample) {
    status = ixsim_run_sample_traffic(cfg.ptr, flow.c_str(), draws, seed, out_dir.c_str(), bins);
  } else if (*replay) {
    const auto comma = cell.find(',');
    if (comma == std::string::npos) {
      std::fprintf(stderr, "error: --cell expects V,d\n");
      return 1;
    }
    double speed_kmh = 0.0, gap_m = 0.0;
    try {
      speed_kmh = std::stod(cell.substr(0, comma));
      gap_m = std::stod(cell.substr(comma + 1));
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --cell expects numeric V,d\n");
      return 1;
    }
    status = ixsim_run_replay(cfg.ptr, scenario_id.c_str(), speed_kmh, gap_m, agent.c_str(),
                              seed, out_path.c_str());
  } else if (*serve) {
    status = ixsim_run_serve(cfg.ptr, port);
  }
  return report(status);
}
