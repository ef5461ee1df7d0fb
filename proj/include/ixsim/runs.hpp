#pragma once

#include <string>

#include "ixsim/config.hpp"

namespace ixsim {

Turn task_from_string(const std::string& s);

/// "det:<A-E>:<V>,<d>" | "train:<task>" | "sto:<task>".
ScenarioInstance parse_scenario_spec(const RunConfig& cfg, const std::string& spec);

Env make_env(const RunConfig& cfg, const IntersectionMap& map, const std::string& spec);

/// Train a TD3 agent for one task; writes actor_<task>.bin, curve.csv, and
/// resolved.cfg under out_dir. Progress lines go to stdout when verbose.
void run_train(const RunConfig& cfg, Turn task, int episodes, uint64_t seed,
               const std::string& out_dir, bool verbose = false);

/// Deterministic benchmark over all five functional scenarios.
void run_eval_deterministic(const RunConfig& cfg, const std::string& agent_spec,
                            const std::vector<uint64_t>& seeds, const std::string& out_dir);

/// Stochastic benchmark over the three driving tasks.
void run_eval_stochastic(const RunConfig& cfg, const std::string& agent_spec, int episodes,
                         uint64_t seed, const std::string& out_dir);

/// Clipped-OU speed and truncated-Gaussian gap draws plus histogram bins.
void run_sample_traffic(const RunConfig& cfg, const std::string& flow, int draws, uint64_t seed,
                        const std::string& out_dir, int bins = 50);

/// Single-episode trajectory export for one concrete scenario.
void run_replay(const RunConfig& cfg, const std::string& scenario_id, double speed_kmh,
                double gap_m, const std::string& agent_spec, uint64_t seed,
                const std::string& out_path);

}  // namespace ixsim
