#pragma once

#include <string>
#include <vector>

#include "ixsim/traffic_gen.hpp"

namespace ixsim {

/// The ego vehicle always enters from the south arm; tasks differ by turn.
constexpr ArmId kEgoArm = ArmId::South;

enum class FunctionalId : int { A = 0, B = 1, C = 2, D = 3, E = 4 };

std::string to_string(FunctionalId id);
FunctionalId functional_from_string(const std::string& s);

/// One of the five single-conflict functional scenarios.
struct FunctionalScenario {
  FunctionalId id;
  Movement ego_task;
  Movement flow_route;
  std::string description;
};

/// Fixed catalog:
///   A: ego left    vs opposing straight flow
///   B: ego left    vs opposing right-turn flow
///   C: ego right   vs straight flow from the left arm
///   D: ego straight vs straight flow from the left arm
///   E: ego straight vs opposing left-turn flow
const std::array<FunctionalScenario, 5>& functional_catalog();
const FunctionalScenario& functional(FunctionalId id);

/// Parameter ranges and lattice step of the deterministic test.
struct LogicalScenario {
  FunctionalScenario functional;
  ParameterRange speed_kmh{10.0, 40.0};
  ParameterRange gap_m{16.0, 50.0};
  double step = 2.0;
};

struct ConcreteScenario {
  FunctionalScenario functional;
  double speed_kmh = 10.0;
  double gap_m = 16.0;
};

struct StochasticConfig {
  Movement ego_task{kEgoArm, Turn::Straight};
  int n_social_flows = 4;
  ParameterRange speed_kmh{10.0, 40.0};
  ParameterRange gap_m{16.0, 50.0};
  bool ignore_ego = true;
};

struct TrainingScenario {
  Movement ego_task{kEgoArm, Turn::Left};
  std::vector<TrafficFlowSpec> active_flows;
};

/// Everything flows need that comes from configuration.
struct ScenarioDefaults {
  ParameterRange speed_kmh{10.0, 40.0};
  ParameterRange gap_m{16.0, 50.0};
  double grid_step = 2.0;
  double warmup_s = 5.0;
  double ou_theta = 0.5;
  double ou_tau = 1.0;
  double gap_concentration = 4.0;
  AebParams social_aeb;
  Dims social_dims;
};

/// A fully assembled episode before warm-up: social world plus live flows.
struct FlowRuntime {
  TrafficFlowSpec spec;
  SpawnerState spawner;
  Rng rng;
};

/// Behavior binding for one social vehicle, fixed at spawn.
struct SocialDriver {
  BehaviorProfile profile;
  double v_target = 0.0;  // m/s
};

struct EpisodeSetup {
  WorldState world;
  std::vector<FlowRuntime> flows;
  Movement ego_task;
  // drivers for vehicles pre-placed in `world` (scripted setups); runtime
  // spawns register their own
  std::unordered_map<int, SocialDriver> drivers;
};

/// Row-major lattice over (V, d): V in {10,12,..,40}, d in {16,18,..,50}.
std::vector<ConcreteScenario> enumerate_grid(const LogicalScenario& l);

/// Deterministic test instance: one fixed-(V,d) flow, SpeedTrackAEB behavior.
EpisodeSetup instantiate(const ConcreteScenario& c, const IntersectionMap& map,
                         const ScenarioDefaults& d = {});

/// Flows for a task per the catalog (left -> {A,B}, straight -> {D,E},
/// right -> {C}) with clipped-OU speeds and truncated-Gaussian gaps.
TrainingScenario training_scenario_for(Turn task, const ScenarioDefaults& d = {});
EpisodeSetup instantiate_training(const TrainingScenario& t, const IntersectionMap& map,
                                  const Rng& rng);

/// Autopilot flows (one per arm, random per-vehicle turn, uniform kinetics).
EpisodeSetup instantiate_stochastic(const StochasticConfig& s, const IntersectionMap& map,
                                    const Rng& rng, const ScenarioDefaults& d = {});

}  // namespace ixsim
