#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <variant>

#include "ixsim/scenario.hpp"

namespace ixsim {

constexpr int kEgoBlockDim = 4;                 // speed + 3-dim region one-hot
constexpr int kSocialBlockDim = 6;              // vx vy x y cos sin
constexpr int kNumSocialSlots = 5;
constexpr int kObsDim = kEgoBlockDim + kNumSocialSlots * kSocialBlockDim;  // 34
constexpr double kMaxTargetSpeed = 9.0;         // m/s, action decode range
constexpr double kPaddingPosition = 100.0;      // sentinel x/y for empty slots

using Observation = std::array<double, kObsDim>;

struct Action {
  double a0 = 0.0;
  double a1 = 0.0;
};

struct RewardConfig {
  double step_penalty = -0.1;
  double success = 150.0;
  double collision = -350.0;
  double timeout = -150.0;
  double t_max = 30.0;            // seconds
  double late_step_reward = 0.0;  // per-step reward once t > 0.5 * t_max
};

enum class Outcome : int { Running = 0, Success = 1, Collision = 2, Timeout = 3 };

std::string to_string(Outcome o);

struct StepOutput {
  Observation observation{};
  double reward = 0.0;
  bool done = false;
  Outcome outcome = Outcome::Running;
};

struct EpisodeResult {
  Outcome outcome = Outcome::Running;
  double duration = 0.0;
  double total_reward = 0.0;
  uint64_t seed = 0;
};

/// Target speed for an action: a_hat = a0 - a1 scaled onto [0, 9] m/s.
double decode_action(const Action& a);

/// Per-step or terminal reward; non-terminal steps use the step's start time.
double compute_reward(double prev_time, Outcome outcome, const RewardConfig& cfg);

/// Ego speed + region one-hot, then the 5 nearest social vehicles in the ego
/// frame, padded with zero blocks at position (100, 100).
Observation observe(const WorldState& world, const IntersectionMap& map,
                    const VehicleState& ego);

using ScenarioInstance = std::variant<ConcreteScenario, TrainingScenario, StochasticConfig>;

/// Builds a custom pre-warmup episode; used by tests and scripted benches.
using SetupBuilder = std::function<EpisodeSetup(const IntersectionMap&, Rng&)>;

class Env {
 public:
  Env(const IntersectionMap& map, ScenarioInstance scenario, SimConfig sim = {},
      RewardConfig reward = {}, ScenarioDefaults defaults = {}, Dims ego_dims = {});
  Env(const IntersectionMap& map, SetupBuilder builder, SimConfig sim = {},
      RewardConfig reward = {}, ScenarioDefaults defaults = {}, Dims ego_dims = {});

  Observation reset(uint64_t seed);

  /// Throws std::logic_error when the episode has finished or never started.
  StepOutput step(const Action& a);

  bool active() const { return started_ && !done_; }
  bool done() const { return done_; }
  const WorldState& world() const { return setup_.world; }
  const IntersectionMap& map() const { return *map_; }
  const SimConfig& sim_config() const { return sim_; }
  const RewardConfig& reward_config() const { return reward_; }
  const VehicleState& ego() const;
  int ego_id() const { return kEgoId; }
  Observation observation() const;
  EpisodeResult result() const;

  static constexpr int kEgoId = 0;

 private:
  void spawn_pass();
  void social_commands(CommandMap& commands) const;
  void advance(const CommandMap& commands);

  const IntersectionMap* map_;
  ScenarioInstance scenario_;
  SetupBuilder builder_;
  SimConfig sim_;
  RewardConfig reward_;
  ScenarioDefaults defaults_;
  Dims ego_dims_;

  EpisodeSetup setup_;
  std::unordered_map<int, SocialDriver> drivers_;
  int next_id_ = 1;
  bool started_ = false;
  bool done_ = false;
  double total_reward_ = 0.0;
  Outcome outcome_ = Outcome::Running;
  uint64_t seed_ = 0;
};

}  // namespace ixsim
