#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "ixsim/env.hpp"
#include "ixsim/nn.hpp"

namespace ixsim {

struct Transition {
  Observation obs;
  Action action;
  double reward = 0.0;
  Observation next_obs;
  bool done = false;
};

/// FIFO ring buffer with uniform seeded sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(const Transition& t);
  size_t size() const { return data_.size(); }
  size_t capacity() const { return capacity_; }
  const Transition& at(size_t i) const { return data_[i]; }

  /// Uniform sample with replacement into `out` (resized to batch).
  void sample(size_t batch, Rng& rng, std::vector<const Transition*>& out) const;

 private:
  size_t capacity_;
  size_t head_ = 0;
  std::vector<Transition> data_;
};

struct Td3Config {
  double gamma = 0.99;
  double polyak = 0.005;
  int policy_delay = 2;
  double expl_noise = 0.1;
  double smooth_noise = 0.2;
  double noise_clip = 0.5;
  int batch_size = 256;
  double lr = 3e-4;
  size_t buffer_capacity = 100000;
  int warmup_steps = 1000;
  int update_every = 1;       // environment steps per gradient update
  int hidden = 64;            // encoder and head width
  int curve_window = 100;     // moving-average window for the learning curve
  double success_stop = -1.0; // stop early at this moving success rate; <0 disables
};

struct UpdateDiagnostics {
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double actor_objective = 0.0;  // mean Q1 under the current actor
  bool actor_updated = false;
};

/// Twin-critic deterministic policy gradient learner over PolicyNet.
class Td3 {
 public:
  Td3(const Td3Config& cfg, uint64_t seed);

  /// Deterministic actor action for one observation.
  Action act(const Observation& obs) const;
  /// Exploration action: Gaussian noise on each component, clamped to [0,1].
  Action act_noisy(const Observation& obs, Rng& rng) const;

  /// One gradient update from the buffer. Throws std::logic_error when the
  /// buffer holds fewer transitions than one batch.
  UpdateDiagnostics update(const ReplayBuffer& buffer, Rng& rng);

  const PolicyNet& actor() const { return actor_; }
  PolicyNet& actor() { return actor_; }
  const PolicyNet& critic1() const { return critic1_; }
  const PolicyNet& critic2() const { return critic2_; }
  const PolicyNet& actor_target() const { return actor_t_; }
  const PolicyNet& critic1_target() const { return critic1_t_; }
  const PolicyNet& critic2_target() const { return critic2_t_; }
  const Td3Config& config() const { return cfg_; }
  int64_t update_count() const { return update_count_; }

 private:
  Td3Config cfg_;
  PolicyNet actor_, critic1_, critic2_;
  PolicyNet actor_t_, critic1_t_, critic2_t_;
  int64_t update_count_ = 0;
  int64_t actor_step_ = 0;
  int64_t critic_step_ = 0;

  mutable PolicyNet::Workspace ws_actor_, ws_c1_, ws_c2_, ws_t_;
};

struct CurvePoint {
  int episode = 0;
  double episode_return = 0.0;
  bool success = false;
  double moving_return = 0.0;
  double moving_success = 0.0;
};

using LearningCurve = std::vector<CurvePoint>;

struct TrainResult {
  LearningCurve curve;
  int total_env_steps = 0;
};

struct TrainHooks {
  /// Called after each episode; return false to stop training.
  std::function<bool(const CurvePoint&)> on_episode;
};

/// Run TD3 against the environment for `episodes` episodes. Episode seeds,
/// network init, exploration, and replay sampling all derive from `seed`.
TrainResult train_td3(Env& env, Td3& td3, const Td3Config& cfg, int episodes, uint64_t seed,
                      const TrainHooks& hooks = {});

void write_curve_csv(const LearningCurve& curve, const std::string& path);

}  // namespace ixsim
