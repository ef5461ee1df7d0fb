#include "ixsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ixsim {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Running: return "running";
    case Outcome::Success: return "success";
    case Outcome::Collision: return "collision";
    case Outcome::Timeout: return "timeout";
  }
  return "?";
}

double decode_action(const Action& a) {
  const double a0 = std::clamp(a.a0, 0.0, 1.0);
  const double a1 = std::clamp(a.a1, 0.0, 1.0);
  const double a_hat = a0 - a1;
  return (a_hat + 1.0) / 2.0 * kMaxTargetSpeed;
}

double compute_reward(double prev_time, Outcome outcome, const RewardConfig& cfg) {
  switch (outcome) {
    case Outcome::Success: return cfg.success;
    case Outcome::Collision: return cfg.collision;
    case Outcome::Timeout: return cfg.timeout;
    case Outcome::Running: break;
  }
  return prev_time <= 0.5 * cfg.t_max ? cfg.step_penalty : cfg.late_step_reward;
}

Observation observe(const WorldState& world, const IntersectionMap& map,
                    const VehicleState& ego) {
  Observation obs{};
  const RoutePolyline& ego_route = map.route(ego.route);
  const Pose ego_pose = pose_at(ego_route, ego.s);

  obs[0] = ego.v;
  const Region region = region_of(map, ego_route, ego.s);
  obs[1 + static_cast<int>(region)] = 1.0;

  struct Entry {
    double dist;
    int id;
    const VehicleState* veh;
    Pose pose;
  };
  std::vector<Entry> entries;
  entries.reserve(world.vehicles.size());
  for (const auto& veh : world.vehicles) {
    if (veh.id == ego.id) continue;
    const Pose pose = pose_at(map.route(veh.route), veh.s);
    const Vec2 rel = pose.position - ego_pose.position;
    entries.push_back({rel.norm(), veh.id, &veh, pose});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
  });

  for (int slot = 0; slot < kNumSocialSlots; ++slot) {
    double* block = obs.data() + kEgoBlockDim + slot * kSocialBlockDim;
    if (slot < static_cast<int>(entries.size())) {
      const Entry& e = entries[slot];
      const Vec2 rel_pos = rotate(e.pose.position - ego_pose.position, -ego_pose.heading);
      const Vec2 vel = heading_vec(e.pose.heading) * e.veh->v;
      const Vec2 rel_vel = rotate(vel, -ego_pose.heading);
      const double rel_heading = angle_diff(e.pose.heading, ego_pose.heading);
      block[0] = rel_vel.x;
      block[1] = rel_vel.y;
      block[2] = rel_pos.x;
      block[3] = rel_pos.y;
      block[4] = std::cos(rel_heading);
      block[5] = std::sin(rel_heading);
    } else {
      block[2] = kPaddingPosition;
      block[3] = kPaddingPosition;
    }
  }
  return obs;
}

Env::Env(const IntersectionMap& map, ScenarioInstance scenario, SimConfig sim,
         RewardConfig reward, ScenarioDefaults defaults, Dims ego_dims)
    : map_(&map),
      scenario_(std::move(scenario)),
      sim_(sim),
      reward_(reward),
      defaults_(defaults),
      ego_dims_(ego_dims) {}

Env::Env(const IntersectionMap& map, SetupBuilder builder, SimConfig sim, RewardConfig reward,
         ScenarioDefaults defaults, Dims ego_dims)
    : map_(&map),
      scenario_(ConcreteScenario{}),
      builder_(std::move(builder)),
      sim_(sim),
      reward_(reward),
      defaults_(defaults),
      ego_dims_(ego_dims) {}

const VehicleState& Env::ego() const {
  const VehicleState* e = setup_.world.find(kEgoId);
  if (!e) throw std::logic_error("Env: no ego vehicle; call reset first");
  return *e;
}

Observation Env::reset(uint64_t seed) {
  seed_ = seed;
  Rng rng(seed);
  drivers_.clear();
  next_id_ = 1;
  total_reward_ = 0.0;
  outcome_ = Outcome::Running;
  done_ = false;

  if (builder_) {
    setup_ = builder_(*map_, rng);
  } else if (const auto* c = std::get_if<ConcreteScenario>(&scenario_)) {
    setup_ = instantiate(*c, *map_, defaults_);
  } else if (const auto* t = std::get_if<TrainingScenario>(&scenario_)) {
    setup_ = instantiate_training(*t, *map_, rng.fork(1));
  } else {
    setup_ = instantiate_stochastic(std::get<StochasticConfig>(scenario_), *map_, rng.fork(1),
                                    defaults_);
  }
  drivers_ = setup_.drivers;
  bool has_ego = false;
  for (const auto& veh : setup_.world.vehicles) {
    next_id_ = std::max(next_id_, veh.id + 1);
    has_ego = has_ego || veh.role == Role::Ego;
  }

  const int warmup_steps =
      static_cast<int>(std::llround(defaults_.warmup_s / sim_.dt));
  for (int i = 0; i < warmup_steps; ++i) {
    spawn_pass();
    CommandMap commands;
    social_commands(commands);
    if (has_ego) commands[kEgoId] = 0.0;  // pre-placed ego idles through warm-up
    advance_world(setup_.world, commands, sim_);
  }
  setup_.world.time = 0.0;  // episode clock starts at ego release

  if (!has_ego) {
    VehicleState ego;
    ego.id = kEgoId;
    ego.route = setup_.ego_task;
    ego.s = 0.0;
    ego.v = 0.0;
    ego.dims = ego_dims_;
    ego.role = Role::Ego;
    setup_.world.vehicles.push_back(ego);
  }

  started_ = true;
  return observe(setup_.world, *map_, this->ego());
}

void Env::spawn_pass() {
  for (auto& flow : setup_.flows) {
    auto spawned = maybe_spawn(flow.spawner, flow.spec, setup_.world, flow.rng, next_id_);
    if (spawned) {
      ++next_id_;
      setup_.world.vehicles.push_back(spawned->vehicle);
      drivers_[spawned->vehicle.id] = SocialDriver{flow.spec.behavior, spawned->target_speed};
    }
  }
}

void Env::social_commands(CommandMap& commands) const {
  for (const auto& veh : setup_.world.vehicles) {
    if (veh.role != Role::Social) continue;
    const auto it = drivers_.find(veh.id);
    if (it == drivers_.end()) {
      throw std::logic_error("Env: social vehicle without a driver");
    }
    const double accel =
        policy_step(setup_.world, veh, it->second.profile, it->second.v_target, sim_);
    commands[veh.id] = std::clamp(accel, -sim_.b_max, sim_.a_max);
  }
}

StepOutput Env::step(const Action& a) {
  if (!started_) throw std::logic_error("Env::step: reset the environment first");
  if (done_) throw std::logic_error("Env::step: episode already finished");

  const double prev_time = setup_.world.time;
  spawn_pass();
  CommandMap commands;
  social_commands(commands);
  const VehicleState& ego_now = ego();
  commands[kEgoId] = track_speed(ego_now.v, decode_action(a), sim_);
  advance_world(setup_.world, commands, sim_);

  const VehicleState& ego_after = ego();
  Outcome outcome = Outcome::Running;
  const OrientedBox ego_box = footprint(ego_after, *map_, 1.0);
  for (const auto& veh : setup_.world.vehicles) {
    if (veh.role != Role::Social) continue;
    if (boxes_overlap(ego_box, footprint(veh, *map_, 1.0))) {
      outcome = Outcome::Collision;
      break;
    }
  }
  if (outcome == Outcome::Running) {
    if (ego_after.s >= map_->route(ego_after.route).length()) {
      outcome = Outcome::Success;
    } else if (setup_.world.time >= reward_.t_max) {
      outcome = Outcome::Timeout;
    }
  }

  StepOutput out;
  out.outcome = outcome;
  out.done = outcome != Outcome::Running;
  out.reward = compute_reward(prev_time, outcome, reward_);
  total_reward_ += out.reward;
  done_ = out.done;
  outcome_ = outcome;
  out.observation = observe(setup_.world, *map_, ego_after);
  return out;
}

Observation Env::observation() const {
  return observe(setup_.world, *map_, ego());
}

EpisodeResult Env::result() const {
  EpisodeResult r;
  r.outcome = outcome_;
  r.duration = setup_.world.time;
  r.total_reward = total_reward_;
  r.seed = seed_;
  return r;
}

}  // namespace ixsim
