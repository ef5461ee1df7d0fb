#include "ixsim/traffic_gen.hpp"

#include <cmath>
#include <stdexcept>

namespace ixsim {

namespace {
constexpr int kMaxRejections = 10000;
}

double ou_step(double prev, const OuParams& p, Rng& rng) {
  const double decay = std::exp(-p.theta * p.tau);
  const double mean = (1.0 - decay) * p.mu + prev * decay;
  const double var = p.sigma * p.sigma * (1.0 - decay * decay) / (2.0 * p.theta);
  return mean + std::sqrt(var) * rng.gaussian();
}

double clipped_ou_step(double prev, const OuParams& p, const ParameterRange& r, Rng& rng,
                       int* rejections) {
  int rejected = 0;
  double candidate = ou_step(prev, p, rng);
  while (!r.contains(candidate)) {
    if (++rejected > kMaxRejections) {
      throw std::runtime_error("clipped_ou_step: rejection cap exceeded; range [" +
                               std::to_string(r.lower) + ", " + std::to_string(r.upper) +
                               "] is incompatible with the OU parameters");
    }
    candidate = ou_step(prev, p, rng);
  }
  if (rejections) *rejections = rejected;
  return candidate;
}

double gap_mean(double speed, const ParameterRange& speed_range, const GapSamplerParams& g) {
  const double t = (speed - speed_range.lower) / speed_range.width();
  return g.d_min + t * (g.d_max - g.d_min);
}

double sample_gap(double speed, const ParameterRange& speed_range, const GapSamplerParams& g,
                  Rng& rng) {
  const double mean = gap_mean(speed, speed_range, g);
  const double sd = g.stddev();
  for (int i = 0; i < kMaxRejections; ++i) {
    const double d = rng.gaussian(mean, sd);
    if (d >= g.d_min && d <= g.d_max) return d;
  }
  throw std::runtime_error("sample_gap: rejection cap exceeded");
}

namespace {

struct DrawnKinetics {
  double speed_kmh = 0.0;
  double gap_m = 0.0;
};

DrawnKinetics draw_kinetics(SpawnerState& spawner, const FlowKinetics& kinetics, Rng& rng) {
  DrawnKinetics out;
  if (const auto* fixed = std::get_if<FixedKinetics>(&kinetics)) {
    out.speed_kmh = fixed->speed_kmh;
    out.gap_m = fixed->gap_m;
  } else if (const auto* ou = std::get_if<OuKinetics>(&kinetics)) {
    out.speed_kmh = clipped_ou_step(spawner.last_ou_value, ou->ou, ou->speed_range_kmh, rng);
    spawner.last_ou_value = out.speed_kmh;
    out.gap_m = sample_gap(out.speed_kmh, ou->speed_range_kmh, ou->gap, rng);
  } else {
    const auto& uni = std::get<UniformKinetics>(kinetics);
    out.speed_kmh = rng.uniform(uni.speed_range_kmh.lower, uni.speed_range_kmh.upper);
    out.gap_m = rng.uniform(uni.gap_range_m.lower, uni.gap_range_m.upper);
  }
  return out;
}

}  // namespace

std::optional<SpawnedVehicle> maybe_spawn(SpawnerState& spawner, const TrafficFlowSpec& flow,
                                          const WorldState& world, Rng& rng, int next_id) {
  if (spawner.last_spawned_id) {
    const VehicleState* prev = world.find(*spawner.last_spawned_id);
    if (prev && prev->s < spawner.pending_gap) return std::nullopt;
  }

  VehicleState veh;
  veh.id = next_id;
  veh.route = flow.route;  // all turns from one arm share the spawn pose
  veh.s = 0.0;
  veh.dims = flow.vehicle_dims;
  veh.role = Role::Social;

  // never spawn on top of an existing vehicle (the ego may sit at the shared
  // spawn pose in stochastic scenarios); checked before any RNG draw so a
  // vetoed spawn leaves the parameter sequence untouched
  const OrientedBox spawn_box = footprint(veh, *world.map, 1.0);
  for (const auto& other : world.vehicles) {
    if (boxes_overlap(spawn_box, footprint(other, *world.map, 1.0))) return std::nullopt;
  }

  if (flow.random_turn) {
    veh.route.turn = static_cast<Turn>(rng.uniform_int(kNumTurns));
  }
  const DrawnKinetics drawn = draw_kinetics(spawner, flow.kinetics, rng);
  veh.v = kmh_to_mps(drawn.speed_kmh);

  spawner.pending_gap = drawn.gap_m;
  spawner.last_spawned_id = veh.id;
  return SpawnedVehicle{veh, veh.v};
}

}  // namespace ixsim
