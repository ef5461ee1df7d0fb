#pragma once

#include <optional>
#include <variant>

#include "ixsim/behavior.hpp"
#include "ixsim/rng.hpp"
#include "ixsim/vehicle_sim.hpp"

namespace ixsim {

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }
inline double mps_to_kmh(double mps) { return mps * 3.6; }

/// Ornstein-Uhlenbeck process parameters.
struct OuParams {
  double theta = 0.5;  // damping, 1/s
  double mu = 0.0;     // long-run mean, parameter units
  double sigma = 0.0;  // diffusion, parameter units / sqrt(s)
  double tau = 1.0;    // sampling interval, s
};

struct ParameterRange {
  double lower = 0.0;
  double upper = 1.0;
  bool contains(double v) const { return v >= lower && v <= upper; }
  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
};

/// Truncated-Gaussian gap sampler: std = (d_u - d_l) / concentration.
struct GapSamplerParams {
  double d_min = 16.0;
  double d_max = 50.0;
  double concentration = 4.0;  // n > 0
  double stddev() const { return (d_max - d_min) / concentration; }
};

/// Per-vehicle kinetic parameters fixed for the whole flow.
struct FixedKinetics {
  double speed_kmh = 20.0;
  double gap_m = 30.0;
};

/// Clipped-OU target speeds with speed-correlated truncated-Gaussian gaps.
struct OuKinetics {
  OuParams ou;
  ParameterRange speed_range_kmh{10.0, 40.0};
  GapSamplerParams gap;
};

/// Independent uniform draws for both parameters.
struct UniformKinetics {
  ParameterRange speed_range_kmh{10.0, 40.0};
  ParameterRange gap_range_m{16.0, 50.0};
};

using FlowKinetics = std::variant<FixedKinetics, OuKinetics, UniformKinetics>;

/// One traffic flow: a spawn route, a kinetic-parameter generator, and the
/// behavior profile its vehicles drive with.
struct TrafficFlowSpec {
  Movement route;
  bool random_turn = false;  // per-vehicle turn drawn uniformly (autopilot flows)
  FlowKinetics kinetics = FixedKinetics{};
  BehaviorProfile behavior;
  Dims vehicle_dims;
};

struct SpawnerState {
  double last_ou_value = 0.0;
  double pending_gap = 0.0;
  std::optional<int> last_spawned_id;
};

struct SpawnedVehicle {
  VehicleState vehicle;
  double target_speed = 0.0;  // m/s
};

/// Exact OU transition over one sampling interval tau.
double ou_step(double prev, const OuParams& p, Rng& rng);

/// OU step re-sampled until the value lands in range. Throws
/// std::runtime_error after 10,000 rejections. rejections, when non-null,
/// receives the number of rejected draws.
double clipped_ou_step(double prev, const OuParams& p, const ParameterRange& r, Rng& rng,
                       int* rejections = nullptr);

/// Linear map of target speed over the speed range onto the gap range.
double gap_mean(double speed, const ParameterRange& speed_range, const GapSamplerParams& g);

/// Truncated-Gaussian gap draw by rejection; mean from gap_mean.
double sample_gap(double speed, const ParameterRange& speed_range, const GapSamplerParams& g,
                  Rng& rng);

/// Spawn a vehicle at s = 0 of the flow route when the previous spawn has
/// cleared the pending gap (or despawned) and the spawn pose is physically
/// clear. Draws the target speed and the next gap per the flow's kinetics.
std::optional<SpawnedVehicle> maybe_spawn(SpawnerState& spawner, const TrafficFlowSpec& flow,
                                          const WorldState& world, Rng& rng, int next_id);

}  // namespace ixsim
