#pragma once

#include <limits>
#include <unordered_map>
#include <vector>

#include "ixsim/road_network.hpp"

namespace ixsim {

enum class Role : int { Ego = 0, Social = 1 };

struct Dims {
  double length = 4.5;
  double width = 2.0;
  double height = 1.6;
};

/// Route-constrained longitudinal state of one vehicle.
struct VehicleState {
  int id = 0;
  Movement route;
  double s = 0.0;  // arc position, meters
  double v = 0.0;  // speed, m/s, never negative
  Dims dims;
  Role role = Role::Social;
};

struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  Vec2 half_extents;  // x along heading, y lateral
};

struct SimConfig {
  double dt = 0.1;          // seconds
  double a_max = 3.0;       // m/s^2
  double b_max = 8.0;       // m/s^2, braking magnitude
  double speed_gain = 1.0;  // 1/s
};

struct WorldState {
  double time = 0.0;
  std::vector<VehicleState> vehicles;
  const IntersectionMap* map = nullptr;

  const VehicleState* find(int id) const;
  VehicleState* find(int id);
};

/// Proportional speed tracking clamped to the vehicle's accel limits.
double track_speed(double v, double v_target, const SimConfig& cfg);

/// Semi-implicit step: speed first, then position; speed floored at zero and
/// position capped at route_length.
VehicleState step_vehicle(const VehicleState& state, double accel, const SimConfig& cfg,
                          double route_length = std::numeric_limits<double>::infinity());

/// Planar footprint with the detection expansion factor eta (>= 1).
OrientedBox footprint(const VehicleState& state, const IntersectionMap& map, double eta = 1.0);

/// Exact oriented-box intersection via the separating-axis test.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

/// Signed clearance lower bound from the separating-axis test: positive when
/// overlapping (penetration depth bound), negative when separated.
double sat_margin(const OrientedBox& a, const OrientedBox& b);

using CommandMap = std::unordered_map<int, double>;

/// Step every vehicle by its commanded acceleration, advance time, and
/// despawn social vehicles that reached the end of their route. Throws
/// std::invalid_argument if a living vehicle has no command.
void advance_world(WorldState& world, const CommandMap& commands, const SimConfig& cfg);

}  // namespace ixsim
