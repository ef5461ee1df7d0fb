#include "ixsim/vehicle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ixsim {

const VehicleState* WorldState::find(int id) const {
  for (const auto& v : vehicles) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

VehicleState* WorldState::find(int id) {
  for (auto& v : vehicles) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

double track_speed(double v, double v_target, const SimConfig& cfg) {
  return std::clamp(cfg.speed_gain * (v_target - v), -cfg.b_max, cfg.a_max);
}

VehicleState step_vehicle(const VehicleState& state, double accel, const SimConfig& cfg,
                          double route_length) {
  VehicleState next = state;
  next.v = std::max(0.0, state.v + accel * cfg.dt);
  next.s = std::min(state.s + next.v * cfg.dt, route_length);
  return next;
}

OrientedBox footprint(const VehicleState& state, const IntersectionMap& map, double eta) {
  const Pose pose = pose_at(map.route(state.route), state.s);
  OrientedBox box;
  box.center = pose.position;
  box.heading = pose.heading;
  box.half_extents = {eta * state.dims.length / 2.0, eta * state.dims.width / 2.0};
  return box;
}

namespace {

/// Projection radius of box b onto a unit axis.
double projection_radius(const OrientedBox& b, const Vec2& axis) {
  const Vec2 ux = heading_vec(b.heading);
  const Vec2 uy{-ux.y, ux.x};
  return b.half_extents.x * std::abs(ux.dot(axis)) + b.half_extents.y * std::abs(uy.dot(axis));
}

}  // namespace

double sat_margin(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 ax = heading_vec(a.heading);
  const Vec2 bx = heading_vec(b.heading);
  const Vec2 axes[4] = {ax, {-ax.y, ax.x}, bx, {-bx.y, bx.x}};
  const Vec2 d = b.center - a.center;
  double margin = std::numeric_limits<double>::infinity();
  for (const Vec2& axis : axes) {
    const double overlap =
        projection_radius(a, axis) + projection_radius(b, axis) - std::abs(d.dot(axis));
    margin = std::min(margin, overlap);
  }
  return margin;
}

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  return sat_margin(a, b) >= 0.0;
}

void advance_world(WorldState& world, const CommandMap& commands, const SimConfig& cfg) {
  for (auto& veh : world.vehicles) {
    const auto it = commands.find(veh.id);
    if (it == commands.end()) {
      throw std::invalid_argument("advance_world: no command for vehicle " +
                                  std::to_string(veh.id));
    }
    veh = step_vehicle(veh, it->second, cfg, world.map->route(veh.route).length());
  }
  std::erase_if(world.vehicles, [&](const VehicleState& v) {
    return v.role == Role::Social && v.s >= world.map->route(v.route).length();
  });
  world.time += cfg.dt;
}

}  // namespace ixsim
