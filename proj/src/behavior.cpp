#include "ixsim/behavior.hpp"

#include <algorithm>
#include <cmath>

namespace ixsim {

namespace {
constexpr double kLateralThreshold = 2.0;  // m off the route centerline
}

IdmTerms idm_decompose(double v, const std::optional<LeadInfo>& lead, const IdmParams& p) {
  IdmTerms t;
  t.free = p.a * (1.0 - std::pow(v / p.v0, p.delta));
  if (!lead) return t;
  if (lead->gap <= 0.0) {
    t.interaction = -kEmergencyBrake - t.free;  // full brake, overrides the free term
    return t;
  }
  double s_star = p.s0 + v * p.T + v * lead->closing_speed / (2.0 * std::sqrt(p.a * p.b));
  s_star = std::max(s_star, p.s0);
  const double ratio = s_star / lead->gap;
  t.interaction = -p.a * ratio * ratio;
  return t;
}

double idm_accel(double v, const std::optional<LeadInfo>& lead, const IdmParams& p) {
  const IdmTerms t = idm_decompose(v, lead, p);
  return t.free + t.interaction;
}

std::optional<LeadInfo> find_lead(const WorldState& world, const VehicleState& vehicle,
                                  double horizon) {
  const RoutePolyline& route = world.map->route(vehicle.route);
  std::optional<LeadInfo> best;
  double best_ahead = horizon;
  for (const auto& other : world.vehicles) {
    if (other.id == vehicle.id) continue;
    const Vec2 pos = pose_at(world.map->route(other.route), other.s).position;
    const double s_proj = project(route, pos);
    const double ahead = s_proj - vehicle.s;
    if (ahead <= 0.0 || ahead > best_ahead) continue;
    const Vec2 on_route = pose_at(route, s_proj).position;
    if ((pos - on_route).norm() > kLateralThreshold) continue;
    LeadInfo info;
    info.gap = std::max(0.0, ahead - vehicle.dims.length / 2.0 - other.dims.length / 2.0);
    info.closing_speed = vehicle.v - other.v;
    info.leader_id = other.id;
    best = info;
    best_ahead = ahead;
  }
  return best;
}

bool aeb_detect(const WorldState& world, const VehicleState& vehicle, const AebParams& p,
                int skip_id) {
  const Pose pose = pose_at(world.map->route(vehicle.route), vehicle.s);
  OrientedBox detect;
  detect.heading = pose.heading;
  detect.center =
      pose.position + heading_vec(pose.heading) * (vehicle.dims.length / 2.0 + p.detect_length / 2.0);
  detect.half_extents = {p.detect_length / 2.0, vehicle.dims.width / 2.0};
  for (const auto& other : world.vehicles) {
    if (other.id == vehicle.id || other.id == skip_id) continue;
    if (boxes_overlap(detect, footprint(other, *world.map, p.expansion))) return true;
  }
  return false;
}

double policy_step(const WorldState& world, const VehicleState& vehicle,
                   const BehaviorProfile& profile, double v_target, const SimConfig& cfg) {
  switch (profile.kind) {
    case ProfileKind::SpeedTrackAeb:
    case ProfileKind::Autopilot: {
      int skip = -1;
      if (profile.ignore_ego) {
        for (const auto& v : world.vehicles) {
          if (v.role == Role::Ego) skip = v.id;
        }
      }
      if (aeb_detect(world, vehicle, profile.aeb, skip)) return -profile.aeb.brake;
      return track_speed(vehicle.v, v_target, cfg);
    }
    case ProfileKind::Idm: {
      const auto lead = find_lead(world, vehicle, profile.idm.horizon);
      return idm_accel(vehicle.v, lead, profile.idm);
    }
  }
  return 0.0;
}

}  // namespace ixsim
