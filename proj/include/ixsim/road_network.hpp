#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ixsim/geom.hpp"

namespace ixsim {

enum class ArmId : int { North = 0, East = 1, South = 2, West = 3 };
enum class Turn : int { Left = 0, Straight = 1, Right = 2 };

constexpr int kNumArms = 4;
constexpr int kNumTurns = 3;
constexpr int kNumMovements = kNumArms * kNumTurns;

struct Arm {
  ArmId id;
  double approach_heading;  // direction of travel when entering the junction
};

/// One movement through the junction: entry arm plus turn direction.
struct Movement {
  ArmId entry = ArmId::North;
  Turn turn = Turn::Straight;

  bool operator==(const Movement&) const = default;
  int index() const { return static_cast<int>(entry) * kNumTurns + static_cast<int>(turn); }
  static Movement from_index(int i);
};

std::string to_string(ArmId a);
std::string to_string(Turn t);
std::string to_string(const Movement& m);

/// Arc-length parameterized path for one movement. Points are sampled at
/// <= 0.5 m spacing with exact tangent headings at each sample.
struct RoutePolyline {
  Movement movement;
  std::vector<Vec2> points;
  std::vector<double> cum_length;  // strictly increasing, starts at 0
  std::vector<double> headings;    // radians per point

  // Arc positions where the route enters/leaves the junction box.
  // Filled by build_default_intersection.
  double junction_enter_s = 0.0;
  double junction_exit_s = 0.0;

  double length() const { return cum_length.back(); }

  /// Build from raw points; cumulative lengths and per-segment headings
  /// are derived. Used for synthetic routes in tests.
  static RoutePolyline from_points(Movement m, std::vector<Vec2> pts);
};

struct Pose {
  Vec2 position;
  double heading;
};

enum class Region : int { BeforeJunction = 0, InsideJunction = 1, AfterJunction = 2 };

struct MapConfig {
  double lane_width = 3.5;       // meters
  double approach_length = 30.0; // spawn point to junction edge
};

/// Four-arm orthogonal un-signalized intersection with one entry and one
/// exit lane per arm and right-hand traffic. Immutable after construction.
struct IntersectionMap {
  std::array<Arm, kNumArms> arms;
  std::array<RoutePolyline, kNumMovements> routes;
  Aabb junction_box;
  MapConfig config;

  const RoutePolyline& route(const Movement& m) const { return routes[m.index()]; }
};

IntersectionMap build_default_intersection(const MapConfig& cfg = {});

/// Pose at arc position s. Throws std::out_of_range outside [0, length].
Pose pose_at(const RoutePolyline& route, double s);

/// Arc position of the closest point-to-segment projection; ties break
/// toward smaller s. Total over the whole plane.
double project(const RoutePolyline& route, const Vec2& position);

/// Region of the route position relative to the junction box.
Region region_of(const IntersectionMap& map, const RoutePolyline& route, double s);

/// Arm of the route a movement exits through.
ArmId exit_arm(const Movement& m);

/// Opposing arm (the one facing `a` across the junction).
ArmId opposing_arm(ArmId a);
/// Arm on the left of a vehicle entering from `a`.
ArmId left_arm_of(ArmId a);

}  // namespace ixsim
