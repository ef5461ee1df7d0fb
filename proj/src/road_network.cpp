#include "ixsim/road_network.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace ixsim {

Movement Movement::from_index(int i) {
  return Movement{static_cast<ArmId>(i / kNumTurns), static_cast<Turn>(i % kNumTurns)};
}

std::string to_string(ArmId a) {
  switch (a) {
    case ArmId::North: return "north";
    case ArmId::East: return "east";
    case ArmId::South: return "south";
    case ArmId::West: return "west";
  }
  return "?";
}

std::string to_string(Turn t) {
  switch (t) {
    case Turn::Left: return "left";
    case Turn::Straight: return "straight";
    case Turn::Right: return "right";
  }
  return "?";
}

std::string to_string(const Movement& m) {
  return to_string(m.entry) + "-" + to_string(m.turn);
}

RoutePolyline RoutePolyline::from_points(Movement m, std::vector<Vec2> pts) {
  assert(pts.size() >= 2);
  RoutePolyline r;
  r.movement = m;
  r.points = std::move(pts);
  r.cum_length.resize(r.points.size());
  r.headings.resize(r.points.size());
  r.cum_length[0] = 0.0;
  for (size_t i = 1; i < r.points.size(); ++i) {
    const Vec2 d = r.points[i] - r.points[i - 1];
    r.cum_length[i] = r.cum_length[i - 1] + d.norm();
    r.headings[i - 1] = std::atan2(d.y, d.x);
  }
  r.headings.back() = r.headings[r.headings.size() - 2];
  return r;
}

namespace {

constexpr double kMaxSpacing = 0.5;        // meters between polyline samples
constexpr double kMaxHeadingStep = 0.15;   // radians between arc samples

double arm_heading(ArmId a) {
  switch (a) {
    case ArmId::North: return -M_PI / 2.0;  // entering from the north, driving south
    case ArmId::East: return M_PI;
    case ArmId::South: return M_PI / 2.0;
    case ArmId::West: return 0.0;
  }
  return 0.0;
}

double turned_heading(double h, Turn t) {
  switch (t) {
    case Turn::Left: return wrap_angle(h + M_PI / 2.0);
    case Turn::Straight: return h;
    case Turn::Right: return wrap_angle(h - M_PI / 2.0);
  }
  return h;
}

// exact unit vector of the approach direction, so lane/edge coordinates land
// exactly on the junction-box boundary
Vec2 arm_direction(ArmId a) {
  switch (a) {
    case ArmId::North: return {0.0, -1.0};
    case ArmId::East: return {-1.0, 0.0};
    case ArmId::South: return {0.0, 1.0};
    case ArmId::West: return {1.0, 0.0};
  }
  return {1.0, 0.0};
}

Vec2 right_of(const Vec2& v) { return {v.y, -v.x}; }
Vec2 left_of(const Vec2& v) { return {-v.y, v.x}; }

Vec2 turned_direction(const Vec2& d, Turn t) {
  switch (t) {
    case Turn::Left: return left_of(d);
    case Turn::Straight: return d;
    case Turn::Right: return right_of(d);
  }
  return d;
}

struct RouteBuilder {
  std::vector<Vec2> points;
  std::vector<double> headings;

  void add(const Vec2& p, double h) {
    points.push_back(p);
    headings.push_back(h);
  }

  void straight(const Vec2& from, const Vec2& to, double h, bool include_start) {
    const Vec2 d = to - from;
    const double len = d.norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / kMaxSpacing)));
    for (int i = include_start ? 0 : 1; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      add(from + d * t, h);
    }
  }

  /// Circular arc from angle a0 to a1 (radians at the center), radius r.
  /// ccw selects the sweep orientation; tangents are exact.
  void arc(const Vec2& center, double radius, double a0, double a1, bool ccw) {
    double sweep = ccw ? wrap_angle(a1 - a0) : -wrap_angle(a0 - a1);
    if (ccw && sweep < 0) sweep += 2.0 * M_PI;
    if (!ccw && sweep > 0) sweep -= 2.0 * M_PI;
    const double arc_len = radius * std::abs(sweep);
    const int n = std::max(2, static_cast<int>(std::ceil(
                                  std::max(arc_len / kMaxSpacing, std::abs(sweep) / kMaxHeadingStep))));
    for (int i = 1; i <= n; ++i) {
      const double a = a0 + sweep * static_cast<double>(i) / n;
      const Vec2 radial = heading_vec(a);
      const Vec2 p = center + radial * radius;
      const Vec2 tangent = ccw ? left_of(radial) : right_of(radial);
      add(p, std::atan2(tangent.y, tangent.x));
    }
  }
};

RoutePolyline build_route(const Movement& m, const MapConfig& cfg, double half_box) {
  const double half_lane = cfg.lane_width / 2.0;
  const double h_in = arm_heading(m.entry);
  const double h_out = turned_heading(h_in, m.turn);
  const Vec2 dir_in = arm_direction(m.entry);
  const Vec2 dir_out = turned_direction(dir_in, m.turn);

  const Vec2 spawn = dir_in * -(half_box + cfg.approach_length) + right_of(dir_in) * half_lane;
  const Vec2 entry_edge = dir_in * -half_box + right_of(dir_in) * half_lane;
  const Vec2 exit_edge = dir_out * half_box + right_of(dir_out) * half_lane;
  const Vec2 exit_end = dir_out * (half_box + cfg.approach_length) + right_of(dir_out) * half_lane;

  RouteBuilder b;
  b.straight(spawn, entry_edge, h_in, true);
  if (m.turn == Turn::Straight) {
    b.straight(entry_edge, exit_edge, h_in, false);
  } else {
    // Arc tangent to the entry lane at entry_edge and to the exit lane at
    // exit_edge. The center sits on the turning-side normal of both.
    const Vec2 n_in = m.turn == Turn::Left ? left_of(dir_in) : right_of(dir_in);
    const Vec2 n_out = m.turn == Turn::Left ? left_of(dir_out) : right_of(dir_out);
    const Vec2 dn = n_out - n_in;
    const Vec2 de = entry_edge - exit_edge;
    const double radius =
        std::abs(dn.x) > std::abs(dn.y) ? de.x / dn.x : de.y / dn.y;
    assert(radius > 0.0);
    const Vec2 center = entry_edge + n_in * radius;
    const double a0 = std::atan2(entry_edge.y - center.y, entry_edge.x - center.x);
    const double a1 = std::atan2(exit_edge.y - center.y, exit_edge.x - center.x);
    b.arc(center, radius, a0, a1, m.turn == Turn::Left);
    // snap the trig-computed arc end onto the exact lane-edge point
    b.points.back() = exit_edge;
    b.headings.back() = h_out;
  }
  b.straight(exit_edge, exit_end, h_out, false);

  RoutePolyline r;
  r.movement = m;
  r.points = std::move(b.points);
  r.headings = std::move(b.headings);
  r.cum_length.resize(r.points.size());
  r.cum_length[0] = 0.0;
  for (size_t i = 1; i < r.points.size(); ++i) {
    r.cum_length[i] = r.cum_length[i - 1] + (r.points[i] - r.points[i - 1]).norm();
  }
  return r;
}

/// Bisect the polyline for a containment flip of the junction box between
/// arc positions lo and hi.
double bisect_crossing(const RoutePolyline& r, const Aabb& box, double lo, double hi) {
  bool lo_in = box.contains(pose_at(r, lo).position);
  for (int i = 0; i < 60 && hi - lo > 1e-10; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (box.contains(pose_at(r, mid).position) == lo_in) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void fill_junction_span(RoutePolyline& r, const Aabb& box) {
  const size_t n = r.points.size();
  size_t first_in = n, last_in = n;
  for (size_t i = 0; i < n; ++i) {
    if (box.contains(r.points[i])) {
      if (first_in == n) first_in = i;
      last_in = i;
    }
  }
  assert(first_in != n && first_in > 0 && last_in + 1 < n);
  r.junction_enter_s = bisect_crossing(r, box, r.cum_length[first_in - 1], r.cum_length[first_in]);
  r.junction_exit_s = bisect_crossing(r, box, r.cum_length[last_in], r.cum_length[last_in + 1]);
}

}  // namespace

IntersectionMap build_default_intersection(const MapConfig& cfg) {
  IntersectionMap map;
  map.config = cfg;
  const double half_box = cfg.lane_width;  // entry + exit lane per road
  map.junction_box = Aabb{{-half_box, -half_box}, {half_box, half_box}};
  for (int a = 0; a < kNumArms; ++a) {
    map.arms[a] = Arm{static_cast<ArmId>(a), arm_heading(static_cast<ArmId>(a))};
  }
  for (int i = 0; i < kNumMovements; ++i) {
    map.routes[i] = build_route(Movement::from_index(i), cfg, half_box);
    fill_junction_span(map.routes[i], map.junction_box);
  }
  return map;
}

Pose pose_at(const RoutePolyline& route, double s) {
  if (s < 0.0 || s > route.length() + 1e-9) {
    throw std::out_of_range("pose_at: s outside route [0, " +
                            std::to_string(route.length()) + "]: " + std::to_string(s));
  }
  s = std::min(s, route.length());
  const auto it = std::upper_bound(route.cum_length.begin(), route.cum_length.end(), s);
  size_t hi = std::min<size_t>(it - route.cum_length.begin(), route.points.size() - 1);
  if (hi == 0) hi = 1;
  const size_t lo = hi - 1;
  const double seg = route.cum_length[hi] - route.cum_length[lo];
  const double t = seg > 0.0 ? (s - route.cum_length[lo]) / seg : 0.0;
  Pose p;
  p.position = route.points[lo] + (route.points[hi] - route.points[lo]) * t;
  p.heading = lerp_angle(route.headings[lo], route.headings[hi], t);
  return p;
}

double project(const RoutePolyline& route, const Vec2& position) {
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (size_t i = 0; i + 1 < route.points.size(); ++i) {
    const Vec2 a = route.points[i];
    const Vec2 d = route.points[i + 1] - a;
    const double len2 = d.dot(d);
    double t = len2 > 0.0 ? (position - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 q = a + d * t;
    const double d2 = (position - q).dot(position - q);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = route.cum_length[i] + std::sqrt(len2) * t;
    }
  }
  return best_s;
}

Region region_of(const IntersectionMap& map, const RoutePolyline& route, double s) {
  if (s < 0.0 || s > route.length() + 1e-9) {
    throw std::out_of_range("region_of: s outside route");
  }
  (void)map;
  if (s < route.junction_enter_s) return Region::BeforeJunction;
  if (s <= route.junction_exit_s) return Region::InsideJunction;
  return Region::AfterJunction;
}

ArmId exit_arm(const Movement& m) {
  const double h_out = turned_heading(arm_heading(m.entry), m.turn);
  // the exit arm is the one whose approach heading is opposite to h_out
  for (int a = 0; a < kNumArms; ++a) {
    if (std::abs(angle_diff(arm_heading(static_cast<ArmId>(a)), wrap_angle(h_out + M_PI))) < 1e-9) {
      return static_cast<ArmId>(a);
    }
  }
  return m.entry;
}

ArmId opposing_arm(ArmId a) {
  switch (a) {
    case ArmId::North: return ArmId::South;
    case ArmId::South: return ArmId::North;
    case ArmId::East: return ArmId::West;
    case ArmId::West: return ArmId::East;
  }
  return a;
}

ArmId left_arm_of(ArmId a) {
  // the arm a driver entering from `a` sees on their left
  switch (a) {
    case ArmId::North: return ArmId::East;
    case ArmId::East: return ArmId::South;
    case ArmId::South: return ArmId::West;
    case ArmId::West: return ArmId::North;
  }
  return a;
}

}  // namespace ixsim
