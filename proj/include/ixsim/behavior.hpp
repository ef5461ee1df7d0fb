#pragma once

#include <optional>

#include "ixsim/vehicle_sim.hpp"

namespace ixsim {

/// Intelligent-driver-model parameters, literature naming.
struct IdmParams {
  double v0 = 9.0;     // desired velocity, m/s
  double s0 = 2.0;     // minimum net distance, m
  double T = 1.5;      // time headway, s
  double a = 1.5;      // max acceleration, m/s^2
  double b = 2.0;      // comfortable deceleration, m/s^2
  double delta = 4.0;  // free-road exponent
  double horizon = 50.0;  // lead detection distance along the route, m
};

struct AebParams {
  double detect_length = 12.0;  // m ahead of the front bumper
  double expansion = 1.2;       // obstacle bounding-box expansion factor
  double brake = 8.0;           // m/s^2, maximum braking
};

struct LeadInfo {
  double gap = 0.0;            // net bumper-to-bumper distance, m, >= 0
  double closing_speed = 0.0;  // follower speed - leader speed, m/s
  int leader_id = -1;
};

enum class ProfileKind : int { SpeedTrackAeb = 0, Idm = 1, Autopilot = 2 };

/// Driving policy of a social vehicle (or an ego baseline adapter).
struct BehaviorProfile {
  ProfileKind kind = ProfileKind::SpeedTrackAeb;
  AebParams aeb;
  IdmParams idm;
  bool ignore_ego = false;  // skip the ego vehicle in collision detection
};

/// Deceleration commanded when the IDM gap has collapsed to zero.
constexpr double kEmergencyBrake = 8.0;

/// IDM acceleration (free-road term only when no lead).
double idm_accel(double v, const std::optional<LeadInfo>& lead, const IdmParams& p);

/// (free, interaction) terms; their sum equals idm_accel exactly.
struct IdmTerms {
  double free = 0.0;
  double interaction = 0.0;
};
IdmTerms idm_decompose(double v, const std::optional<LeadInfo>& lead, const IdmParams& p);

/// Nearest vehicle ahead on the subject's route within `horizon` meters and
/// 2.0 m laterally of the route.
std::optional<LeadInfo> find_lead(const WorldState& world, const VehicleState& vehicle,
                                  double horizon);

/// True when any other vehicle's expanded footprint intersects the forward
/// detection box. Vehicles the profile ignores (the ego, when ignore_ego is
/// set) are skipped via `skip_id`.
bool aeb_detect(const WorldState& world, const VehicleState& vehicle, const AebParams& p,
                int skip_id = -1);

/// One policy evaluation: returns the commanded acceleration.
double policy_step(const WorldState& world, const VehicleState& vehicle,
                   const BehaviorProfile& profile, double v_target, const SimConfig& cfg);

}  // namespace ixsim
