#include "ixsim/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace ixsim {

Action action_for_target_speed(double v_target) {
  const double a_hat = std::clamp(v_target, 0.0, kMaxTargetSpeed) / kMaxTargetSpeed * 2.0 - 1.0;
  return a_hat >= 0.0 ? Action{a_hat, 0.0} : Action{0.0, -a_hat};
}

Td3Agent::Td3Agent(PolicyNet actor, std::string label)
    : actor_(std::move(actor)), label_(std::move(label)) {
  if (!actor_.is_actor() || actor_.out_dim() != 2) {
    throw std::invalid_argument("Td3Agent: network is not a 2-output actor");
  }
}

std::unique_ptr<Td3Agent> Td3Agent::from_file(const std::string& path) {
  return std::make_unique<Td3Agent>(load_net(path), "td3:" + path);
}

Action Td3Agent::act(const Env& env) {
  const Observation obs = env.observation();
  Mat in(1, kObsDim);
  std::copy(obs.begin(), obs.end(), in.row(0));
  Mat out;
  actor_.forward(in, nullptr, out, ws_);
  return Action{out.at(0, 0), out.at(0, 1)};
}

namespace {
/// Invert track_speed: the target speed whose tracking command reproduces
/// `accel`, clamped to the action range.
double target_speed_for_accel(double v, double accel, const SimConfig& cfg) {
  return std::clamp(v + accel / cfg.speed_gain, 0.0, kMaxTargetSpeed);
}
}  // namespace

Action IdmAgent::act(const Env& env) {
  const VehicleState& ego = env.ego();
  const auto lead = find_lead(env.world(), ego, params_.horizon);
  const double accel = idm_accel(ego.v, lead, params_);
  return action_for_target_speed(target_speed_for_accel(ego.v, accel, env.sim_config()));
}

Action AebAgent::act(const Env& env) {
  const VehicleState& ego = env.ego();
  if (aeb_detect(env.world(), ego, params_)) {
    return action_for_target_speed(
        target_speed_for_accel(ego.v, -params_.brake, env.sim_config()));
  }
  return action_for_target_speed(kMaxTargetSpeed);
}

Action RandomAgent::act(const Env&) { return Action{rng_.uniform(), rng_.uniform()}; }

std::unique_ptr<Agent> make_agent(const std::string& spec, const IdmParams& idm,
                                  const AebParams& aeb) {
  if (spec == "idm") return std::make_unique<IdmAgent>(idm);
  if (spec == "aeb") return std::make_unique<AebAgent>(aeb);
  if (spec == "random") return std::make_unique<RandomAgent>(0);
  if (spec.rfind("random:", 0) == 0) {
    return std::make_unique<RandomAgent>(std::stoull(spec.substr(7)));
  }
  if (spec.rfind("td3:", 0) == 0) {
    return Td3Agent::from_file(spec.substr(4));
  }
  throw std::invalid_argument("unknown agent spec: " + spec +
                              " (expected td3:<path>, idm, aeb, or random[:seed])");
}

}  // namespace ixsim
