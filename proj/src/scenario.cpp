#include "ixsim/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace ixsim {

std::string to_string(FunctionalId id) {
  static const char* names[] = {"A", "B", "C", "D", "E"};
  return names[static_cast<int>(id)];
}

FunctionalId functional_from_string(const std::string& s) {
  if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'E') {
    return static_cast<FunctionalId>(s[0] - 'A');
  }
  if (s.size() == 1 && s[0] >= 'a' && s[0] <= 'e') {
    return static_cast<FunctionalId>(s[0] - 'a');
  }
  throw std::invalid_argument("unknown functional scenario: " + s);
}

const std::array<FunctionalScenario, 5>& functional_catalog() {
  static const std::array<FunctionalScenario, 5> catalog = {{
      {FunctionalId::A,
       {kEgoArm, Turn::Left},
       {opposing_arm(kEgoArm), Turn::Straight},
       "turning left vs opposing straight flow"},
      {FunctionalId::B,
       {kEgoArm, Turn::Left},
       {opposing_arm(kEgoArm), Turn::Right},
       "turning left vs opposing right-turn flow"},
      {FunctionalId::C,
       {kEgoArm, Turn::Right},
       {left_arm_of(kEgoArm), Turn::Straight},
       "turning right vs straight flow from the left"},
      {FunctionalId::D,
       {kEgoArm, Turn::Straight},
       {left_arm_of(kEgoArm), Turn::Straight},
       "going straight vs straight flow from the left"},
      {FunctionalId::E,
       {kEgoArm, Turn::Straight},
       {opposing_arm(kEgoArm), Turn::Left},
       "going straight vs opposing left-turn flow"},
  }};
  return catalog;
}

const FunctionalScenario& functional(FunctionalId id) {
  return functional_catalog()[static_cast<int>(id)];
}

std::vector<ConcreteScenario> enumerate_grid(const LogicalScenario& l) {
  std::vector<ConcreteScenario> out;
  const int nv = static_cast<int>(std::round(l.speed_kmh.width() / l.step)) + 1;
  const int nd = static_cast<int>(std::round(l.gap_m.width() / l.step)) + 1;
  out.reserve(static_cast<size_t>(nv) * nd);
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nd; ++j) {
      ConcreteScenario c;
      c.functional = l.functional;
      c.speed_kmh = l.speed_kmh.lower + i * l.step;
      c.gap_m = l.gap_m.lower + j * l.step;
      out.push_back(c);
    }
  }
  return out;
}

namespace {

TrafficFlowSpec base_flow(Movement route, const ScenarioDefaults& d) {
  TrafficFlowSpec flow;
  flow.route = route;
  flow.vehicle_dims = d.social_dims;
  flow.behavior.kind = ProfileKind::SpeedTrackAeb;
  flow.behavior.aeb = d.social_aeb;
  return flow;
}

OuKinetics ou_kinetics(const ScenarioDefaults& d) {
  OuKinetics k;
  k.speed_range_kmh = d.speed_kmh;
  k.ou.theta = d.ou_theta;
  k.ou.tau = d.ou_tau;
  k.ou.mu = d.speed_kmh.midpoint();
  // stationary std of width/4 puts ~95% of the unclipped mass inside range
  k.ou.sigma = d.speed_kmh.width() / 4.0 * std::sqrt(2.0 * d.ou_theta);
  k.gap.d_min = d.gap_m.lower;
  k.gap.d_max = d.gap_m.upper;
  k.gap.concentration = d.gap_concentration;
  return k;
}

EpisodeSetup make_setup(const IntersectionMap& map, Movement ego_task,
                        std::vector<TrafficFlowSpec> flows, const Rng& rng) {
  EpisodeSetup setup;
  setup.world.map = &map;
  setup.world.time = 0.0;
  setup.ego_task = ego_task;
  uint64_t stream = 0;
  for (auto& spec : flows) {
    FlowRuntime rt;
    rt.spec = std::move(spec);
    if (const auto* ou = std::get_if<OuKinetics>(&rt.spec.kinetics)) {
      rt.spawner.last_ou_value = ou->ou.mu;
    }
    rt.rng = rng.fork(stream++);
    setup.flows.push_back(std::move(rt));
  }
  return setup;
}

}  // namespace

EpisodeSetup instantiate(const ConcreteScenario& c, const IntersectionMap& map,
                         const ScenarioDefaults& d) {
  TrafficFlowSpec flow = base_flow(c.functional.flow_route, d);
  flow.kinetics = FixedKinetics{c.speed_kmh, c.gap_m};
  return make_setup(map, c.functional.ego_task, {flow}, Rng(0));
}

TrainingScenario training_scenario_for(Turn task, const ScenarioDefaults& d) {
  TrainingScenario t;
  t.ego_task = Movement{kEgoArm, task};
  for (const auto& f : functional_catalog()) {
    if (f.ego_task.turn != task) continue;
    TrafficFlowSpec flow = base_flow(f.flow_route, d);
    flow.kinetics = ou_kinetics(d);
    t.active_flows.push_back(flow);
  }
  return t;
}

EpisodeSetup instantiate_training(const TrainingScenario& t, const IntersectionMap& map,
                                  const Rng& rng) {
  return make_setup(map, t.ego_task, t.active_flows, rng);
}

EpisodeSetup instantiate_stochastic(const StochasticConfig& s, const IntersectionMap& map,
                                    const Rng& rng, const ScenarioDefaults& d) {
  if (s.n_social_flows < 1) {
    throw std::invalid_argument("instantiate_stochastic: n_social_flows must be >= 1");
  }
  const ArmId arm_order[kNumArms] = {opposing_arm(kEgoArm), left_arm_of(kEgoArm),
                                     opposing_arm(left_arm_of(kEgoArm)), kEgoArm};
  std::vector<TrafficFlowSpec> flows;
  for (int i = 0; i < s.n_social_flows; ++i) {
    TrafficFlowSpec flow = base_flow(Movement{arm_order[i % kNumArms], Turn::Straight}, d);
    flow.random_turn = true;
    flow.kinetics = UniformKinetics{s.speed_kmh, s.gap_m};
    flow.behavior.kind = ProfileKind::Autopilot;
    flow.behavior.ignore_ego = s.ignore_ego;
    flows.push_back(flow);
  }
  return make_setup(map, s.ego_task, std::move(flows), rng);
}

}  // namespace ixsim
