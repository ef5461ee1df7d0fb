// Acceptance suite: one pass/fail line per benchmark criterion.
//
// Usage: ixsim_acceptance [--cli <path>] [--model <actor.bin>] [--work <dir>]
//
// The CLI path feeds the command-level determinism checks; the model path
// feeds the trained-agent ordering check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ixsim/agents.hpp"
#include "ixsim/config.hpp"
#include "ixsim/eval.hpp"
#include "ixsim/td3.hpp"
#include "test_util.hpp"

using namespace ixsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli = "ixsim";
std::string g_model = "models/actor_straight.bin";
std::string g_work = "acceptance_work";

struct Outcome2 {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const IntersectionMap& default_map() {
  static const IntersectionMap map = build_default_intersection();
  return map;
}

// ---- 1. OU stationarity ---------------------------------------------------

Outcome2 criterion_ou_stationarity() {
  const OuParams p{0.5, 25.0, 7.5, 1.0};
  const double stat_std = p.sigma / std::sqrt(2.0 * p.theta);
  const int n = 100000;
  Rng rng(42);
  const auto t0 = Clock::now();
  testutil::SampleStats stats;
  double v = p.mu;
  for (int i = 0; i < n; ++i) {
    v = ou_step(v, p, rng);
    stats.add(v);
  }
  const double secs = seconds_since(t0);
  const double mean_err = std::abs(stats.mean() - p.mu);
  const double mean_tol = 3.0 * stat_std / std::sqrt(static_cast<double>(n));
  const double var_expected = stat_std * stat_std;
  const double var_err = std::abs(stats.variance() - var_expected) / var_expected;
  std::ostringstream detail;
  detail << "mean err " << mean_err << " (tol " << mean_tol << "), var rel err " << var_err
         << " (tol 0.05), " << secs << " s";
  return {mean_err <= mean_tol && var_err <= 0.05 && secs < 1.0, detail.str()};
}

// ---- 2. Clipping correctness ----------------------------------------------

Outcome2 criterion_clipping() {
  const ParameterRange r{10.0, 40.0};
  const OuParams p{0.5, r.midpoint(), 7.5, 1.0};
  const double stat_std = p.sigma / std::sqrt(2.0 * p.theta);
  const int n = 1000000;
  const int n_bins = 40;
  std::vector<int> bins(n_bins, 0);
  Rng rng(2024);
  const auto t0 = Clock::now();
  double v = r.midpoint();
  int in_range = 0;
  for (int i = 0; i < n; ++i) {
    v = clipped_ou_step(v, p, r, rng);
    if (r.contains(v)) ++in_range;
    const int b = std::min(n_bins - 1, static_cast<int>((v - r.lower) / r.width() * n_bins));
    bins[b]++;
  }
  const double secs = seconds_since(t0);

  // analytic mass of the boundary bins under the truncated stationary law
  const double z_total = testutil::normal_cdf(r.upper, p.mu, stat_std) -
                         testutil::normal_cdf(r.lower, p.mu, stat_std);
  const double w = r.width() / n_bins;
  bool bins_ok = true;
  double worst_ratio = 0.0;
  for (const int b : {0, n_bins - 1}) {
    const double lo = r.lower + b * w;
    const double analytic = (testutil::normal_cdf(lo + w, p.mu, stat_std) -
                             testutil::normal_cdf(lo, p.mu, stat_std)) /
                            z_total;
    const double empirical = static_cast<double>(bins[b]) / n;
    worst_ratio = std::max(worst_ratio, empirical / analytic);
    bins_ok = bins_ok && empirical <= 2.0 * analytic;
  }
  std::ostringstream detail;
  detail << in_range << "/" << n << " in range, worst boundary-bin ratio " << worst_ratio
         << " (cap 2), " << secs << " s";
  return {in_range == n && bins_ok && secs < 5.0, detail.str()};
}

// ---- 3. Truncated-Gaussian gaps --------------------------------------------

Outcome2 criterion_gaps() {
  const ParameterRange speed{10.0, 40.0};
  const GapSamplerParams g{16.0, 50.0, 4.0};
  if (gap_mean(speed.lower, speed, g) != g.d_min || gap_mean(speed.upper, speed, g) != g.d_max) {
    return {false, "gap_mean endpoint mapping broken"};
  }
  const double speed_tested = 18.0;
  Rng rng(99);
  testutil::SampleStats stats;
  int in_range = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double d = sample_gap(speed_tested, speed, g, rng);
    if (d >= g.d_min && d <= g.d_max) ++in_range;
    stats.add(d);
  }
  const double expected = testutil::truncated_normal_mean(gap_mean(speed_tested, speed, g),
                                                          g.stddev(), g.d_min, g.d_max);
  const double rel_err = std::abs(stats.mean() - expected) / expected;
  std::ostringstream detail;
  detail << in_range << "/" << n << " in range, mean " << stats.mean() << " vs quadrature "
         << expected << " (rel err " << rel_err << ", tol 0.01)";
  return {in_range == n && rel_err <= 0.01, detail.str()};
}

// ---- 4. IDM oracle ----------------------------------------------------------

Outcome2 criterion_idm() {
  IdmParams hand;
  hand.v0 = 15.0;
  hand.s0 = 2.0;
  hand.T = 1.5;
  hand.a = 1.5;
  hand.b = 2.0;
  hand.delta = 4.0;
  const double accel = idm_accel(10.0, LeadInfo{17.0, 0.0, 2}, hand);
  if (std::abs(accel - (-0.296)) > 1e-3) {
    return {false, "hand-substitution example off: " + std::to_string(accel)};
  }

  IdmParams p;
  Rng rng(31);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform(0.0, 15.0);
    std::optional<LeadInfo> lead;
    if (rng.uniform() < 0.8) {
      lead = LeadInfo{rng.uniform(0.0, 60.0), rng.uniform(-10.0, 10.0), 2};
    }
    const IdmTerms t = idm_decompose(v, lead, p);
    worst = std::max(worst, std::abs(t.free + t.interaction - idm_accel(v, lead, p)));
  }
  if (worst > 1e-12) {
    return {false, "decomposition identity residual " + std::to_string(worst)};
  }

  // two-vehicle platoon on a long straight route
  const IntersectionMap long_map = build_default_intersection({3.5, 80.0});
  const SimConfig cfg;
  const Movement m{ArmId::West, Turn::Straight};
  IdmParams leader_params;
  leader_params.v0 = 2.0;
  IdmParams follower_params;
  follower_params.v0 = 15.0;
  WorldState world;
  world.map = &long_map;
  VehicleState leader;
  leader.id = 1;
  leader.route = m;
  leader.s = 30.0;
  leader.v = 2.0;
  VehicleState follower;
  follower.id = 2;
  follower.route = m;
  follower.s = 0.0;
  world.vehicles = {leader, follower};
  const BehaviorProfile lp{ProfileKind::Idm, {}, leader_params, false};
  const BehaviorProfile fp{ProfileKind::Idm, {}, follower_params, false};
  double f_accel = 1e9;
  double settle_time = -1.0;
  for (int step = 0; step < 600; ++step) {
    CommandMap commands;
    commands[1] = std::clamp(policy_step(world, world.vehicles[0], lp, 0.0, cfg), -cfg.b_max,
                             cfg.a_max);
    f_accel = std::clamp(policy_step(world, world.vehicles[1], fp, 0.0, cfg), -cfg.b_max,
                         cfg.a_max);
    commands[2] = f_accel;
    advance_world(world, commands, cfg);
    if (settle_time < 0.0 && std::abs(f_accel) < 0.01) settle_time = world.time;
  }
  std::ostringstream detail;
  detail << "identity residual " << worst << ", hand example " << accel
         << ", platoon |accel| " << std::abs(f_accel) << " settled at " << settle_time << " s";
  return {std::abs(f_accel) < 0.01 && settle_time > 0.0 && settle_time <= 60.0, detail.str()};
}

// ---- 5. AEB safety bound -----------------------------------------------------

Outcome2 criterion_aeb_bound() {
  const IntersectionMap long_map = build_default_intersection({3.5, 80.0});
  const SimConfig cfg;
  const Movement m{ArmId::West, Turn::Straight};
  bool full_safe = true;
  bool halved_collides = false;
  for (const double v_max : {5.0, 10.0, 15.0}) {
    for (const double scale : {1.0, 0.5}) {
      AebParams p;
      p.detect_length =
          scale * (v_max * v_max / (2.0 * p.brake) + v_max * cfg.dt + 2.25 + 2.25);
      BehaviorProfile prof;
      prof.kind = ProfileKind::SpeedTrackAeb;
      prof.aeb = p;
      WorldState world;
      world.map = &long_map;
      VehicleState subject;
      subject.id = 1;
      subject.route = m;
      VehicleState obstacle;
      obstacle.id = 2;
      obstacle.route = m;
      obstacle.s = 120.0;
      world.vehicles = {subject, obstacle};
      bool collided = false;
      for (int step = 0; step < 600 && !collided; ++step) {
        CommandMap commands;
        commands[2] = 0.0;
        commands[1] = std::clamp(policy_step(world, world.vehicles[0], prof, v_max, cfg),
                                 -cfg.b_max, cfg.a_max);
        advance_world(world, commands, cfg);
        collided = boxes_overlap(footprint(world.vehicles[0], long_map, 1.0),
                                 footprint(world.vehicles[1], long_map, 1.0));
      }
      if (scale == 1.0) {
        full_safe = full_safe && !collided;
      } else {
        halved_collides = halved_collides || collided;
      }
    }
  }
  std::ostringstream detail;
  detail << (full_safe ? "no contact at bound L" : "CONTACT at bound L") << "; halved L "
         << (halved_collides ? "produces a collision" : "never collides");
  return {full_safe && halved_collides, detail.str()};
}

// ---- 6. Collision oracle ------------------------------------------------------

Outcome2 criterion_collision_oracle() {
  Rng rng(20240811);
  int checked = 0;
  int disagreements = 0;
  for (int i = 0; i < 1000; ++i) {
    OrientedBox a{{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)},
                  rng.uniform(-M_PI, M_PI),
                  {rng.uniform(0.3, 2.5), rng.uniform(0.3, 2.5)}};
    OrientedBox b{{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)},
                  rng.uniform(-M_PI, M_PI),
                  {rng.uniform(0.3, 2.5), rng.uniform(0.3, 2.5)}};
    if (std::abs(sat_margin(a, b)) < 0.02) continue;  // boundary band
    ++checked;
    if (boxes_overlap(a, b) != testutil::boxes_overlap_sampled(a, b)) ++disagreements;
  }
  std::ostringstream detail;
  detail << checked << " pairs outside the 2 cm band, " << disagreements << " disagreements";
  return {checked >= 800 && disagreements == 0, detail.str()};
}

// ---- 7. Reward accounting ------------------------------------------------------

Outcome2 criterion_rewards() {
  const auto& map = default_map();
  ScenarioDefaults no_warmup;
  no_warmup.warmup_s = 0.0;

  // success accounting under a generous clock so every step is charged -0.1
  RewardConfig rcfg;
  rcfg.t_max = 60.0;
  TrainingScenario empty;
  empty.ego_task = {kEgoArm, Turn::Left};
  Env env(map, ScenarioInstance{empty}, SimConfig{}, rcfg, no_warmup);
  env.reset(1);
  double total = 0.0;
  double expected = 0.0;
  int calls = 0;
  StepOutput out;
  while (true) {
    out = env.step({1.0, 0.0});
    total += out.reward;
    ++calls;
    if (out.done) break;
    expected += -0.1;
    if (calls > 5000) return {false, "success episode never terminated"};
  }
  if (out.outcome != Outcome::Success || out.reward != 150.0) {
    return {false, "terminal success reward wrong"};
  }
  const int k = calls - 1;  // non-terminal steps, all within 0.5 * t_max
  if ((k + 1) * SimConfig{}.dt > 0.5 * rcfg.t_max) {
    return {false, "success fell outside the charged half of the episode"};
  }
  expected += 150.0;
  const double closed_form = 150.0 - 0.1 * k;
  if (total != expected || std::abs(total - closed_form) > 1e-9) {
    return {false, "success total " + std::to_string(total) + " != 150 - 0.1k"};
  }

  // collision terminal value
  SetupBuilder collide_builder = [](const IntersectionMap& m, Rng&) {
    EpisodeSetup setup;
    setup.world.map = &m;
    setup.ego_task = {kEgoArm, Turn::Straight};
    VehicleState blocker;
    blocker.id = 1;
    blocker.route = {kEgoArm, Turn::Straight};
    blocker.s = 25.0;
    setup.world.vehicles.push_back(blocker);
    setup.drivers[1] = SocialDriver{BehaviorProfile{}, 0.0};
    return setup;
  };
  Env collide_env(map, collide_builder, SimConfig{}, RewardConfig{}, no_warmup);
  collide_env.reset(0);
  StepOutput cout_;
  do {
    cout_ = collide_env.step({1.0, 0.0});
  } while (!cout_.done);
  if (cout_.outcome != Outcome::Collision || cout_.reward != -350.0) {
    return {false, "collision terminal reward wrong"};
  }

  // timeout terminal value and per-step split at 0.5 * t_max
  Env idle_env(map, ScenarioInstance{empty}, SimConfig{}, RewardConfig{}, no_warmup);
  idle_env.reset(2);
  StepOutput tout;
  int timeout_calls = 0;
  double late_sum = 0.0;
  do {
    const double t_before = idle_env.world().time;
    tout = idle_env.step({0.0, 1.0});
    ++timeout_calls;
    if (!tout.done && t_before > 0.5 * RewardConfig{}.t_max) late_sum += std::abs(tout.reward);
  } while (!tout.done);
  if (tout.outcome != Outcome::Timeout || tout.reward != -150.0) {
    return {false, "timeout terminal reward wrong"};
  }
  if (late_sum != 0.0) return {false, "late steps earned nonzero reward"};

  std::ostringstream detail;
  detail << "success total 150 - 0.1*" << k << " exact; collision -350; timeout -150 after "
         << timeout_calls << " steps";
  return {true, detail.str()};
}

// ---- 8. Observation contract -----------------------------------------------------

Outcome2 criterion_observation() {
  const auto& map = default_map();
  if (std::tuple_size<Observation>::value != 34) return {false, "observation length != 34"};

  Rng rng(404);
  for (int trial = 0; trial < 500; ++trial) {
    WorldState world;
    world.map = &map;
    VehicleState ego;
    ego.id = 0;
    ego.route = Movement::from_index(static_cast<int>(rng.uniform_int(kNumMovements)));
    ego.s = rng.uniform(0.0, map.route(ego.route).length());
    ego.v = rng.uniform(0.0, 9.0);
    ego.role = Role::Ego;
    world.vehicles.push_back(ego);
    const int n_social = static_cast<int>(rng.uniform_int(12));
    for (int i = 0; i < n_social; ++i) {
      VehicleState veh;
      veh.id = i + 1;
      veh.route = Movement::from_index(static_cast<int>(rng.uniform_int(kNumMovements)));
      veh.s = rng.uniform(0.0, map.route(veh.route).length());
      veh.v = rng.uniform(0.0, 12.0);
      world.vehicles.push_back(veh);
    }
    const Observation obs = observe(world, map, world.vehicles[0]);
    const Pose ego_pose = pose_at(map.route(ego.route), ego.s);
    std::vector<double> dists;
    for (const auto& veh : world.vehicles) {
      if (veh.id == 0) continue;
      dists.push_back((pose_at(map.route(veh.route), veh.s).position - ego_pose.position).norm());
    }
    std::sort(dists.begin(), dists.end());
    for (int slot = 0; slot < std::min<int>(kNumSocialSlots, dists.size()); ++slot) {
      const double* block = obs.data() + kEgoBlockDim + slot * kSocialBlockDim;
      if (std::abs(std::hypot(block[2], block[3]) - dists[slot]) > 1e-9 * (1.0 + dists[slot])) {
        return {false, "nearest-5 mismatch on world " + std::to_string(trial)};
      }
    }
    for (int slot = static_cast<int>(dists.size()); slot < kNumSocialSlots; ++slot) {
      const double* block = obs.data() + kEgoBlockDim + slot * kSocialBlockDim;
      if (block[2] != kPaddingPosition || block[3] != kPaddingPosition) {
        return {false, "padding sentinel missing"};
      }
    }
  }

  // rigid-transform invariance: exact quarter-turn rotations plus translations
  auto rotate_quarter = [](const Vec2& p, int k) {
    Vec2 q = p;
    for (int i = 0; i < k; ++i) q = Vec2{-q.y, q.x};
    return q;
  };
  double worst = 0.0;
  for (const auto& [turns, tx, ty] :
       {std::tuple{1, 12.0, -7.0}, {2, -3.5, 90.25}, {0, 1000.0, -2000.0}, {3, 0.125, 0.0}}) {
    IntersectionMap moved = map;
    for (auto& route : moved.routes) {
      for (auto& p : route.points) p = rotate_quarter(p, turns) + Vec2{tx, ty};
      for (auto& h : route.headings) h = wrap_angle(h + turns * M_PI / 2.0);
    }
    const Vec2 a = rotate_quarter(map.junction_box.lo, turns) + Vec2{tx, ty};
    const Vec2 b = rotate_quarter(map.junction_box.hi, turns) + Vec2{tx, ty};
    moved.junction_box = Aabb{{std::min(a.x, b.x), std::min(a.y, b.y)},
                              {std::max(a.x, b.x), std::max(a.y, b.y)}};
    Rng wrng(777);
    for (int trial = 0; trial < 50; ++trial) {
      WorldState world;
      world.map = &map;
      VehicleState ego;
      ego.id = 0;
      ego.route = Movement::from_index(static_cast<int>(wrng.uniform_int(kNumMovements)));
      ego.s = wrng.uniform(0.0, map.route(ego.route).length());
      ego.v = wrng.uniform(0.0, 9.0);
      ego.role = Role::Ego;
      world.vehicles.push_back(ego);
      for (int i = 0; i < 6; ++i) {
        VehicleState veh;
        veh.id = i + 1;
        veh.route = Movement::from_index(static_cast<int>(wrng.uniform_int(kNumMovements)));
        veh.s = wrng.uniform(0.0, map.route(veh.route).length());
        veh.v = wrng.uniform(0.0, 12.0);
        world.vehicles.push_back(veh);
      }
      const Observation base = observe(world, map, world.vehicles[0]);
      WorldState moved_world = world;
      moved_world.map = &moved;
      const Observation obs = observe(moved_world, moved, moved_world.vehicles[0]);
      for (int i = 0; i < kObsDim; ++i) {
        worst = std::max(worst, std::abs(base[i] - obs[i]));
      }
    }
  }
  std::ostringstream detail;
  detail << "500 nearest-5 worlds OK, rigid-transform worst deviation " << worst;
  return {worst <= 1e-9, detail.str()};
}

// ---- 9. Gradient check --------------------------------------------------------------

/// Central differences sit a kink-width away from every ReLU boundary, or
/// the O(h^2) error claim breaks; resample inputs that straddle a kink.
bool away_from_relu_kinks(const PolicyNet& net, const Mat& obs, const Mat* act,
                          double margin = 5e-3) {
  Mat ego_in(obs.rows, 4), soc_in(obs.rows, 30);
  for (int i = 0; i < obs.rows; ++i) {
    for (int j = 0; j < 4; ++j) ego_in.at(i, j) = obs.at(i, j);
    for (int j = 0; j < 30; ++j) soc_in.at(i, j) = obs.at(i, 4 + j);
  }
  auto clean = [margin](const Mat& m) {
    for (const double v : m.a) {
      if (std::abs(v) < margin) return false;
    }
    return true;
  };
  Mat e1, e2, s1, s2, h1, cat, out;
  net.ego1.forward(ego_in, e1);
  if (!clean(e1)) return false;
  Mat e1r = e1;
  relu_forward(e1r);
  net.ego2.forward(e1r, e2);
  if (!clean(e2)) return false;
  net.soc1.forward(soc_in, s1);
  if (!clean(s1)) return false;
  Mat s1r = s1;
  relu_forward(s1r);
  net.soc2.forward(s1r, s2);
  if (!clean(s2)) return false;
  Mat e2r = e2, s2r = s2;
  relu_forward(e2r);
  relu_forward(s2r);
  cat.resize(obs.rows, 2 * net.hidden_dim() + net.action_dim());
  for (int i = 0; i < obs.rows; ++i) {
    for (int j = 0; j < net.hidden_dim(); ++j) {
      cat.at(i, j) = e2r.at(i, j);
      cat.at(i, net.hidden_dim() + j) = s2r.at(i, j);
    }
    for (int j = 0; j < net.action_dim(); ++j) {
      cat.at(i, 2 * net.hidden_dim() + j) = act->at(i, j);
    }
  }
  net.head1.forward(cat, h1);
  return clean(h1);
}

Outcome2 criterion_gradients() {
  double worst = 0.0;
  int checked_nets = 0;
  uint64_t draw = 0;
  while (checked_nets < 10) {
    const uint64_t seed = draw++;
    Rng rng(1000 + seed);
    const bool actor = checked_nets % 2 == 0;
    PolicyNet net(4, 30, actor ? 0 : 2, actor ? 2 : 1,
                  5 + static_cast<int>(checked_nets % 3), rng);
    Mat obs(3, 34);
    for (auto& v : obs.a) v = rng.uniform(-1.0, 1.0);
    Mat act(3, 2);
    for (auto& v : act.a) v = rng.uniform(0.0, 1.0);
    Mat g(3, net.out_dim());
    for (auto& v : g.a) v = rng.uniform(-1.0, 1.0);

    if (!away_from_relu_kinks(net, obs, actor ? nullptr : &act)) continue;
    ++checked_nets;

    PolicyNet::Workspace ws;
    Mat out;
    net.forward(obs, actor ? nullptr : &act, out, ws);
    net.zero_grad();
    net.backward(obs, actor ? nullptr : &act, g, ws);

    auto loss = [&] {
      PolicyNet::Workspace w2;
      Mat o;
      net.forward(obs, actor ? nullptr : &act, o, w2);
      double l = 0.0;
      for (size_t i = 0; i < o.a.size(); ++i) l += o.a[i] * g.a[i];
      return l;
    };
    const double h = 1e-4;
    for (Linear* layer : net.layers()) {
      auto probe = [&](std::vector<double>& params, const std::vector<double>& grads) {
        for (size_t k = 0; k < params.size(); ++k) {
          const double saved = params[k];
          params[k] = saved + h;
          const double up = loss();
          params[k] = saved - h;
          const double down = loss();
          params[k] = saved;
          const double fd = (up - down) / (2.0 * h);
          const double denom = std::max({1.0, std::abs(fd), std::abs(grads[k])});
          worst = std::max(worst, std::abs(fd - grads[k]) / denom);
        }
      };
      probe(layer->w, layer->gw);
      probe(layer->b, layer->gb);
    }
  }
  std::ostringstream detail;
  detail << checked_nets << " networks (from " << draw
         << " draws, kink-straddling inputs resampled), worst relative error " << worst
         << " (tol 1e-4)";
  return {worst < 1e-4, detail.str()};
}

// ---- 10. TD3 sanity -------------------------------------------------------------------

Outcome2 criterion_td3_bandit() {
  Td3Config cfg;
  cfg.batch_size = 64;
  cfg.hidden = 64;
  cfg.lr = 1e-3;
  Td3 td3(cfg, 11);
  Rng enc(21);
  Observation s0, s1;
  for (auto& v : s0) v = enc.uniform(-1.0, 1.0);
  for (auto& v : s1) v = enc.uniform(-1.0, 1.0);
  ReplayBuffer buf(100000);
  Rng rng(22);
  for (int i = 0; i < 4000; ++i) {
    const bool state1 = rng.uniform() < 0.5;
    Transition t;
    t.obs = state1 ? s1 : s0;
    t.action = {rng.uniform(), rng.uniform()};
    t.reward = state1 ? 1.0 : 0.0;
    t.next_obs = t.obs;
    t.done = true;
    buf.push(t);
  }
  auto q_value = [&](const Observation& obs, double a0, double a1) {
    Mat in(1, kObsDim);
    std::copy(obs.begin(), obs.end(), in.row(0));
    Mat act(1, 2);
    act.at(0, 0) = a0;
    act.at(0, 1) = a1;
    PolicyNet::Workspace ws;
    Mat out;
    td3.critic1().forward(in, &act, out, ws);
    return out.at(0, 0);
  };
  int updates = 0;
  double max_err = 1e9;
  while (updates < 5000 && max_err > 1e-2) {
    for (int i = 0; i < 250; ++i, ++updates) td3.update(buf, rng);
    max_err = 0.0;
    for (const bool state1 : {false, true}) {
      for (const double a0 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        for (const double a1 : {0.0, 0.5, 1.0}) {
          const double q = q_value(state1 ? s1 : s0, a0, a1);
          max_err = std::max(max_err, std::abs(q - (state1 ? 1.0 : 0.0)));
        }
      }
    }
  }
  std::ostringstream detail;
  detail << "max |Q - Q*| " << max_err << " after " << updates << " updates";
  return {max_err <= 1e-2 && updates <= 5000, detail.str()};
}

Outcome2 criterion_td3_no_traffic() {
  const auto t0 = Clock::now();
  TrainingScenario empty;
  empty.ego_task = {kEgoArm, Turn::Left};
  ScenarioDefaults d;  // default 5 s warm-up, no flows to warm up
  Env env(default_map(), ScenarioInstance{empty}, SimConfig{}, RewardConfig{}, d);
  Td3Config cfg;
  cfg.batch_size = 64;
  cfg.update_every = 2;
  cfg.warmup_steps = 1000;
  cfg.success_stop = 0.9;
  Td3 td3(cfg, 7);
  const TrainResult result = train_td3(env, td3, cfg, 3000, 7);
  const double secs = seconds_since(t0);
  const double moving = result.curve.empty() ? 0.0 : result.curve.back().moving_success;
  std::ostringstream detail;
  detail << "moving success " << moving << " after " << result.curve.size() << " episodes, "
         << secs << " s (cap 600)";
  return {moving >= 0.9 && result.curve.size() <= 3000 && secs < 600.0, detail.str()};
}

// ---- 11. Benchmark protocol shape ------------------------------------------------------

Outcome2 criterion_protocol_shape() {
  LogicalScenario l;
  l.functional = functional(FunctionalId::A);
  const auto grid = enumerate_grid(l);
  if (grid.size() != 288) return {false, "grid size " + std::to_string(grid.size())};
  int n_speeds = 0, n_gaps = 0;
  for (const auto& c : grid) {
    if (c.gap_m == 16.0) ++n_speeds;
    if (c.speed_kmh == 10.0) ++n_gaps;
    if (std::fmod(c.speed_kmh, 2.0) != 0.0 || std::fmod(c.gap_m, 2.0) != 0.0) {
      return {false, "off-lattice cell"};
    }
  }
  if (n_speeds != 16 || n_gaps != 18) {
    return {false, "lattice is not 16 speeds x 18 gaps"};
  }

  TestReport synthetic;
  synthetic.kind = TestReport::Kind::Deterministic;
  for (const char* id : {"A", "B", "C", "D", "E"}) {
    ReportRow row;
    row.id = id;
    row.metrics.successes = 1;
    row.metrics.success_time_sum = 5.0;
    synthetic.rows.push_back(row);
  }
  const auto grouped = group_rows_by_task(synthetic);
  const bool spans_ok = grouped.size() == 3 && grouped[0].id == "left" &&
                        grouped[0].metrics.total() == 2 && grouped[1].id == "right" &&
                        grouped[1].metrics.total() == 1 && grouped[2].id == "straight" &&
                        grouped[2].metrics.total() == 2;
  std::ostringstream detail;
  detail << "288 cells (16 x 18), grouping spans (A,B | C | D,E) "
         << (spans_ok ? "match" : "BROKEN");
  return {spans_ok, detail.str()};
}

// ---- 12. Qualitative ordering -----------------------------------------------------------

Outcome2 criterion_ordering() {
  if (!fs::exists(g_model)) {
    return {false, "trained actor not found at " + g_model};
  }
  RunConfig cfg;
  const EvalSettings settings = cfg.eval_settings();
  auto td3_agent = Td3Agent::from_file(g_model);
  IdmAgent idm(cfg.idm);
  AebAgent aeb(cfg.aeb);

  const int n = 500;
  const uint64_t seed = 4242;
  auto rate = [&](Agent& agent) {
    const TestReport report = run_stochastic(default_map(), settings, agent,
                                             cfg.stochastic_config(Turn::Straight),
                                             {Turn::Straight}, n, seed);
    return report.rows[0].metrics.success_rate_pct();
  };
  const double td3_rate = rate(*td3_agent);
  const double idm_rate = rate(idm);
  const double aeb_rate = rate(aeb);
  std::ostringstream detail;
  detail << "going-straight stochastic success %: td3 " << td3_rate << ", idm " << idm_rate
         << ", aeb " << aeb_rate << " (n=" << n << ")";
  return {td3_rate > idm_rate && td3_rate > aeb_rate, detail.str()};
}

// ---- 13. Command determinism ---------------------------------------------------------------

bool run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& mismatch) {
  std::vector<fs::path> rel;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (entry.is_regular_file()) rel.push_back(fs::relative(entry.path(), a));
  }
  std::sort(rel.begin(), rel.end());
  std::vector<fs::path> rel_b;
  for (const auto& entry : fs::recursive_directory_iterator(b)) {
    if (entry.is_regular_file()) rel_b.push_back(fs::relative(entry.path(), b));
  }
  std::sort(rel_b.begin(), rel_b.end());
  if (rel != rel_b) {
    mismatch = "file lists differ";
    return false;
  }
  for (const auto& r : rel) {
    std::ifstream fa(a / r, std::ios::binary);
    std::ifstream fb(b / r, std::ios::binary);
    const std::string da((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    const std::string db((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    if (da != db) {
      mismatch = r.string();
      return false;
    }
  }
  return true;
}

Outcome2 criterion_determinism() {
  const fs::path work = fs::path(g_work) / "determinism";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"train",
       "train --task left --episodes 10 --seed 3 --quiet --set td3.batch_size=32 "
       "--set td3.warmup_steps=200 --set td3.update_every=2"},
      {"eval-det", "eval-det --agent idm --seeds 0"},
      {"eval-sto", "eval-sto --agent aeb --episodes 20 --seed 5"},
      {"sample-traffic", "sample-traffic --flow A --draws 20000 --seed 9"},
  };
  for (const auto& [name, args] : commands) {
    for (const char* round : {"r1", "r2"}) {
      const std::string out = (work / (name + "_" + round)).string();
      if (!run_cli(args + " --out " + out)) {
        return {false, name + " failed to run"};
      }
    }
    std::string mismatch;
    if (!dirs_identical(work / (name + "_r1"), work / (name + "_r2"), mismatch)) {
      return {false, name + " outputs differ: " + mismatch};
    }
  }
  // replay writes a single file
  for (const char* round : {"r1", "r2"}) {
    const std::string out = (work / (std::string("replay_") + round + ".csv")).string();
    if (!run_cli("replay --scenario A --cell 20,30 --agent idm --seed 4 --out " + out)) {
      return {false, "replay failed to run"};
    }
  }
  std::ifstream ra(work / "replay_r1.csv", std::ios::binary);
  std::ifstream rb(work / "replay_r2.csv", std::ios::binary);
  const std::string da((std::istreambuf_iterator<char>(ra)), std::istreambuf_iterator<char>());
  const std::string db((std::istreambuf_iterator<char>(rb)), std::istreambuf_iterator<char>());
  if (da != db || da.empty()) return {false, "replay outputs differ"};
  return {true, "train, eval-det, eval-sto, sample-traffic, replay byte-identical twice"};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") g_cli = argv[i + 1];
    if (flag == "--model") g_model = argv[i + 1];
    if (flag == "--work") g_work = argv[i + 1];
  }
  fs::create_directories(g_work);

  struct Criterion {
    const char* name;
    std::function<Outcome2()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1. OU stationarity (mean within 3 SE, variance within 5%, < 1 s)",
       criterion_ou_stationarity},
      {"2. Clipped OU: 1e6 in-range draws, no boundary spike, < 5 s", criterion_clipping},
      {"3. Truncated gaps: range, 1% mean vs quadrature, exact endpoints", criterion_gaps},
      {"4. IDM: decomposition identity, hand example, platoon settles", criterion_idm},
      {"5. AEB stopping bound holds; halved detection breaks it", criterion_aeb_bound},
      {"6. Oriented-box overlap matches 1 cm sampling oracle", criterion_collision_oracle},
      {"7. Event rewards exact (-350/+150/-150, -0.1 steps)", criterion_rewards},
      {"8. Observation: 34-dim, nearest-5, rigid-transform invariant", criterion_observation},
      {"9. Backprop matches central differences (rel err < 1e-4)", criterion_gradients},
      {"10a. TD3 bandit Q within 1e-2 in <= 5000 updates", criterion_td3_bandit},
      {"10b. No-traffic left turn: moving success >= 0.9 in <= 3000 episodes",
       criterion_td3_no_traffic},
      {"11. Grid protocol: 288 cells per scenario, Table-style grouping",
       criterion_protocol_shape},
      {"12. Trained TD3 beats IDM and AEB on stochastic going-straight", criterion_ordering},
      {"13. CLI commands bit-reproducible under fixed seeds", criterion_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome2 result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s — %s\n", result.pass ? "PASS" : "FAIL", c.name,
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
