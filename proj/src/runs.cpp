#include "ixsim/runs.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace ixsim {

namespace fs = std::filesystem;

Turn task_from_string(const std::string& s) {
  if (s == "left") return Turn::Left;
  if (s == "right") return Turn::Right;
  if (s == "straight") return Turn::Straight;
  throw std::invalid_argument("unknown task: " + s + " (expected left, right, or straight)");
}

ScenarioInstance parse_scenario_spec(const RunConfig& cfg, const std::string& spec) {
  const auto first = spec.find(':');
  if (first == std::string::npos) {
    throw std::invalid_argument("bad scenario spec: " + spec +
                                " (expected det:<A-E>:<V>,<d> | train:<task> | sto:<task>)");
  }
  const std::string kind = spec.substr(0, first);
  const std::string rest = spec.substr(first + 1);
  if (kind == "train") {
    return ScenarioInstance{training_scenario_for(task_from_string(rest),
                                                  cfg.scenario_defaults())};
  }
  if (kind == "sto") {
    return ScenarioInstance{cfg.stochastic_config(task_from_string(rest))};
  }
  if (kind == "det") {
    const auto second = rest.find(':');
    const auto comma = rest.find(',', second == std::string::npos ? 0 : second);
    if (second == std::string::npos || comma == std::string::npos) {
      throw std::invalid_argument("bad deterministic spec: " + spec +
                                  " (expected det:<A-E>:<V>,<d>)");
    }
    ConcreteScenario c;
    c.functional = functional(functional_from_string(rest.substr(0, second)));
    try {
      c.speed_kmh = std::stod(rest.substr(second + 1, comma - second - 1));
      c.gap_m = std::stod(rest.substr(comma + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad deterministic cell in spec: " + spec);
    }
    return ScenarioInstance{c};
  }
  throw std::invalid_argument("bad scenario spec: " + spec);
}

Env make_env(const RunConfig& cfg, const IntersectionMap& map, const std::string& spec) {
  return Env(map, parse_scenario_spec(cfg, spec), cfg.sim, cfg.reward, cfg.scenario_defaults(),
             cfg.vehicle);
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + dir);
}

std::unique_ptr<Agent> agent_from_config(const RunConfig& cfg, const std::string& spec) {
  return make_agent(spec, cfg.idm, cfg.aeb);
}

}  // namespace

void run_train(const RunConfig& cfg, Turn task, int episodes, uint64_t seed,
               const std::string& out_dir, bool verbose) {
  ensure_dir(out_dir);
  write_config(cfg, out_dir + "/resolved.cfg");

  const IntersectionMap map = build_default_intersection(cfg.map);
  const ScenarioDefaults defaults = cfg.scenario_defaults();
  const TrainingScenario scenario = training_scenario_for(task, defaults);
  Env env(map, ScenarioInstance{scenario}, cfg.sim, cfg.reward, defaults, cfg.vehicle);
  Td3 td3(cfg.td3, seed);

  const std::string actor_path = out_dir + "/actor_" + to_string(task) + ".bin";
  const std::string curve_path = out_dir + "/curve.csv";

  LearningCurve curve;
  TrainHooks hooks;
  hooks.on_episode = [&](const CurvePoint& p) {
    curve.push_back(p);
    if (verbose && (p.episode % 100 == 0 || p.episode + 1 == episodes)) {
      std::printf("episode %d return %.1f moving_return %.1f moving_success %.3f\n", p.episode,
                  p.episode_return, p.moving_return, p.moving_success);
      std::fflush(stdout);
    }
    if ((p.episode + 1) % 500 == 0) {  // periodic checkpoint
      save_net(td3.actor(), actor_path);
      write_curve_csv(curve, curve_path);
    }
    return true;
  };
  train_td3(env, td3, cfg.td3, episodes, seed, hooks);

  save_net(td3.actor(), actor_path);
  write_curve_csv(curve, curve_path);
}

void run_eval_deterministic(const RunConfig& cfg, const std::string& agent_spec,
                            const std::vector<uint64_t>& seeds, const std::string& out_dir) {
  ensure_dir(out_dir);
  write_config(cfg, out_dir + "/resolved.cfg");
  const IntersectionMap map = build_default_intersection(cfg.map);
  auto agent = agent_from_config(cfg, agent_spec);
  const TestReport report = run_deterministic(
      map, cfg.eval_settings(), *agent,
      {FunctionalId::A, FunctionalId::B, FunctionalId::C, FunctionalId::D, FunctionalId::E},
      seeds);
  emit_report(report, out_dir);
}

void run_eval_stochastic(const RunConfig& cfg, const std::string& agent_spec, int episodes,
                         uint64_t seed, const std::string& out_dir) {
  ensure_dir(out_dir);
  write_config(cfg, out_dir + "/resolved.cfg");
  const IntersectionMap map = build_default_intersection(cfg.map);
  auto agent = agent_from_config(cfg, agent_spec);
  const TestReport report =
      run_stochastic(map, cfg.eval_settings(), *agent, cfg.stochastic_config(Turn::Left),
                     {Turn::Left, Turn::Right, Turn::Straight}, episodes, seed);
  emit_report(report, out_dir);
}

void run_sample_traffic(const RunConfig& cfg, const std::string& flow, int draws, uint64_t seed,
                        const std::string& out_dir, int bins) {
  if (draws < 1) throw std::invalid_argument("sample-traffic: draws must be >= 1");
  if (bins < 1) throw std::invalid_argument("sample-traffic: bins must be >= 1");
  ensure_dir(out_dir);
  write_config(cfg, out_dir + "/resolved.cfg");

  const FunctionalScenario& f = functional(functional_from_string(flow));
  const ScenarioDefaults d = cfg.scenario_defaults();

  OuParams ou;
  ou.theta = d.ou_theta;
  ou.tau = d.ou_tau;
  ou.mu = d.speed_kmh.midpoint();
  ou.sigma = d.speed_kmh.width() / 4.0 * std::sqrt(2.0 * d.ou_theta);
  GapSamplerParams gap{d.gap_m.lower, d.gap_m.upper, d.gap_concentration};

  Rng rng(seed);
  std::vector<double> speeds(draws), gaps(draws);
  double v = ou.mu;
  for (int i = 0; i < draws; ++i) {
    v = clipped_ou_step(v, ou, d.speed_kmh, rng);
    speeds[i] = v;
    gaps[i] = sample_gap(v, d.speed_kmh, gap, rng);
  }

  std::FILE* fs_samples = std::fopen((out_dir + "/samples.csv").c_str(), "w");
  if (!fs_samples) throw std::runtime_error("cannot write samples.csv");
  std::fprintf(fs_samples, "index,flow_route,speed_kmh,gap_m\n");
  for (int i = 0; i < draws; ++i) {
    std::fprintf(fs_samples, "%d,%s,%.17g,%.17g\n", i, to_string(f.flow_route).c_str(),
                 speeds[i], gaps[i]);
  }
  std::fclose(fs_samples);

  auto histogram = [&](const std::vector<double>& xs, double lo, double hi,
                       const std::string& path) {
    std::vector<int> counts(bins, 0);
    for (const double x : xs) {
      int b = static_cast<int>((x - lo) / (hi - lo) * bins);
      b = std::clamp(b, 0, bins - 1);
      counts[b]++;
    }
    std::FILE* fh = std::fopen(path.c_str(), "w");
    if (!fh) throw std::runtime_error("cannot write histogram: " + path);
    std::fprintf(fh, "bin_lo,bin_hi,count,frequency\n");
    for (int b = 0; b < bins; ++b) {
      const double blo = lo + (hi - lo) * b / bins;
      const double bhi = lo + (hi - lo) * (b + 1) / bins;
      std::fprintf(fh, "%.17g,%.17g,%d,%.17g\n", blo, bhi, counts[b],
                   static_cast<double>(counts[b]) / xs.size());
    }
    std::fclose(fh);
  };
  histogram(speeds, d.speed_kmh.lower, d.speed_kmh.upper, out_dir + "/speed_hist.csv");
  histogram(gaps, d.gap_m.lower, d.gap_m.upper, out_dir + "/gap_hist.csv");
}

void run_replay(const RunConfig& cfg, const std::string& scenario_id, double speed_kmh,
                double gap_m, const std::string& agent_spec, uint64_t seed,
                const std::string& out_path) {
  const IntersectionMap map = build_default_intersection(cfg.map);
  auto agent = agent_from_config(cfg, agent_spec);

  ConcreteScenario c;
  c.functional = functional(functional_from_string(scenario_id));
  c.speed_kmh = speed_kmh;
  c.gap_m = gap_m;

  Env env(map, ScenarioInstance{c}, cfg.sim, cfg.reward, cfg.scenario_defaults(), cfg.vehicle);
  env.reset(seed);

  const fs::path out(out_path);
  if (out.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(out.parent_path(), ec);
  }
  std::FILE* f = std::fopen(out_path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write replay file: " + out_path);
  std::fprintf(f, "time,vehicle_id,role,s,v,x,y,heading,reward\n");
  while (!env.done()) {
    const StepOutput step = env.step(agent->act(env));
    for (const auto& veh : env.world().vehicles) {
      const Pose pose = pose_at(map.route(veh.route), veh.s);
      std::fprintf(f, "%.17g,%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,", env.world().time, veh.id,
                   veh.role == Role::Ego ? "ego" : "social", veh.s, veh.v, pose.position.x,
                   pose.position.y, pose.heading);
      if (veh.role == Role::Ego) {
        std::fprintf(f, "%.17g\n", step.reward);
      } else {
        std::fprintf(f, "\n");
      }
    }
  }
  std::fclose(f);
}

}  // namespace ixsim
