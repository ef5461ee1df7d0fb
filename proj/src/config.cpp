#include "ixsim/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace ixsim {

ScenarioDefaults RunConfig::scenario_defaults() const {
  ScenarioDefaults d;
  d.speed_kmh = {speed_min_kmh, speed_max_kmh};
  d.gap_m = {gap_min_m, gap_max_m};
  d.grid_step = grid_step;
  d.warmup_s = warmup_s;
  d.ou_theta = ou_theta;
  d.ou_tau = ou_tau;
  d.gap_concentration = gap_concentration;
  d.social_aeb = aeb;
  d.social_dims = vehicle;
  return d;
}

StochasticConfig RunConfig::stochastic_config(Turn task) const {
  StochasticConfig s;
  s.ego_task = Movement{kEgoArm, task};
  s.n_social_flows = stochastic_flows;
  s.speed_kmh = {speed_min_kmh, speed_max_kmh};
  s.gap_m = {gap_min_m, gap_max_m};
  s.ignore_ego = stochastic_ignore_ego;
  return s;
}

EvalSettings RunConfig::eval_settings() const {
  EvalSettings e;
  e.sim = sim;
  e.reward = reward;
  e.defaults = scenario_defaults();
  e.ego_dims = vehicle;
  e.config_snapshot = serialize_config(*this);
  return e;
}

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error(line > 0 ? key + " (line " + std::to_string(line) + "): " + message
                                  : key + ": " + message),
      key_(std::move(key)),
      line_(line) {}

namespace {

enum class EntryType { Double, Int, Bool };

struct Entry {
  const char* key;
  EntryType type;
  void* ptr;
};

std::vector<Entry> registry(RunConfig& c) {
  return {
      {"map.lane_width", EntryType::Double, &c.map.lane_width},
      {"map.approach_length", EntryType::Double, &c.map.approach_length},
      {"sim.dt", EntryType::Double, &c.sim.dt},
      {"sim.a_max", EntryType::Double, &c.sim.a_max},
      {"sim.b_max", EntryType::Double, &c.sim.b_max},
      {"sim.speed_gain", EntryType::Double, &c.sim.speed_gain},
      {"vehicle.length", EntryType::Double, &c.vehicle.length},
      {"vehicle.width", EntryType::Double, &c.vehicle.width},
      {"vehicle.height", EntryType::Double, &c.vehicle.height},
      {"reward.step_penalty", EntryType::Double, &c.reward.step_penalty},
      {"reward.success", EntryType::Double, &c.reward.success},
      {"reward.collision", EntryType::Double, &c.reward.collision},
      {"reward.timeout", EntryType::Double, &c.reward.timeout},
      {"reward.t_max", EntryType::Double, &c.reward.t_max},
      {"reward.late_step_reward", EntryType::Double, &c.reward.late_step_reward},
      {"idm.v0", EntryType::Double, &c.idm.v0},
      {"idm.s0", EntryType::Double, &c.idm.s0},
      {"idm.T", EntryType::Double, &c.idm.T},
      {"idm.a", EntryType::Double, &c.idm.a},
      {"idm.b", EntryType::Double, &c.idm.b},
      {"idm.delta", EntryType::Double, &c.idm.delta},
      {"idm.horizon", EntryType::Double, &c.idm.horizon},
      {"aeb.detect_length", EntryType::Double, &c.aeb.detect_length},
      {"aeb.expansion", EntryType::Double, &c.aeb.expansion},
      {"aeb.brake", EntryType::Double, &c.aeb.brake},
      {"scenario.speed_min_kmh", EntryType::Double, &c.speed_min_kmh},
      {"scenario.speed_max_kmh", EntryType::Double, &c.speed_max_kmh},
      {"scenario.gap_min_m", EntryType::Double, &c.gap_min_m},
      {"scenario.gap_max_m", EntryType::Double, &c.gap_max_m},
      {"scenario.grid_step", EntryType::Double, &c.grid_step},
      {"scenario.warmup_s", EntryType::Double, &c.warmup_s},
      {"traffic.ou_theta", EntryType::Double, &c.ou_theta},
      {"traffic.ou_tau", EntryType::Double, &c.ou_tau},
      {"traffic.gap_concentration", EntryType::Double, &c.gap_concentration},
      {"stochastic.flows", EntryType::Int, &c.stochastic_flows},
      {"stochastic.ignore_ego", EntryType::Bool, &c.stochastic_ignore_ego},
      {"td3.gamma", EntryType::Double, &c.td3.gamma},
      {"td3.polyak", EntryType::Double, &c.td3.polyak},
      {"td3.policy_delay", EntryType::Int, &c.td3.policy_delay},
      {"td3.expl_noise", EntryType::Double, &c.td3.expl_noise},
      {"td3.smooth_noise", EntryType::Double, &c.td3.smooth_noise},
      {"td3.noise_clip", EntryType::Double, &c.td3.noise_clip},
      {"td3.batch_size", EntryType::Int, &c.td3.batch_size},
      {"td3.lr", EntryType::Double, &c.td3.lr},
      {"td3.buffer_capacity", EntryType::Int, reinterpret_cast<void*>(&c.td3.buffer_capacity)},
      {"td3.warmup_steps", EntryType::Int, &c.td3.warmup_steps},
      {"td3.update_every", EntryType::Int, &c.td3.update_every},
      {"td3.hidden", EntryType::Int, &c.td3.hidden},
      {"td3.curve_window", EntryType::Int, &c.td3.curve_window},
      {"td3.success_stop", EntryType::Double, &c.td3.success_stop},
      {"eval.stochastic_episodes", EntryType::Int, &c.eval_stochastic_episodes},
  };
}

void assign(const Entry& entry, const std::string& value, int line) {
  const char* text = value.c_str();
  char* end = nullptr;
  switch (entry.type) {
    case EntryType::Double: {
      const double v = std::strtod(text, &end);
      if (end == text || *end != '\0') {
        throw ConfigError(entry.key, line, "expected a number, got '" + value + "'");
      }
      *static_cast<double*>(entry.ptr) = v;
      break;
    }
    case EntryType::Int: {
      const long long v = std::strtoll(text, &end, 10);
      if (end == text || *end != '\0') {
        throw ConfigError(entry.key, line, "expected an integer, got '" + value + "'");
      }
      if (std::string(entry.key) == "td3.buffer_capacity") {
        *static_cast<size_t*>(entry.ptr) = static_cast<size_t>(v);
      } else {
        *static_cast<int*>(entry.ptr) = static_cast<int>(v);
      }
      break;
    }
    case EntryType::Bool: {
      if (value == "true") {
        *static_cast<bool*>(entry.ptr) = true;
      } else if (value == "false") {
        *static_cast<bool*>(entry.ptr) = false;
      } else {
        throw ConfigError(entry.key, line, "expected true or false, got '" + value + "'");
      }
      break;
    }
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Check {
  const char* key;
  std::function<bool(const RunConfig&)> ok;
  const char* message;
};

const std::vector<Check>& checks() {
  static const std::vector<Check> table = {
      {"map.lane_width", [](const RunConfig& c) { return c.map.lane_width > 0; }, "must be > 0"},
      {"map.approach_length", [](const RunConfig& c) { return c.map.approach_length > 0; },
       "must be > 0"},
      {"sim.dt", [](const RunConfig& c) { return c.sim.dt > 0; }, "must be > 0"},
      {"sim.a_max", [](const RunConfig& c) { return c.sim.a_max > 0; }, "must be > 0"},
      {"sim.b_max", [](const RunConfig& c) { return c.sim.b_max > 0; }, "must be > 0"},
      {"sim.speed_gain", [](const RunConfig& c) { return c.sim.speed_gain > 0; }, "must be > 0"},
      {"vehicle.length", [](const RunConfig& c) { return c.vehicle.length > 0; }, "must be > 0"},
      {"vehicle.width", [](const RunConfig& c) { return c.vehicle.width > 0; }, "must be > 0"},
      {"vehicle.height", [](const RunConfig& c) { return c.vehicle.height > 0; }, "must be > 0"},
      {"reward.t_max", [](const RunConfig& c) { return c.reward.t_max > 0; }, "must be > 0"},
      {"idm.v0", [](const RunConfig& c) { return c.idm.v0 > 0; }, "must be > 0"},
      {"idm.s0", [](const RunConfig& c) { return c.idm.s0 > 0; }, "must be > 0"},
      {"idm.T", [](const RunConfig& c) { return c.idm.T > 0; }, "must be > 0"},
      {"idm.a", [](const RunConfig& c) { return c.idm.a > 0; }, "must be > 0"},
      {"idm.b", [](const RunConfig& c) { return c.idm.b > 0; }, "must be > 0"},
      {"idm.horizon", [](const RunConfig& c) { return c.idm.horizon > 0; }, "must be > 0"},
      {"aeb.detect_length", [](const RunConfig& c) { return c.aeb.detect_length > 0; },
       "must be > 0"},
      {"aeb.expansion", [](const RunConfig& c) { return c.aeb.expansion >= 1.0; },
       "must be >= 1"},
      {"aeb.brake", [](const RunConfig& c) { return c.aeb.brake > 0; }, "must be > 0"},
      {"scenario.speed_min_kmh",
       [](const RunConfig& c) { return c.speed_min_kmh < c.speed_max_kmh; },
       "speed range must satisfy min < max"},
      {"scenario.gap_min_m", [](const RunConfig& c) { return c.gap_min_m < c.gap_max_m; },
       "gap range must satisfy min < max"},
      {"scenario.grid_step", [](const RunConfig& c) { return c.grid_step > 0; }, "must be > 0"},
      {"scenario.warmup_s", [](const RunConfig& c) { return c.warmup_s >= 0; }, "must be >= 0"},
      {"traffic.ou_theta", [](const RunConfig& c) { return c.ou_theta > 0; }, "must be > 0"},
      {"traffic.ou_tau", [](const RunConfig& c) { return c.ou_tau > 0; }, "must be > 0"},
      {"traffic.gap_concentration", [](const RunConfig& c) { return c.gap_concentration > 0; },
       "must be > 0"},
      {"stochastic.flows", [](const RunConfig& c) { return c.stochastic_flows >= 1; },
       "must be >= 1"},
      {"td3.gamma", [](const RunConfig& c) { return c.td3.gamma > 0 && c.td3.gamma < 1; },
       "must lie in (0, 1)"},
      {"td3.polyak", [](const RunConfig& c) { return c.td3.polyak > 0 && c.td3.polyak <= 1; },
       "must lie in (0, 1]"},
      {"td3.policy_delay", [](const RunConfig& c) { return c.td3.policy_delay >= 1; },
       "must be >= 1"},
      {"td3.batch_size", [](const RunConfig& c) { return c.td3.batch_size >= 1; },
       "must be >= 1"},
      {"td3.lr", [](const RunConfig& c) { return c.td3.lr > 0; }, "must be > 0"},
      {"td3.buffer_capacity", [](const RunConfig& c) { return c.td3.buffer_capacity >= 1; },
       "must be >= 1"},
      {"td3.warmup_steps", [](const RunConfig& c) { return c.td3.warmup_steps >= 0; },
       "must be >= 0"},
      {"td3.update_every", [](const RunConfig& c) { return c.td3.update_every >= 1; },
       "must be >= 1"},
      {"td3.hidden", [](const RunConfig& c) { return c.td3.hidden >= 1; }, "must be >= 1"},
      {"td3.curve_window", [](const RunConfig& c) { return c.td3.curve_window >= 1; },
       "must be >= 1"},
      {"eval.stochastic_episodes",
       [](const RunConfig& c) { return c.eval_stochastic_episodes >= 1; }, "must be >= 1"},
  };
  return table;
}

}  // namespace

void validate_config(const RunConfig& cfg) {
  for (const auto& check : checks()) {
    if (!check.ok(cfg)) throw ConfigError(check.key, 0, check.message);
  }
}

RunConfig parse_config(const std::string& path) {
  RunConfig cfg;
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  auto entries = registry(cfg);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(trim(line), line_no, "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    bool found = false;
    for (const auto& entry : entries) {
      if (key == entry.key) {
        assign(entry, value, line_no);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError(key, line_no, "unknown key");
  }
  validate_config(cfg);
  return cfg;
}

void apply_overrides(RunConfig& cfg, const Overrides& overrides) {
  RunConfig staged = cfg;  // reject without mutating on any failure
  auto entries = registry(staged);
  for (const auto& [key, value] : overrides) {
    bool found = false;
    for (const auto& entry : entries) {
      if (key == entry.key) {
        assign(entry, value, 0);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError(key, 0, "unknown key");
  }
  validate_config(staged);
  cfg = staged;
}

std::string serialize_config(const RunConfig& cfg) {
  RunConfig& mutable_cfg = const_cast<RunConfig&>(cfg);
  std::ostringstream out;
  char buf[64];
  for (const auto& entry : registry(mutable_cfg)) {
    out << entry.key << " = ";
    switch (entry.type) {
      case EntryType::Double:
        std::snprintf(buf, sizeof(buf), "%.17g", *static_cast<const double*>(entry.ptr));
        out << buf;
        break;
      case EntryType::Int:
        if (std::string(entry.key) == "td3.buffer_capacity") {
          out << *static_cast<const size_t*>(entry.ptr);
        } else {
          out << *static_cast<const int*>(entry.ptr);
        }
        break;
      case EntryType::Bool:
        out << (*static_cast<const bool*>(entry.ptr) ? "true" : "false");
        break;
    }
    out << "\n";
  }
  return out.str();
}

void write_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << serialize_config(cfg);
}

}  // namespace ixsim
