#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ixsim/eval.hpp"
#include "ixsim/td3.hpp"

namespace ixsim {

/// The resolved run configuration: built-in defaults, overlaid by an
/// optional key = value file, overlaid by command-line overrides.
struct RunConfig {
  MapConfig map;
  SimConfig sim;
  Dims vehicle;
  RewardConfig reward;
  IdmParams idm;
  AebParams aeb;

  double speed_min_kmh = 10.0;
  double speed_max_kmh = 40.0;
  double gap_min_m = 16.0;
  double gap_max_m = 50.0;
  double grid_step = 2.0;
  double warmup_s = 5.0;

  double ou_theta = 0.5;
  double ou_tau = 1.0;
  double gap_concentration = 4.0;

  int stochastic_flows = 4;
  bool stochastic_ignore_ego = true;

  Td3Config td3;

  int eval_stochastic_episodes = 1000;

  ScenarioDefaults scenario_defaults() const;
  StochasticConfig stochastic_config(Turn task) const;
  EvalSettings eval_settings() const;
};

/// Configuration failure with the offending key path and line (0 when the
/// value came from an override or a cross-field check).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parse a key = value file over the built-in defaults. '#' starts a
/// comment; blank lines are ignored; unknown keys are rejected.
RunConfig parse_config(const std::string& path);

/// Apply key=value overrides in order, then re-validate.
void apply_overrides(RunConfig& cfg, const Overrides& overrides);

/// Cross-field invariant check; throws ConfigError on the offending key.
void validate_config(const RunConfig& cfg);

/// Full resolved configuration as a stable key = value listing.
std::string serialize_config(const RunConfig& cfg);
void write_config(const RunConfig& cfg, const std::string& path);

}  // namespace ixsim
