#include "ixsim.h"

#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "ixsim/config.hpp"
#include "ixsim/runs.hpp"
#include "ixsim/serve.hpp"

namespace {

thread_local std::string g_last_error;

ixsim_status fail(ixsim_status code, const char* what) {
  g_last_error = what;
  return code;
}

/// ConfigError and bad specs map to IXSIM_ERR_CONFIG; everything else is a
/// runtime failure.
template <typename Fn>
ixsim_status guarded(Fn&& fn) {
  try {
    fn();
    return IXSIM_OK;
  } catch (const ixsim::ConfigError& e) {
    return fail(IXSIM_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(IXSIM_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(IXSIM_ERR_RUNTIME, e.what());
  }
}

std::vector<uint64_t> parse_seed_list(const char* csv) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(csv ? csv : "");
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

}  // namespace

struct ixsim_config {
  ixsim::RunConfig cfg;
};

struct ixsim_env {
  ixsim::IntersectionMap map;
  std::unique_ptr<ixsim::Env> env;
};

struct ixsim_agent {
  std::unique_ptr<ixsim::Agent> agent;
};

extern "C" {

const char* ixsim_version(void) { return "0.1.0"; }

const char* ixsim_last_error(void) { return g_last_error.c_str(); }

ixsim_config* ixsim_config_new(void) { return new ixsim_config{}; }

void ixsim_config_free(ixsim_config* cfg) { delete cfg; }

ixsim_status ixsim_config_load_file(ixsim_config* cfg, const char* path) {
  if (!cfg || !path) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded([&] { cfg->cfg = ixsim::parse_config(path); });
}

ixsim_status ixsim_config_set(ixsim_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded([&] { ixsim::apply_overrides(cfg->cfg, {{key, value}}); });
}

ixsim_status ixsim_config_get(const ixsim_config* cfg, const char* key, char* buf,
                              size_t buf_len) {
  if (!cfg || !key || !buf || buf_len == 0) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded([&] {
    const std::string text = ixsim::serialize_config(cfg->cfg);
    std::stringstream ss(text);
    std::string line;
    const std::string prefix = std::string(key) + " = ";
    while (std::getline(ss, line)) {
      if (line.rfind(prefix, 0) == 0) {
        const std::string value = line.substr(prefix.size());
        if (value.size() + 1 > buf_len) throw std::runtime_error("buffer too small");
        std::memcpy(buf, value.c_str(), value.size() + 1);
        return;
      }
    }
    throw std::invalid_argument("unknown key: " + std::string(key));
  });
}

ixsim_status ixsim_config_write_file(const ixsim_config* cfg, const char* path) {
  if (!cfg || !path) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded([&] { ixsim::write_config(cfg->cfg, path); });
}

ixsim_env* ixsim_env_new(const ixsim_config* cfg, const char* scenario_spec) {
  if (!cfg || !scenario_spec) {
    fail(IXSIM_ERR_CONFIG, "null argument");
    return nullptr;
  }
  auto handle = std::make_unique<ixsim_env>();
  const ixsim_status status = guarded([&] {
    handle->map = ixsim::build_default_intersection(cfg->cfg.map);
    handle->env =
        std::make_unique<ixsim::Env>(ixsim::make_env(cfg->cfg, handle->map, scenario_spec));
  });
  return status == IXSIM_OK ? handle.release() : nullptr;
}

void ixsim_env_free(ixsim_env* env) { delete env; }

ixsim_status ixsim_env_reset(ixsim_env* env, uint64_t seed, double obs[IXSIM_OBS_DIM]) {
  if (!env || !obs) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded([&] {
    const ixsim::Observation o = env->env->reset(seed);
    std::memcpy(obs, o.data(), sizeof(double) * IXSIM_OBS_DIM);
  });
}

ixsim_status ixsim_env_step(ixsim_env* env, double a0, double a1, double obs[IXSIM_OBS_DIM],
                            double* reward, int* done, ixsim_outcome* outcome) {
  if (!env || !obs || !reward || !done || !outcome) {
    return fail(IXSIM_ERR_CONFIG, "null argument");
  }
  return guarded([&] {
    const ixsim::StepOutput out = env->env->step(ixsim::Action{a0, a1});
    std::memcpy(obs, out.observation.data(), sizeof(double) * IXSIM_OBS_DIM);
    *reward = out.reward;
    *done = out.done ? 1 : 0;
    *outcome = static_cast<ixsim_outcome>(out.outcome);
  });
}

ixsim_agent* ixsim_agent_new(const ixsim_config* cfg, const char* agent_spec) {
  if (!cfg || !agent_spec) {
    fail(IXSIM_ERR_CONFIG, "null argument");
    return nullptr;
  }
  auto handle = std::make_unique<ixsim_agent>();
  const ixsim_status status = guarded(
      [&] { handle->agent = ixsim::make_agent(agent_spec, cfg->cfg.idm, cfg->cfg.aeb); });
  return status == IXSIM_OK ? handle.release() : nullptr;
}

void ixsim_agent_free(ixsim_agent* agent) { delete agent; }

ixsim_status ixsim_agent_act(ixsim_agent* agent, const ixsim_env* env, double* a0, double* a1) {
  if (!agent || !env || !env->env || !a0 || !a1) {
    return fail(IXSIM_ERR_CONFIG, "null argument");
  }
  return guarded([&] {
    const ixsim::Action a = agent->agent->act(*env->env);
    *a0 = a.a0;
    *a1 = a.a1;
  });
}

ixsim_status ixsim_run_train(const ixsim_config* cfg, const char* task, int episodes,
                             uint64_t seed, const char* out_dir, int verbose) {
  if (!cfg || !task || !out_dir) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded([&] {
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    ixsim::run_train(cfg->cfg, ixsim::task_from_string(task), episodes, seed, out_dir,
                     verbose != 0);
  });
}

ixsim_status ixsim_run_eval_deterministic(const ixsim_config* cfg, const char* agent_spec,
                                          const char* seeds_csv, const char* out_dir) {
  if (!cfg || !agent_spec || !out_dir) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded([&] {
    ixsim::run_eval_deterministic(cfg->cfg, agent_spec, parse_seed_list(seeds_csv), out_dir);
  });
}

ixsim_status ixsim_run_eval_stochastic(const ixsim_config* cfg, const char* agent_spec,
                                       int episodes, uint64_t seed, const char* out_dir) {
  if (!cfg || !agent_spec || !out_dir) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded([&] {
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    ixsim::run_eval_stochastic(cfg->cfg, agent_spec, episodes, seed, out_dir);
  });
}

ixsim_status ixsim_run_sample_traffic(const ixsim_config* cfg, const char* flow, int draws,
                                      uint64_t seed, const char* out_dir, int bins) {
  if (!cfg || !flow || !out_dir) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded(
      [&] { ixsim::run_sample_traffic(cfg->cfg, flow, draws, seed, out_dir, bins); });
}

ixsim_status ixsim_run_replay(const ixsim_config* cfg, const char* scenario_id,
                              double speed_kmh, double gap_m, const char* agent_spec,
                              uint64_t seed, const char* out_path) {
  if (!cfg || !scenario_id || !agent_spec || !out_path) {
    return fail(IXSIM_ERR_CONFIG, "null argument");
  }
  return guarded([&] {
    ixsim::run_replay(cfg->cfg, scenario_id, speed_kmh, gap_m, agent_spec, seed, out_path);
  });
}

ixsim_status ixsim_run_serve(const ixsim_config* cfg, int port) {
  if (!cfg) return fail(IXSIM_ERR_CONFIG, "null argument");
  return guarded([&] {
    ixsim::ServeOptions options;
    options.port = port;
    options.on_listening = [](int bound) {
      std::printf("listening on 127.0.0.1:%d\n", bound);
      std::fflush(stdout);
    };
    ixsim::run_server(cfg->cfg, options);
  });
}

}  // extern "C"
