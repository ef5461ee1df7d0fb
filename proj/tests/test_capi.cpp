// C API surface test: drives the shared library through ixsim.h only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "ixsim.h"

TEST_SUITE("capi") {

TEST_CASE("config lifecycle: set, get, write, errors") {
  ixsim_config* cfg = ixsim_config_new();
  REQUIRE(cfg != nullptr);

  char buf[64];
  CHECK(ixsim_config_get(cfg, "reward.t_max", buf, sizeof(buf)) == IXSIM_OK);
  CHECK(std::string(buf) == "30");

  CHECK(ixsim_config_set(cfg, "reward.t_max", "25") == IXSIM_OK);
  CHECK(ixsim_config_get(cfg, "reward.t_max", buf, sizeof(buf)) == IXSIM_OK);
  CHECK(std::string(buf) == "25");

  CHECK(ixsim_config_set(cfg, "no.such.key", "1") == IXSIM_ERR_CONFIG);
  CHECK(std::string(ixsim_last_error()).find("no.such.key") != std::string::npos);
  CHECK(ixsim_config_set(cfg, "td3.gamma", "2.0") == IXSIM_ERR_CONFIG);
  CHECK(ixsim_config_load_file(cfg, "/tmp/ixsim_missing_config.cfg") == IXSIM_ERR_CONFIG);

  CHECK(ixsim_config_write_file(cfg, "/tmp/ixsim_capi_echo.cfg") == IXSIM_OK);
  ixsim_config* cfg2 = ixsim_config_new();
  CHECK(ixsim_config_load_file(cfg2, "/tmp/ixsim_capi_echo.cfg") == IXSIM_OK);
  CHECK(ixsim_config_get(cfg2, "reward.t_max", buf, sizeof(buf)) == IXSIM_OK);
  CHECK(std::string(buf) == "25");
  ixsim_config_free(cfg2);
  ixsim_config_free(cfg);
}

TEST_CASE("environment lifecycle and determinism through the C API") {
  ixsim_config* cfg = ixsim_config_new();

  CHECK(ixsim_env_new(cfg, "det:Z:10,16") == nullptr);
  CHECK(std::string(ixsim_last_error()).find("Z") != std::string::npos);

  ixsim_env* env = ixsim_env_new(cfg, "det:A:24,20");
  REQUIRE(env != nullptr);

  double obs1[IXSIM_OBS_DIM], obs2[IXSIM_OBS_DIM];
  CHECK(ixsim_env_reset(env, 5, obs1) == IXSIM_OK);
  CHECK(ixsim_env_reset(env, 5, obs2) == IXSIM_OK);
  CHECK(std::memcmp(obs1, obs2, sizeof(obs1)) == 0);

  double reward = 0.0;
  int done = 0;
  ixsim_outcome outcome = IXSIM_OUTCOME_RUNNING;
  int steps = 0;
  while (!done) {
    CHECK(ixsim_env_step(env, 1.0, 0.0, obs1, &reward, &done, &outcome) == IXSIM_OK);
    REQUIRE(++steps < 1000);
  }
  CHECK((outcome == IXSIM_OUTCOME_SUCCESS || outcome == IXSIM_OUTCOME_COLLISION));
  // stepping a finished episode is a runtime error
  CHECK(ixsim_env_step(env, 1.0, 0.0, obs1, &reward, &done, &outcome) == IXSIM_ERR_RUNTIME);
  ixsim_env_free(env);
  ixsim_config_free(cfg);
}

TEST_CASE("agents act through the C API") {
  ixsim_config* cfg = ixsim_config_new();
  ixsim_env* env = ixsim_env_new(cfg, "train:straight");
  REQUIRE(env != nullptr);
  double obs[IXSIM_OBS_DIM];
  REQUIRE(ixsim_env_reset(env, 1, obs) == IXSIM_OK);

  CHECK(ixsim_agent_new(cfg, "hoverboard") == nullptr);
  ixsim_agent* idm = ixsim_agent_new(cfg, "idm");
  REQUIRE(idm != nullptr);
  double a0 = -1.0, a1 = -1.0;
  CHECK(ixsim_agent_act(idm, env, &a0, &a1) == IXSIM_OK);
  CHECK(a0 >= 0.0);
  CHECK(a0 <= 1.0);
  CHECK(a1 >= 0.0);
  CHECK(a1 <= 1.0);
  ixsim_agent_free(idm);

  ixsim_agent* missing_model = ixsim_agent_new(cfg, "td3:/tmp/ixsim_no_model_here.bin");
  CHECK(missing_model == nullptr);

  ixsim_env_free(env);
  ixsim_config_free(cfg);
}

TEST_CASE("null arguments are reported as config errors") {
  CHECK(ixsim_config_load_file(nullptr, "x") == IXSIM_ERR_CONFIG);
  CHECK(ixsim_env_reset(nullptr, 0, nullptr) == IXSIM_ERR_CONFIG);
  CHECK(std::string(ixsim_version()).size() > 0);
}

TEST_CASE("sample-traffic run through the C API honors argument validation") {
  ixsim_config* cfg = ixsim_config_new();
  CHECK(ixsim_run_sample_traffic(cfg, "A", 0, 1, "/tmp/ixsim_capi_st", 50) ==
        IXSIM_ERR_CONFIG);
  CHECK(ixsim_run_sample_traffic(cfg, "A", 500, 1, "/tmp/ixsim_capi_st", 20) == IXSIM_OK);
  ixsim_config_free(cfg);
}

}  // TEST_SUITE
