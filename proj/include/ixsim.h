/* C interface to the intersection driving benchmark.
 *
 * All entry points return ixsim_status; on failure ixsim_last_error() holds
 * a thread-local message. Handles are opaque and owned by the caller via the
 * matching _free function.
 */
#ifndef IXSIM_H
#define IXSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define IXSIM_OBS_DIM 34
#define IXSIM_ACT_DIM 2

typedef enum ixsim_status {
  IXSIM_OK = 0,
  IXSIM_ERR_CONFIG = 1, /* bad configuration, key, agent spec, or file */
  IXSIM_ERR_RUNTIME = 2 /* failure while running */
} ixsim_status;

typedef enum ixsim_outcome {
  IXSIM_OUTCOME_RUNNING = 0,
  IXSIM_OUTCOME_SUCCESS = 1,
  IXSIM_OUTCOME_COLLISION = 2,
  IXSIM_OUTCOME_TIMEOUT = 3
} ixsim_outcome;

typedef struct ixsim_config ixsim_config;
typedef struct ixsim_env ixsim_env;
typedef struct ixsim_agent ixsim_agent;

const char* ixsim_version(void);
const char* ixsim_last_error(void);

/* ---- configuration -------------------------------------------------- */

ixsim_config* ixsim_config_new(void);
void ixsim_config_free(ixsim_config* cfg);
ixsim_status ixsim_config_load_file(ixsim_config* cfg, const char* path);
ixsim_status ixsim_config_set(ixsim_config* cfg, const char* key, const char* value);
/* Copies the value of one key into buf (NUL-terminated). */
ixsim_status ixsim_config_get(const ixsim_config* cfg, const char* key, char* buf,
                              size_t buf_len);
ixsim_status ixsim_config_write_file(const ixsim_config* cfg, const char* path);

/* ---- environment ----------------------------------------------------
 * scenario_spec:
 *   "det:<A-E>:<V_kmh>,<gap_m>"  deterministic concrete scenario
 *   "train:<left|right|straight>" training traffic
 *   "sto:<left|right|straight>"   stochastic autopilot traffic
 */

ixsim_env* ixsim_env_new(const ixsim_config* cfg, const char* scenario_spec);
void ixsim_env_free(ixsim_env* env);
ixsim_status ixsim_env_reset(ixsim_env* env, uint64_t seed, double obs[IXSIM_OBS_DIM]);
ixsim_status ixsim_env_step(ixsim_env* env, double a0, double a1, double obs[IXSIM_OBS_DIM],
                            double* reward, int* done, ixsim_outcome* outcome);

/* ---- agents ----------------------------------------------------------
 * agent_spec: "td3:<actor-file>" | "idm" | "aeb" | "random[:seed]"
 */

ixsim_agent* ixsim_agent_new(const ixsim_config* cfg, const char* agent_spec);
void ixsim_agent_free(ixsim_agent* agent);
ixsim_status ixsim_agent_act(ixsim_agent* agent, const ixsim_env* env, double* a0, double* a1);

/* ---- benchmark runs -------------------------------------------------- */

ixsim_status ixsim_run_train(const ixsim_config* cfg, const char* task, int episodes,
                             uint64_t seed, const char* out_dir, int verbose);
/* seeds_csv: comma-separated evaluation seeds, e.g. "0" or "0,1,2". */
ixsim_status ixsim_run_eval_deterministic(const ixsim_config* cfg, const char* agent_spec,
                                          const char* seeds_csv, const char* out_dir);
ixsim_status ixsim_run_eval_stochastic(const ixsim_config* cfg, const char* agent_spec,
                                       int episodes, uint64_t seed, const char* out_dir);
ixsim_status ixsim_run_sample_traffic(const ixsim_config* cfg, const char* flow, int draws,
                                      uint64_t seed, const char* out_dir, int bins);
ixsim_status ixsim_run_replay(const ixsim_config* cfg, const char* scenario_id,
                              double speed_kmh, double gap_m, const char* agent_spec,
                              uint64_t seed, const char* out_path);

/* Blocking newline-delimited JSON environment server on localhost:port.
 * port 0 picks an ephemeral port; the bound port is printed to stdout.
 * A {"cmd":"shutdown"} request stops the server. */
ixsim_status ixsim_run_serve(const ixsim_config* cfg, int port);

#ifdef __cplusplus
}
#endif

#endif /* IXSIM_H */
