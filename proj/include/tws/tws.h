#ifndef TWS_TWS_H
#define TWS_TWS_H

/* C interface to the tunnel-walking simulator. Every function returns a
 * tws_status; on failure tws_last_error() describes the problem (per thread).
 * Strings returned through char** are owned by the caller: release them with
 * tws_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TWS_API __declspec(dllexport)
#else
#define TWS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tws_status {
  TWS_OK = 0,
  TWS_ERR_INVALID_ARGUMENT = 1,
  TWS_ERR_CONFIG = 2,
  TWS_ERR_SIMULATION = 3,
  TWS_ERR_SCENARIO_MISMATCH = 4,
  TWS_ERR_DIVERGENCE = 5,
  TWS_ERR_CORRUPT_TRACE = 6,
  TWS_ERR_SEED_MISMATCH = 7,
  TWS_ERR_IO = 8,
  TWS_ERR_UNKNOWN = 99
} tws_status;

typedef struct tws_config tws_config;
typedef struct tws_run tws_run;
typedef struct tws_report tws_report;
typedef struct tws_tunnel tws_tunnel;

typedef struct tws_leg {
  int leg;
  double travel_time;
  double approach_time;
  double wait_time;
  double traversal_time;
  double physical_m;
  double local_m;
  double tunnel_m;
  double virtual_m;
  double true_m;
  int teleports;
} tws_leg;

typedef struct tws_totals {
  double local_walk;
  double tunnel_walk;
  double total_walk;
  double travel_time;
  double duration;
  double flow_local_mean;
  double flow_tunnel_mean;
  int teleports;
  int legs;
} tws_totals;

typedef struct tws_verify {
  int identical;
  size_t line;
  int64_t index;
  int64_t tick;
} tws_verify;

TWS_API const char* tws_version(void);
TWS_API const char* tws_last_error(void);
TWS_API void tws_string_free(char* s);

/* Defaults, or a built-in ("default:L1", "default:L2") / YAML scenario. */
TWS_API tws_status tws_config_create(tws_config** out);
TWS_API tws_status tws_config_load(const char* source, tws_config** out);
/* Dotted key into the configuration ("technique", "gain.value",
 * "agent.walk_speed", ...). Values are JSON literals or bare strings. The key
 * "scenario" reloads the layout from a source. */
TWS_API tws_status tws_config_set(tws_config* cfg, const char* key, const char* value);
TWS_API tws_status tws_config_validate(const tws_config* cfg);
/* Validates and describes the scenario and per-leg tunnels. */
TWS_API tws_status tws_config_describe(const tws_config* cfg, char** out);
TWS_API tws_status tws_config_json(const tws_config* cfg, char** out);
TWS_API void tws_config_destroy(tws_config* cfg);

TWS_API tws_status tws_simulate(const tws_config* cfg, tws_run** out);
/* runs[i] uses seed + i. `threads` <= 0 picks the hardware concurrency. */
TWS_API tws_status tws_simulate_batch(const tws_config* cfg, int count, int threads, tws_run** runs);
/* Writes trace.jsonl, report.csv and report.txt into `dir` (created). */
TWS_API tws_status tws_run_write(const tws_run* run, const char* dir);
TWS_API uint64_t tws_run_seed(const tws_run* run);
TWS_API tws_status tws_run_trace(const tws_run* run, char** out);
TWS_API tws_status tws_run_report(const tws_run* run, tws_report** out);
TWS_API void tws_run_destroy(tws_run* run);

/* From a trace file or a run directory containing trace.jsonl. */
TWS_API tws_status tws_report_load(const char* path, tws_report** out);
TWS_API size_t tws_report_leg_count(const tws_report* r);
TWS_API tws_status tws_report_leg(const tws_report* r, size_t i, tws_leg* out);
TWS_API tws_status tws_report_totals(const tws_report* r, tws_totals* out);
TWS_API tws_status tws_report_text(const tws_report* r, char** out);
TWS_API tws_status tws_report_csv(const tws_report* r, char** out);
TWS_API void tws_report_destroy(tws_report* r);

TWS_API tws_status tws_compare(const tws_report* a, const tws_report* b, char** text, char** csv);

/* Re-simulates the trace and byte-compares. TWS_ERR_DIVERGENCE when it differs
 * (details in `out`); TWS_ERR_SEED_MISMATCH for an edited header. */
TWS_API tws_status tws_replay_verify(const char* trace_path, tws_verify* out);

TWS_API tws_status tws_describe_defaults(char** out);

TWS_API tws_status tws_tunnel_build(double start_x, double start_z, double end_x, double end_z, double gain,
                                    tws_tunnel** out);
TWS_API double tws_tunnel_gain(const tws_tunnel* t);
TWS_API double tws_tunnel_cabin_length(const tws_tunnel* t);
TWS_API double tws_tunnel_hull_length(const tws_tunnel* t);
TWS_API void tws_tunnel_destroy(tws_tunnel* t);

#ifdef __cplusplus
}
#endif

#endif
