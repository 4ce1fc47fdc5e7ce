/*
 * C interface to the gridmarket simulator.
 *
 * Handles are opaque and owned by the caller: every gm_*_create / load /
 * preset / simulate call that succeeds must be paired with the matching
 * gm_*_free. Functions return a gm_status; on failure gm_last_error() gives a
 * message for the calling thread, valid until its next gm_* call.
 */
#ifndef GRIDMARKET_H
#define GRIDMARKET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GRIDMARKET_BUILDING)
#    define GM_API __declspec(dllexport)
#  else
#    define GM_API __declspec(dllimport)
#  endif
#else
#  define GM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gm_status {
    GM_OK = 0,
    GM_ERR_INVALID_ARGUMENT = 1, /* null handle, index out of range */
    GM_ERR_CONFIG = 2,           /* configuration parse or validation failure */
    GM_ERR_IO = 3,               /* report output could not be written */
    GM_ERR_RUNTIME = 4           /* anything else raised during a run */
} gm_status;

typedef struct gm_config gm_config;
typedef struct gm_run gm_run;
typedef struct gm_sweep gm_sweep;

GM_API const char* gm_last_error(void);
GM_API const char* gm_version(void);
GM_API void gm_string_free(char* s);

/* Configuration */
GM_API gm_status gm_config_preset(const char* name, int desk_scale, gm_config** out);
GM_API gm_status gm_config_load(const char* path, gm_config** out);
GM_API gm_status gm_config_set(gm_config* cfg, const char* key, const char* value);
GM_API gm_status gm_config_validate(const gm_config* cfg);
/* Canonical text form; release with gm_string_free. */
GM_API gm_status gm_config_to_string(const gm_config* cfg, char** out);
GM_API gm_status gm_config_write(const gm_config* cfg, const char* path);
GM_API void gm_config_free(gm_config* cfg);

/* Single run. record_timing = 0 writes zero runtimes, making output byte-stable. */
GM_API gm_status gm_simulate(const gm_config* cfg, int record_timing, gm_run** out);
GM_API size_t gm_run_step_count(const gm_run* run);
GM_API size_t gm_run_category_count(const gm_run* run);
GM_API gm_status gm_run_price(const gm_run* run, size_t step, size_t category, double* out);
GM_API gm_status gm_run_utilization(const gm_run* run, size_t step, size_t category, double* out);
GM_API gm_status gm_run_excess_demand(const gm_run* run, size_t step, size_t category, double* out);
GM_API gm_status gm_run_residual_norm(const gm_run* run, size_t step, double* out);
GM_API gm_status gm_run_queries(const gm_run* run, size_t step, uint64_t* out);
/* summary.json content; release with gm_string_free. */
GM_API gm_status gm_run_summary_json(const gm_run* run, char** out);
GM_API gm_status gm_run_emit_reports(const gm_run* run, const char* out_dir);
GM_API void gm_run_free(gm_run* run);

/* Preset sweep over category counts (each 1..6, at least two). */
GM_API gm_status gm_sweep_run(const size_t* category_counts, size_t count, int seeds, uint64_t base_seed,
                              int steps, int desk_scale, int record_timing, const char* out_dir, gm_sweep** out);
GM_API size_t gm_sweep_row_count(const gm_sweep* sweep);
GM_API gm_status gm_sweep_row(const gm_sweep* sweep, size_t row, size_t* categories, double* mean_queries,
                              double* mean_millis, int* failures);
GM_API size_t gm_sweep_error_count(const gm_sweep* sweep);
GM_API const char* gm_sweep_error(const gm_sweep* sweep, size_t index);
GM_API void gm_sweep_free(gm_sweep* sweep);

#ifdef __cplusplus
}
#endif

#endif /* GRIDMARKET_H */
