/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "gridmarket/gridmarket.h"

static int failures = 0;

#define EXPECT(cond)                                                        \
    do {                                                                    \
        if (!(cond)) {                                                      \
            fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                     \
        }                                                                   \
    } while (0)

static void presets_and_settings(void) {
    gm_config* cfg = NULL;
    EXPECT(gm_config_preset("two-cat", 40, &cfg) == GM_OK);
    EXPECT(cfg != NULL);
    EXPECT(gm_config_set(cfg, "scenario.steps", "12") == GM_OK);
    EXPECT(gm_config_validate(cfg) == GM_OK);

    EXPECT(gm_config_set(cfg, "scenario.nothing", "1") == GM_ERR_CONFIG);
    EXPECT(strstr(gm_last_error(), "scenario.nothing") != NULL);
    EXPECT(gm_config_set(cfg, "jobs.injectionPeriod", "0") == GM_OK);
    EXPECT(gm_config_validate(cfg) == GM_ERR_CONFIG);
    EXPECT(strstr(gm_last_error(), "jobs.injectionPeriod") != NULL);
    EXPECT(gm_config_set(cfg, "jobs.injectionPeriod", "50") == GM_OK);

    char* text = NULL;
    EXPECT(gm_config_to_string(cfg, &text) == GM_OK);
    EXPECT(text != NULL && strstr(text, "scenario.name = two-cat") != NULL);
    gm_string_free(text);
    gm_config_free(cfg);

    cfg = NULL;
    EXPECT(gm_config_preset("nine-cat", 10, &cfg) == GM_ERR_CONFIG);
    EXPECT(cfg == NULL);
    EXPECT(strlen(gm_last_error()) > 0);
    EXPECT(gm_config_load("/nonexistent/x.conf", &cfg) == GM_ERR_CONFIG);
    EXPECT(gm_config_preset("one-cat", 10, NULL) == GM_ERR_INVALID_ARGUMENT);
    EXPECT(gm_config_validate(NULL) == GM_ERR_INVALID_ARGUMENT);
}

static void run_accessors(void) {
    gm_config* cfg = NULL;
    gm_run* run = NULL;
    EXPECT(gm_config_preset("two-cat", 40, &cfg) == GM_OK);
    EXPECT(gm_config_set(cfg, "scenario.steps", "12") == GM_OK);
    EXPECT(gm_simulate(cfg, 0, &run) == GM_OK);
    gm_config_free(cfg);
    if (!run) return;

    EXPECT(gm_run_step_count(run) == 12);
    EXPECT(gm_run_category_count(run) == 2);
    double price = 0.0;
    double util = -1.0;
    double xi = 0.0;
    double norm = -1.0;
    uint64_t queries = 0;
    EXPECT(gm_run_price(run, 0, 0, &price) == GM_OK);
    EXPECT(price > 0.0);
    EXPECT(gm_run_utilization(run, 11, 1, &util) == GM_OK);
    EXPECT(util >= 0.0 && util <= 1.0);
    EXPECT(gm_run_excess_demand(run, 3, 1, &xi) == GM_OK);
    EXPECT(isfinite(xi));
    EXPECT(gm_run_residual_norm(run, 0, &norm) == GM_OK);
    EXPECT(norm >= 0.0);
    EXPECT(gm_run_queries(run, 0, &queries) == GM_OK);
    EXPECT(queries > 0);

    EXPECT(gm_run_price(run, 12, 0, &price) == GM_ERR_INVALID_ARGUMENT);
    EXPECT(gm_run_price(run, 0, 2, &price) == GM_ERR_INVALID_ARGUMENT);
    EXPECT(gm_run_price(run, 0, 0, NULL) == GM_ERR_INVALID_ARGUMENT);

    char* json = NULL;
    EXPECT(gm_run_summary_json(run, &json) == GM_OK);
    EXPECT(json != NULL && json[0] == '{');
    gm_string_free(json);

    /* /dev/null is not a directory, so writing beneath it fails. */
    EXPECT(gm_run_emit_reports(run, "/dev/null/out") == GM_ERR_IO);
    gm_run_free(run);
}

static void sweep(const char* dir) {
    const size_t counts[] = {1, 2};
    gm_sweep* s = NULL;
    EXPECT(gm_sweep_run(counts, 1, 1, 1, 5, 40, 0, dir, &s) == GM_ERR_CONFIG);
    EXPECT(strstr(gm_last_error(), ">= 2 presets required") != NULL);
    EXPECT(s == NULL);
    EXPECT(gm_sweep_run(counts, 2, 1, 1, 5, 40, 0, dir, &s) == GM_OK);
    if (!s) return;
    EXPECT(gm_sweep_row_count(s) == 2);
    size_t cats = 0;
    double q = 0.0;
    double ms = -1.0;
    int fails = -1;
    EXPECT(gm_sweep_row(s, 1, &cats, &q, &ms, &fails) == GM_OK);
    EXPECT(cats == 2);
    EXPECT(q > 0.0);
    EXPECT(ms == 0.0);
    EXPECT(fails == 0);
    EXPECT(gm_sweep_row(s, 2, &cats, &q, &ms, &fails) == GM_ERR_INVALID_ARGUMENT);
    EXPECT(gm_sweep_error_count(s) == 0);
    EXPECT(gm_sweep_error(s, 0) == NULL);
    gm_sweep_free(s);
}

int main(int argc, char** argv) {
    const char* dir = argc > 1 ? argv[1] : "gridmarket_capi_sweep";
    EXPECT(strlen(gm_version()) > 0);
    gm_config_free(NULL);
    gm_run_free(NULL);
    gm_sweep_free(NULL);
    gm_string_free(NULL);
    presets_and_settings();
    run_accessors();
    sweep(dir);
    if (failures) {
        fprintf(stderr, "%d failure(s)\n", failures);
        return 1;
    }
    puts("capi: all checks passed");
    return 0;
}
