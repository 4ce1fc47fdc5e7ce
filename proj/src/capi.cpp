#include "gridmarket/gridmarket.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <string>

#include "gridmarket/config.hpp"
#include "gridmarket/engine.hpp"
#include "gridmarket/report.hpp"

struct gm_config {
    gridmarket::ScenarioConfig cfg;
};

struct gm_run {
    gridmarket::RunResult result;
};

struct gm_sweep {
    gridmarket::SweepResult result;
};

namespace {

thread_local std::string lastError;

gm_status fail(gm_status status, std::string message) {
    lastError = std::move(message);
    return status;
}

// Maps the exception in flight onto a status code.
gm_status translate() {
    try {
        throw;
    } catch (const gridmarket::ConfigError& e) {
        return fail(GM_ERR_CONFIG, e.what());
    } catch (const gridmarket::ReportError& e) {
        return fail(GM_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(GM_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(GM_ERR_RUNTIME, e.what());
    } catch (...) {
        return fail(GM_ERR_RUNTIME, "unknown error");
    }
}

template <typename Fn>
gm_status guarded(Fn&& fn) {
    lastError.clear();
    try {
        fn();
        return GM_OK;
    } catch (...) {
        return translate();
    }
}

char* duplicate(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const gridmarket::StepMetrics* stepAt(const gm_run* run, std::size_t step) {
    if (run == nullptr || step >= run->result.steps.size()) return nullptr;
    return &run->result.steps[step];
}

template <typename Get>
gm_status perCategory(const gm_run* run, std::size_t step, std::size_t category, double* out, Get get) {
    const auto* m = stepAt(run, step);
    if (m == nullptr || out == nullptr || category >= run->result.categories.size()) {
        return fail(GM_ERR_INVALID_ARGUMENT, "step or category out of range");
    }
    *out = get(*m, category);
    return GM_OK;
}

}  // namespace

extern "C" {

const char* gm_last_error(void) { return lastError.c_str(); }

const char* gm_version(void) { return "0.1.0"; }

void gm_string_free(char* s) { delete[] s; }

gm_status gm_config_preset(const char* name, int desk_scale, gm_config** out) {
    if (name == nullptr || out == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new gm_config{gridmarket::presetConfig(std::string_view(name), desk_scale)}; });
}

gm_status gm_config_load(const char* path, gm_config** out) {
    if (path == nullptr || out == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new gm_config{gridmarket::parseConfig(path)}; });
}

gm_status gm_config_set(gm_config* cfg, const char* key, const char* value) {
    if (cfg == nullptr || key == nullptr || value == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { gridmarket::applySetting(cfg->cfg, key, value); });
}

gm_status gm_config_validate(const gm_config* cfg) {
    if (cfg == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "null config");
    return guarded([&] { cfg->cfg.validate(); });
}

gm_status gm_config_to_string(const gm_config* cfg, char** out) {
    if (cfg == nullptr || out == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = duplicate(gridmarket::writeConfig(cfg->cfg)); });
}

gm_status gm_config_write(const gm_config* cfg, const char* path) {
    if (cfg == nullptr || path == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw gridmarket::ReportError(std::string(path) + ": cannot open for writing");
        os << gridmarket::writeConfig(cfg->cfg);
        if (!os) throw gridmarket::ReportError(std::string(path) + ": write failed");
    });
}

void gm_config_free(gm_config* cfg) { delete cfg; }

gm_status gm_simulate(const gm_config* cfg, int record_timing, gm_run** out) {
    if (cfg == nullptr || out == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        cfg->cfg.validate();
        *out = new gm_run{gridmarket::runSimulation(cfg->cfg, record_timing != 0)};
    });
}

size_t gm_run_step_count(const gm_run* run) { return run ? run->result.steps.size() : 0; }

size_t gm_run_category_count(const gm_run* run) { return run ? run->result.categories.size() : 0; }

gm_status gm_run_price(const gm_run* run, size_t step, size_t category, double* out) {
    return perCategory(run, step, category, out, [](const auto& m, std::size_t k) { return m.prices[k]; });
}

gm_status gm_run_utilization(const gm_run* run, size_t step, size_t category, double* out) {
    return perCategory(run, step, category, out, [](const auto& m, std::size_t k) { return m.utilization[k]; });
}

gm_status gm_run_excess_demand(const gm_run* run, size_t step, size_t category, double* out) {
    return perCategory(run, step, category, out, [](const auto& m, std::size_t k) { return m.xi[k]; });
}

gm_status gm_run_residual_norm(const gm_run* run, size_t step, double* out) {
    const auto* m = stepAt(run, step);
    if (m == nullptr || out == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "step out of range");
    *out = m->residualNorm;
    return GM_OK;
}

gm_status gm_run_queries(const gm_run* run, size_t step, uint64_t* out) {
    const auto* m = stepAt(run, step);
    if (m == nullptr || out == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "step out of range");
    *out = m->queries;
    return GM_OK;
}

gm_status gm_run_summary_json(const gm_run* run, char** out) {
    if (run == nullptr || out == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = duplicate(gridmarket::summaryJson(run->result)); });
}

gm_status gm_run_emit_reports(const gm_run* run, const char* out_dir) {
    if (run == nullptr || out_dir == nullptr) return fail(GM_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { gridmarket::emitReports(run->result, out_dir); });
}

void gm_run_free(gm_run* run) { delete run; }

gm_status gm_sweep_run(const size_t* category_counts, size_t count, int seeds, uint64_t base_seed, int steps,
                       int desk_scale, int record_timing, const char* out_dir, gm_sweep** out) {
    if ((category_counts == nullptr && count > 0) || out_dir == nullptr || out == nullptr) {
        return fail(GM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] {
        gridmarket::SweepOptions opts;
        opts.categoryCounts.assign(category_counts, category_counts + count);
        opts.seeds = seeds;
        opts.baseSeed = base_seed;
        opts.steps = steps;
        opts.deskScale = desk_scale;
        opts.recordTiming = record_timing != 0;
        *out = new gm_sweep{gridmarket::runSweep(opts, out_dir)};
    });
}

size_t gm_sweep_row_count(const gm_sweep* sweep) { return sweep ? sweep->result.rows.size() : 0; }

gm_status gm_sweep_row(const gm_sweep* sweep, size_t row, size_t* categories, double* mean_queries,
                       double* mean_millis, int* failures) {
    if (sweep == nullptr || row >= sweep->result.rows.size()) return fail(GM_ERR_INVALID_ARGUMENT, "row out of range");
    const auto& r = sweep->result.rows[row];
    if (categories) *categories = r.categories;
    if (mean_queries) *mean_queries = r.meanQueries;
    if (mean_millis) *mean_millis = r.meanMillis;
    if (failures) *failures = r.failures;
    return GM_OK;
}

size_t gm_sweep_error_count(const gm_sweep* sweep) { return sweep ? sweep->result.errors.size() : 0; }

const char* gm_sweep_error(const gm_sweep* sweep, size_t index) {
    if (sweep == nullptr || index >= sweep->result.errors.size()) return nullptr;
    return sweep->result.errors[index].c_str();
}

void gm_sweep_free(gm_sweep* sweep) { delete sweep; }

}  // extern "C"
