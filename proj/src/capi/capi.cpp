#include "meshdetect.h"

#include <exception>
#include <fstream>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/sim.hpp"
#include "core/sweep.hpp"

using namespace meshdetect;

struct md_config {
    ScenarioConfig cfg;
    std::string get_buffer;
};

struct md_result {
    std::string metrics;
    std::string csv;
    bool has_metrics = false;
    bool has_csv = false;
};

namespace {

thread_local std::string g_last_error;

int fail_config(const std::string& msg) {
    g_last_error = msg;
    return MD_ERR_CONFIG;
}

int fail_runtime(const std::string& msg) {
    g_last_error = msg;
    return MD_ERR_RUNTIME;
}

// Runs `body` (returning MD_OK) under the library's exception-to-status
// mapping: config errors to MD_ERR_CONFIG, everything else to
// MD_ERR_RUNTIME.
template <typename Fn>
int guarded(Fn&& body) {
    try {
        int rc = body();
        if (rc == MD_OK) g_last_error.clear();
        return rc;
    } catch (const ConfigError& e) {
        return fail_config(e.what());
    } catch (const std::exception& e) {
        return fail_runtime(e.what());
    } catch (...) {
        return fail_runtime("unknown error");
    }
}

} // namespace

extern "C" {

const char* md_version(void) { return "1.0.0"; }

const char* md_last_error(void) { return g_last_error.c_str(); }

md_config* md_config_create(void) {
    try {
        return new md_config();
    } catch (...) {
        return nullptr;
    }
}

void md_config_free(md_config* cfg) { delete cfg; }

int md_config_load_file(md_config* cfg, const char* path) {
    if (!cfg || !path) return fail_config("null argument");
    return guarded([&] {
        std::ifstream in(path);
        if (!in) throw ConfigError(std::string("cannot open config file ") + path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        ScenarioConfig next = cfg->cfg;
        parse_config_text(text, next);
        cfg->cfg = next;
        return MD_OK;
    });
}

int md_config_set(md_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail_config("null argument");
    return guarded([&] {
        apply_override(cfg->cfg, key, value);
        return MD_OK;
    });
}

const char* md_config_get(md_config* cfg, const char* key) {
    if (!cfg || !key) return nullptr;
    try {
        cfg->get_buffer = config_get(cfg->cfg, key);
        return cfg->get_buffer.c_str();
    } catch (...) {
        return nullptr;
    }
}

int md_run(const md_config* cfg, const char* trace_path, md_result** out) {
    if (!cfg || !out) return fail_config("null argument");
    *out = nullptr;
    return guarded([&] {
        SimResult result;
        if (trace_path) {
            std::ofstream trace(trace_path);
            if (!trace) throw RuntimeError(std::string("cannot open trace file ") + trace_path);
            result = run_simulation(cfg->cfg, &trace);
            trace.flush();
            if (!trace) throw RuntimeError(std::string("error writing trace file ") + trace_path);
        } else {
            result = run_simulation(cfg->cfg);
        }
        auto* res = new md_result();
        res->metrics = result.metrics.dump();
        res->has_metrics = true;
        *out = res;
        return MD_OK;
    });
}

int md_replay(const char* trace_path, md_result** out) {
    if (!trace_path || !out) return fail_config("null argument");
    *out = nullptr;
    return guarded([&] {
        std::ifstream trace(trace_path);
        if (!trace) throw RuntimeError(std::string("cannot open trace file ") + trace_path);
        SimResult result = replay_trace(trace);
        auto* res = new md_result();
        res->metrics = result.metrics.dump();
        res->has_metrics = true;
        *out = res;
        return MD_OK;
    });
}

int md_sweep(const md_config* cfg, const double* probs, size_t prob_count, uint32_t runs,
             uint32_t jobs, md_result** out) {
    if (!cfg || !out) return fail_config("null argument");
    if (prob_count > 0 && !probs) return fail_config("null probability array");
    *out = nullptr;
    return guarded([&] {
        SweepSpec spec;
        spec.base = cfg->cfg;
        if (prob_count > 0) spec.drop_probs.assign(probs, probs + prob_count);
        if (runs > 0) spec.runs_per_point = runs;
        spec.jobs = jobs > 0 ? jobs : 1;
        SweepResult result = run_sweep(spec);

        bool any_ok = false;
        for (const SweepPointStats& p : result.points) any_ok = any_ok || p.runs > 0;
        if (!any_ok) {
            std::string msg = "every sweep cell failed";
            if (!result.errors.empty()) msg += "; first: " + result.errors.front();
            throw RuntimeError(msg);
        }

        auto* res = new md_result();
        res->csv = result.csv;
        res->has_csv = true;
        *out = res;
        return MD_OK;
    });
}

const char* md_result_metrics(const md_result* res) {
    if (!res || !res->has_metrics) return nullptr;
    return res->metrics.c_str();
}

const char* md_result_csv(const md_result* res) {
    if (!res || !res->has_csv) return nullptr;
    return res->csv.c_str();
}

void md_result_free(md_result* res) { delete res; }

} // extern "C"
