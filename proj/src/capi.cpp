#include "pairlaser.h"

#include <cstring>
#include <functional>
#include <new>
#include <string>
#include <vector>

#include "pairlaser/config.hpp"
#include "pairlaser/scenario.hpp"
#include "pairlaser/table.hpp"
#include "pairlaser/version.hpp"

#define PL_EXPORT __attribute__((visibility("default")))

struct pl_session {
    std::string last_error;
    std::string normalized;
    int threads = 0;
    uint64_t seed = 0;
    std::string format;  // empty = keep config's choice
};

struct pl_run {
    std::vector<std::pair<std::string, std::string>> artifacts;
    bool point_failures = false;
};

namespace {

pl_status guard(pl_session* s, const std::function<void()>& body) {
    if (!s) return PL_ERR_INTERNAL;
    s->last_error.clear();
    try {
        body();
        return PL_OK;
    } catch (const std::invalid_argument& e) {
        s->last_error = e.what();
        return PL_ERR_VALIDATION;
    } catch (const std::runtime_error& e) {
        s->last_error = e.what();
        return PL_ERR_RUNTIME;
    } catch (const std::exception& e) {
        s->last_error = e.what();
        return PL_ERR_INTERNAL;
    } catch (...) {
        s->last_error = "unknown error";
        return PL_ERR_INTERNAL;
    }
}

void apply_overrides(const pl_session* s, pairlaser::config::ScenarioConfig& cfg) {
    if (s->threads > 0) cfg.threads = s->threads;
    if (s->seed != 0) cfg.seed = s->seed;
    if (s->format == "csv") cfg.format = pairlaser::config::Format::Csv;
    if (s->format == "json") cfg.format = pairlaser::config::Format::Json;
}

}  // namespace

extern "C" {

PL_EXPORT pl_session* pl_session_new(void) { return new (std::nothrow) pl_session; }

PL_EXPORT void pl_session_free(pl_session* s) { delete s; }

PL_EXPORT const char* pl_last_error(const pl_session* s) {
    return s ? s->last_error.c_str() : "null session";
}

PL_EXPORT pl_status pl_set_threads(pl_session* s, int threads) {
    return guard(s, [&] {
        if (threads < 0) throw std::invalid_argument("threads must be >= 0");
        s->threads = threads;
    });
}

PL_EXPORT pl_status pl_set_seed(pl_session* s, uint64_t seed) {
    return guard(s, [&] { s->seed = seed; });
}

PL_EXPORT pl_status pl_set_format(pl_session* s, const char* format) {
    return guard(s, [&] {
        const std::string f = format ? format : "";
        if (f != "csv" && f != "json" && !f.empty())
            throw std::invalid_argument("format must be csv or json");
        s->format = f;
    });
}

PL_EXPORT pl_status pl_validate(pl_session* s, const char* config_text, const char** normalized) {
    return guard(s, [&] {
        if (!config_text) throw std::invalid_argument("config text is null");
        auto cfg = pairlaser::config::validate_config(config_text);
        s->normalized = cfg.serialize();
        if (normalized) *normalized = s->normalized.c_str();
    });
}

PL_EXPORT pl_status pl_run_scenario(pl_session* s, const char* config_text, pl_run** out) {
    return guard(s, [&] {
        if (!config_text || !out) throw std::invalid_argument("null argument");
        auto cfg = pairlaser::config::validate_config(config_text);
        apply_overrides(s, cfg);
        auto t = pairlaser::scenario::run_scenario(cfg);
        auto* r = new pl_run;
        const bool json = cfg.format == pairlaser::config::Format::Json;
        r->artifacts.emplace_back(json ? "scenario.json" : "scenario.csv",
                                  json ? t.to_json() : t.to_csv());
        r->point_failures = t.any_failures();
        *out = r;
    });
}

PL_EXPORT pl_status pl_run_figure(pl_session* s, const char* figure_id, pl_run** out) {
    return guard(s, [&] {
        if (!figure_id || !out) throw std::invalid_argument("null argument");
        auto fig = pairlaser::scenario::reproduce_figure(figure_id, s->threads, s->seed);
        auto* r = new pl_run;
        for (auto& a : fig.artifacts) r->artifacts.emplace_back(a.name, std::move(a.content));
        r->point_failures = fig.had_point_failures;
        *out = r;
    });
}

PL_EXPORT void pl_run_free(pl_run* r) { delete r; }

PL_EXPORT int pl_run_artifact_count(const pl_run* r) {
    return r ? int(r->artifacts.size()) : 0;
}

PL_EXPORT const char* pl_run_artifact_name(const pl_run* r, int index) {
    if (!r || index < 0 || index >= int(r->artifacts.size())) return nullptr;
    return r->artifacts[index].first.c_str();
}

PL_EXPORT const char* pl_run_artifact_data(const pl_run* r, int index) {
    if (!r || index < 0 || index >= int(r->artifacts.size())) return nullptr;
    return r->artifacts[index].second.c_str();
}

PL_EXPORT int pl_run_had_point_failures(const pl_run* r) {
    return r && r->point_failures ? 1 : 0;
}

PL_EXPORT const char* pl_version(void) { return pairlaser::kVersion; }

}  // extern "C"
