#include "symdyn/symdyn.h"

#include <new>
#include <string>

#include "symdyn/config.hpp"
#include "symdyn/error.hpp"
#include "symdyn/reports.hpp"

struct symdyn_config {
    symdyn::ExperimentConfig cfg;
    int threads = 1;
    std::string json;
};

struct symdyn_result {
    symdyn::CommandResult res;
};

namespace {

thread_local std::string last_error;

symdyn_status fail(symdyn_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

// Maps exceptions from the core onto status codes.
template <class F>
symdyn_status guarded(F&& f) {
    try {
        last_error.clear();
        return f();
    } catch (const symdyn::InputError& e) {
        return fail(SYMDYN_ERR_INPUT, e.what());
    } catch (const symdyn::BudgetExhausted& e) {
        return fail(SYMDYN_ERR_BUDGET, e.what());
    } catch (const symdyn::InconsistencyError& e) {
        return fail(SYMDYN_ERR_INCONSISTENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SYMDYN_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SYMDYN_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SYMDYN_ERR_INTERNAL, "unknown error");
    }
}

symdyn_status null_arg(const char* what) { return fail(SYMDYN_ERR_INPUT, std::string(what) + " is NULL"); }

} // namespace

extern "C" {

const char* symdyn_version(void) { return symdyn::kArtifactVersion; }

const char* symdyn_last_error(void) { return last_error.c_str(); }

symdyn_status symdyn_config_load(const char* path, symdyn_config** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        *out = new symdyn_config{symdyn::load_config(path), 1, {}};
        return SYMDYN_OK;
    });
}

symdyn_status symdyn_config_parse(const char* json_text, symdyn_config** out) {
    if (!json_text) return null_arg("json_text");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        *out = new symdyn_config{symdyn::parse_config_text(json_text), 1, {}};
        return SYMDYN_OK;
    });
}

void symdyn_config_free(symdyn_config* cfg) { delete cfg; }

const char* symdyn_config_digest(const symdyn_config* cfg) { return cfg ? cfg->cfg.digest.c_str() : ""; }

const char* symdyn_config_json(symdyn_config* cfg) {
    if (!cfg) return "";
    cfg->json = symdyn::to_json(cfg->cfg).dump(2);
    return cfg->json.c_str();
}

const char* symdyn_config_output_dir(const symdyn_config* cfg) { return cfg ? cfg->cfg.output_dir.c_str() : ""; }

symdyn_status symdyn_config_set_output_dir(symdyn_config* cfg, const char* dir) {
    if (!cfg) return null_arg("cfg");
    if (!dir || !*dir) return fail(SYMDYN_ERR_INPUT, "output directory is empty");
    cfg->cfg.output_dir = dir;
    return SYMDYN_OK;
}

symdyn_status symdyn_config_set_budget(symdyn_config* cfg, uint64_t nodes) {
    if (!cfg) return null_arg("cfg");
    if (nodes == 0) return fail(SYMDYN_ERR_INPUT, "budget must be positive");
    cfg->cfg.budget = nodes;
    cfg->cfg.search.budget = nodes;
    return SYMDYN_OK;
}

symdyn_status symdyn_config_set_threads(symdyn_config* cfg, int threads) {
    if (!cfg) return null_arg("cfg");
    if (threads < 1) return fail(SYMDYN_ERR_INPUT, "threads must be at least 1");
    cfg->threads = threads;
    return SYMDYN_OK;
}

symdyn_status symdyn_count_words(const symdyn_config* cfg, size_t n, uint64_t* count) {
    if (!cfg) return null_arg("cfg");
    if (!count) return null_arg("count");
    return guarded([&] {
        *count = symdyn::count_language(*cfg->cfg.subshift, n, cfg->cfg.budget);
        return SYMDYN_OK;
    });
}

symdyn_status symdyn_run(const symdyn_config* cfg, const char* command, const char* tag, symdyn_result** out) {
    if (out) *out = nullptr;
    if (!cfg) return null_arg("cfg");
    if (!command) return null_arg("command");
    return guarded([&] {
        symdyn::RunOptions opt;
        opt.threads = cfg->threads;
        auto* r = new symdyn_result{symdyn::run_command(cfg->cfg, command, tag ? tag : "", opt)};
        const auto status = static_cast<symdyn_status>(r->res.code);
        if (status != SYMDYN_OK) last_error = r->res.message;
        if (out) *out = r;
        else delete r;
        return status;
    });
}

symdyn_status symdyn_result_status(const symdyn_result* res) {
    return res ? static_cast<symdyn_status>(res->res.code) : SYMDYN_ERR_INPUT;
}

const char* symdyn_result_status_name(const symdyn_result* res) { return res ? res->res.status.c_str() : ""; }

const char* symdyn_result_message(const symdyn_result* res) { return res ? res->res.message.c_str() : ""; }

const char* symdyn_result_output_dir(const symdyn_result* res) { return res ? res->res.out_dir.c_str() : ""; }

size_t symdyn_result_file_count(const symdyn_result* res) { return res ? res->res.files.size() : 0; }

const char* symdyn_result_file(const symdyn_result* res, size_t i) {
    if (!res || i >= res->res.files.size()) return nullptr;
    return res->res.files[i].c_str();
}

void symdyn_result_free(symdyn_result* res) { delete res; }

} // extern "C"
