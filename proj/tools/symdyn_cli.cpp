// Command-line front end over the C API.
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "symdyn/symdyn.h"

namespace {

struct Args {
    std::string config;
    std::string out;
    std::uint64_t budget = 0;
    int threads = 1;
    std::string tag;
};

// SYMDYN_OUTPUT_ROOT prefixes relative output directories.
std::string resolve_out(const std::string& dir) {
    const char* root = std::getenv("SYMDYN_OUTPUT_ROOT");
    if (!root || !*root || (!dir.empty() && dir[0] == '/')) return dir;
    std::string r(root);
    if (r.back() != '/') r += '/';
    return r + dir;
}

int run(const std::string& command, const Args& a) {
    symdyn_config* cfg = nullptr;
    symdyn_status st = symdyn_config_load(a.config.c_str(), &cfg);
    if (st != SYMDYN_OK) {
        std::fprintf(stderr, "error: %s\n", symdyn_last_error());
        return st;
    }
    std::string out = resolve_out(a.out.empty() ? symdyn_config_output_dir(cfg) : a.out);
    if ((st = symdyn_config_set_output_dir(cfg, out.c_str())) != SYMDYN_OK ||
        (a.budget && (st = symdyn_config_set_budget(cfg, a.budget)) != SYMDYN_OK) ||
        (st = symdyn_config_set_threads(cfg, a.threads)) != SYMDYN_OK) {
        std::fprintf(stderr, "error: %s\n", symdyn_last_error());
        symdyn_config_free(cfg);
        return st;
    }
    symdyn_result* res = nullptr;
    st = symdyn_run(cfg, command.c_str(), a.tag.empty() ? nullptr : a.tag.c_str(), &res);
    if (res) {
        std::printf("%s%s%s: %s\n", command.c_str(), a.tag.empty() ? "" : " ", a.tag.c_str(), symdyn_result_status_name(res));
        for (std::size_t i = 0; i < symdyn_result_file_count(res); ++i) std::printf("  %s\n", symdyn_result_file(res, i));
        if (*symdyn_result_message(res)) std::fprintf(st == SYMDYN_OK ? stdout : stderr, "%s\n", symdyn_result_message(res));
    } else {
        std::fprintf(stderr, "error: %s\n", symdyn_last_error());
    }
    symdyn_result_free(res);
    symdyn_config_free(cfg);
    return st;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-horizon thermodynamic formalism for symbolic subshifts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", symdyn_version());
    Args a;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", a.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", a.out, "output directory (overrides output_dir)");
        sub->add_option("--budget", a.budget, "search node budget")->check(CLI::PositiveNumber);
        sub->add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber);
    };
    common(app.add_subcommand("enumerate", "language files and counts"));
    common(app.add_subcommand("pressure", "partition table, variation profile and pressure bracket"));
    common(app.add_subcommand("gap-profile", "empirical gap bounds by gluing search"));
    auto* verify = app.add_subcommand("verify", "check one inequality; exit 0 Pass, 5 Fail, 6 PreconditionFail");
    common(verify);
    verify->add_option("tag", a.tag, "Thm4_2 | Cor4_3 | Thm4_4 | Thm4_6 | Thm5_2 | Thm5_6")->required();
    common(app.add_subcommand("equilibrium", "transfer operator, Perron data and Markov equilibrium"));
    common(app.add_subcommand("anchors", "anchor sequence and growth of f + g"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return SYMDYN_ERR_INPUT;
    }
    return run(app.get_subcommands().front()->get_name(), a);
}
