// Command-line front end; talks to the simulator only through the C API.
//
//   pairlaser run <config> [--out DIR] [--threads N] [--seed S] [--format csv|json]
//   pairlaser figure <id>  [--out DIR] [--threads N] [--seed S]
//   pairlaser validate <config>
//
// Exit codes: 0 ok, 1 validation error, 2 per-point failures, 3 internal.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pairlaser.h"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int write_artifacts(const pl_run* run, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (int i = 0; i < pl_run_artifact_count(run); ++i) {
        const std::filesystem::path p =
            std::filesystem::path(out_dir) / pl_run_artifact_name(run, i);
        std::ofstream f(p, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << p << "\n";
            return 3;
        }
        f << pl_run_artifact_data(run, i);
        std::cerr << "wrote " << p.string() << "\n";
    }
    return 0;
}

int status_to_exit(pl_status st) {
    switch (st) {
        case PL_OK: return 0;
        case PL_ERR_VALIDATION: return 1;
        case PL_ERR_RUNTIME: return 2;
        default: return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"atom-photon pair laser simulator"};
    app.require_subcommand(1);

    std::string config_path, figure_id, out_dir, format;
    int threads = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;

    if (const char* env = std::getenv("PAIRLASER_OUT")) out_dir = env;
    if (const char* env = std::getenv("PAIRLASER_THREADS")) threads = std::atoi(env);

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--threads", threads, "worker threads (0 = auto)");
        cmd->add_option("--seed", seed, "random seed (sde)")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--format", format, "csv or json");
    };

    auto* run_cmd = app.add_subcommand("run", "run a scenario config");
    run_cmd->add_option("config", config_path, "scenario config file")->required();
    add_common(run_cmd);

    auto* fig_cmd = app.add_subcommand("figure", "run a pre-registered figure recipe");
    fig_cmd->add_option("id", figure_id, "figure id (fig2 fig3 fig4a fig4b fig5a fig5b)")
        ->required();
    add_common(fig_cmd);

    auto* val_cmd = app.add_subcommand("validate", "validate a scenario config");
    val_cmd->add_option("config", config_path, "scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    if (out_dir.empty()) out_dir = ".";

    pl_session* s = pl_session_new();
    if (!s) {
        std::cerr << "error: out of memory\n";
        return 3;
    }
    struct SessionGuard {
        pl_session* s;
        ~SessionGuard() { pl_session_free(s); }
    } guard{s};

    if (threads >= 0) pl_set_threads(s, threads);
    if (seed_set) pl_set_seed(s, seed);
    if (!format.empty() && pl_set_format(s, format.c_str()) != PL_OK) {
        std::cerr << "error: " << pl_last_error(s) << "\n";
        return 1;
    }

    try {
        if (val_cmd->parsed()) {
            const std::string text = read_file(config_path);
            const char* normalized = nullptr;
            const pl_status st = pl_validate(s, text.c_str(), &normalized);
            if (st != PL_OK) {
                std::cerr << "invalid config:\n" << pl_last_error(s);
                return 1;
            }
            std::cout << normalized;
            return 0;
        }

        pl_run* run = nullptr;
        pl_status st;
        if (run_cmd->parsed()) {
            const std::string text = read_file(config_path);
            st = pl_run_scenario(s, text.c_str(), &run);
        } else {
            st = pl_run_figure(s, figure_id.c_str(), &run);
        }
        if (st != PL_OK) {
            std::cerr << "error: " << pl_last_error(s) << "\n";
            return status_to_exit(st);
        }
        const int wr = write_artifacts(run, out_dir);
        const bool partial = pl_run_had_point_failures(run) != 0;
        pl_run_free(run);
        if (wr != 0) return wr;
        if (partial) {
            std::cerr << "warning: some scan points failed (see flag columns)\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
