// Command-line driver: run experiments from JSON configs and run the oracle
// cross-validations.
//
// Exit codes: 0 success, 1 configuration error, 2 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "iqswitch/experiment.hpp"
#include "iqswitch/verify.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kVerifyFailure = 2;

int run_config(const std::string& path, const std::string& out_override, int threads, bool require_sweep) {
    using namespace iqswitch;
    const ExperimentConfig config = load_config(path);
    if (require_sweep && !config.sweep) throw ConfigError("sweep needs a 'sweep' axis in the config");
    for (const Job& job : expand(config))
        for (const auto& w : job.traffic.warnings) std::cerr << "warning: n=" << job.n << ": " << w << '\n';

    const RunResult result = run_experiment(config, threads > 0 ? threads : default_thread_count());
    const std::string out_path = out_override.empty() ? config.output : out_override;
    if (out_path.empty() || out_path == "-") {
        write_csv(std::cout, config, result);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + out_path + "'");
        write_csv(out, config, result);
        std::cerr << "wrote " << result.rows.size() << " rows to " << out_path << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Input-queued switch scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, suite;
    int threads = 0;

    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_option("--out", out_path, "CSV output path ('-' for stdout); overrides the config");
    run->add_option("--threads", threads, "Worker threads (default: IQSWITCH_THREADS or all cores)");

    auto* sweep = app.add_subcommand("sweep", "Run a config that declares a sweep axis");
    sweep->add_option("config", config_path, "JSON experiment config")->required();
    sweep->add_option("--out", out_path, "CSV output path ('-' for stdout); overrides the config");
    sweep->add_option("--threads", threads, "Worker threads (default: IQSWITCH_THREADS or all cores)");

    auto* verify = app.add_subcommand("verify", "Cross-check implementations against brute-force oracles");
    verify->add_option("suite", suite, "matching | projection | weight_bound | single_queue | all")
        ->default_val("all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run) return run_config(config_path, out_path, threads, false);
        if (*sweep) return run_config(config_path, out_path, threads, true);
        if (*verify) {
            bool ok = true;
            for (const auto& r : iqswitch::run_verification(suite)) {
                std::printf("%-14s %s  residual=%.3e  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                            r.residual, r.detail.c_str());
                ok = ok && r.passed;
            }
            return ok ? 0 : kVerifyFailure;
        }
    } catch (const iqswitch::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return 0;
}
