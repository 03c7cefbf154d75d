#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lyapflow/experiment.hpp"

using namespace lyapflow;

int main(int argc, char** argv) {
    CLI::App app{"continuous-time optimization dynamics lab: simulate accelerated "
                 "gradient flows, certify Lyapunov inequalities, rediscover Lyapunov "
                 "functions, estimate convergence rates"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", config_path, "experiment configuration (JSON)")
                ->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--jobs", jobs, "max concurrent experiment cells")
            ->check(CLI::PositiveNumber);
    };

    auto* simulate = app.add_subcommand("simulate", "integrate the configured flows to CSV");
    auto* certify = app.add_subcommand("certify", "run every Lyapunov certification");
    auto* discover = app.add_subcommand("discover", "symbolic Lyapunov candidate search");
    auto* fit = app.add_subcommand("fit", "empirical convergence-rate fits and comparisons");
    auto* report = app.add_subcommand("report", "aggregate prior outputs into one summary");
    add_common(simulate, true);
    add_common(certify, true);
    add_common(discover, true);
    add_common(fit, true);
    add_common(report, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        RunContext ctx;
        ctx.jobs = jobs;
        ctx.out_dir = out_dir;
        if (ctx.out_dir.empty()) {
            if (const char* env = std::getenv("LYAPFLOW_OUT")) ctx.out_dir = env;
        }

        if (report->parsed()) {
            if (ctx.out_dir.empty()) {
                std::cerr << "report: no output directory (--out or LYAPFLOW_OUT)\n";
                return kExitConfigError;
            }
            return run_report(ctx);
        }

        ExperimentConfig cfg = load_config(config_path);
        if (seed_set) cfg.seed = seed;
        ctx.seed = cfg.seed;
        if (ctx.out_dir.empty()) ctx.out_dir = cfg.output_dir;
        if (ctx.out_dir.empty()) {
            std::cerr << "no output directory (--out, LYAPFLOW_OUT, or config output_dir)\n";
            return kExitConfigError;
        }

        if (simulate->parsed()) return run_simulate(cfg, ctx);
        if (certify->parsed()) return run_certify(cfg, ctx);
        if (discover->parsed()) return run_discover(cfg, ctx);
        if (fit->parsed()) return run_fit(cfg, ctx);
        return kExitConfigError;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const IntegrationError& e) {
        std::cerr << "integration failure: " << e.what() << " (last good t=" << e.last_t
                  << ")\n";
        return kExitIntegrationFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
