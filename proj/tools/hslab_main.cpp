#include <CLI11.hpp>

#include <iostream>

#include "hslab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hslab: dual-pathway verification of Hardy-Stein type identities"};
    app.require_subcommand(1);

    std::string config_path;
    hslab::CliOverrides cli;
    uint64_t seed = 0;
    long n_paths = 0;
    std::string pathway, out_dir;
    int workers = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment configuration file")->required();
        cmd->add_option("--seed", seed, "master seed override");
        cmd->add_option("--paths", n_paths, "path-count override");
        cmd->add_option("--pathway", pathway, "mc|quad|both");
        cmd->add_option("--workers", workers, "worker thread count (0 = auto)");
    };

    CLI::App* run = app.add_subcommand("run", "execute the manifest and write reports");
    add_common(run);
    run->add_option("--out", out_dir, "report output directory");

    CLI::App* describe = app.add_subcommand("describe", "print the resolved plan");
    add_common(describe);

    CLI11_PARSE(app, argc, argv);

    auto fill = [&](CLI::App* cmd) {
        if (cmd->count("--seed")) cli.seed = seed;
        if (cmd->count("--paths")) cli.n_paths = n_paths;
        if (cmd->count("--pathway")) cli.pathway = pathway;
        if (cmd->count("--workers")) cli.workers = workers;
    };

    try {
        if (app.got_subcommand(run)) {
            fill(run);
            if (run->count("--out")) cli.out_dir = out_dir;
            hslab::RunConfig rc = hslab::load_config(config_path, cli);
            hslab::RunOutcome out = hslab::run_suite(rc);
            hslab::write_reports(rc, out);
            for (const auto& rep : out.reports)
                std::cout << (rep.pass ? "[pass] " : "[FAIL] ") << rep.entry_id << " ("
                          << hslab::identity_name(rep.id) << ")\n";
            for (const auto& m : out.messages) std::cerr << "note: " << m << "\n";
            std::cout << out.reports.size() << " reports, " << out.verdict_failures
                      << " verdict failures, " << out.computation_errors
                      << " computation errors; written to " << rc.out_dir << "\n";
            return hslab::exit_code(out);
        }
        if (app.got_subcommand(describe)) {
            fill(describe);
            hslab::RunConfig rc = hslab::load_config(config_path, cli);
            std::cout << hslab::describe(rc);
            return 0;
        }
    } catch (const hslab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hslab::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const hslab::ComputationError& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
