#include <cstdio>
#include <exception>

#include "CLI11.hpp"

#include "gibbs_lines/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"gibbs-lines: simulation and verification toolkit for discrete "
                 "Gibbsian line ensembles"};
    app.require_subcommand(1);

    std::string config_path;
    gibbs_lines::RunOptions opts;
    std::uint64_t seed = 0;
    bool no_plots = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config JSON")->required();
        cmd->add_option("--out", opts.out_dir, "output directory (default: .)");
        cmd->add_option("--seed", seed, "override the config's root seed");
        cmd->add_option("--workers", opts.workers, "worker pool size (default: 1)")
            ->check(CLI::Range(1, 1024));
        cmd->add_flag("--no-plots", no_plots, "skip SVG plot emission");
    };
    CLI::App* run = app.add_subcommand("run", "run the experiment described by the config");
    add_common(run);
    CLI::App* oracle =
        app.add_subcommand("oracle", "run only the brute-force oracles for the config");
    add_common(oracle);

    CLI11_PARSE(app, argc, argv);
    opts.plots = !no_plots;
    opts.out_dir_from_cli = run->count("--out") || oracle->count("--out");
    if (run->count("--seed") || oracle->count("--seed")) opts.seed_override = seed;

    try {
        const auto config = gibbs_lines::load_config_file(config_path);
        const int rc = run->parsed() ? gibbs_lines::run_experiment(config, opts)
                                     : gibbs_lines::run_oracle(config, opts);
        return rc;
    } catch (const gibbs_lines::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
