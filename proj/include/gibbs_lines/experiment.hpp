#ifndef GIBBS_LINES_EXPERIMENT_HPP
#define GIBBS_LINES_EXPERIMENT_HPP

#include <cstdint>
#include <string>

#include "json.hpp"

namespace gibbs_lines {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string out_dir = ".";
    bool out_dir_from_cli = false;
    std::optional<std::uint64_t> seed_override;
    int workers = 1;
    bool plots = true;
};

// Executes the experiment described by a config document (or by a manifest
// from a previous run, which embeds the resolved config). Writes a manifest,
// data CSVs, check reports and optional SVG plots into out_dir; nothing is
// left behind on error. Returns 0 when all enabled checks pass, 1 on a check
// failure.
int run_experiment(const nlohmann::json& config, const RunOptions& opts);

// Same, but runs only the brute-force oracles defined for the experiment
// kind; exits with ConfigError for kinds without an oracle.
int run_oracle(const nlohmann::json& config, const RunOptions& opts);

nlohmann::json load_config_file(const std::string& path);

} // namespace gibbs_lines

#endif
