// Experiment configuration: a small TOML-style file format (sections,
// key = value, numbers/strings/booleans/flat arrays, # comments) parsed into
// JSON, then validated into model + boundary + run parameters.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lastexit/boundary.hpp"
#include "lastexit/covariance.hpp"
#include "lastexit/study.hpp"

namespace lastexit {

struct ExperimentConfig {
    CovarianceModel model = CovarianceModel::ornstein_uhlenbeck();
    Boundary boundary = builtin_polynomial(2);

    // One or more target scales, strictly decreasing when more than one.
    std::vector<double> eps_ladder{1e-3};
    std::size_t n_replicates = 0;  // 0 = not specified
    std::uint64_t seed = 1;
    GridPolicy grid;
    std::string out;            // output path; empty = stdout
    std::string format = "json";

    nlohmann::json raw;  // resolved settings, embedded in output headers
};

// Parses the TOML-subset text. Unknown syntax throws ConfigError naming the
// line. Sections become nested JSON objects.
nlohmann::json parse_toml_subset(const std::string& text);

// Validates parsed JSON into a runnable configuration. Unknown keys, bad
// kinds, non-decreasing ladders, and n_replicates < 100 all throw.
ExperimentConfig experiment_from_json(const nlohmann::json& doc);

ExperimentConfig load_config_file(const std::string& path);

// Two whitespace-separated columns (lag, covariance); # comments allowed.
std::pair<std::vector<double>, std::vector<double>> load_table_file(const std::string& path);

}  // namespace lastexit
