#pragma once

#include <string>
#include <string_view>

#include "levysde/montecarlo.hpp"

namespace levysde {

/// Parses the study configuration. The accepted syntax is the flat TOML
/// subset the bundled configs use: `key = value` lines, `#` comments,
/// numbers, quoted strings, booleans and (nested) arrays, which may span
/// several lines.
///
/// Recognized keys: model, theta0, driver, delta, rate, grid, u,
/// replications, base_seed, fine_factor, ci_level, workers, x0. Unknown keys
/// are rejected.
ExperimentConfig parse_experiment_config(std::string_view text);

ExperimentConfig load_experiment_config(const std::string& path);

} // namespace levysde
