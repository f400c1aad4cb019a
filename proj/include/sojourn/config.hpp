#pragma once

#include "sojourn/study_harness.hpp"

#include <optional>
#include <string>

namespace sojourn {

/// An experiment file as read from JSON:
///
///   {"model": {"kind": "powered_exponential", "alpha": 1.0, "scale": 1.0, "d": 1},
///    "grid": {"T": 100.0, "h": 0.1}, "T_ladder": [25, 100, 400],
///    "u": 0.0, "u_schedule": {"c": 2.0, "gamma": 0.01},
///    "mode": "fixed", "beta": 0.25, "replicates": 4000, "seed": 42, "workers": 1}
///
/// Every key is optional except model. Unknown keys are rejected. When
/// T_ladder is missing, grid.T becomes a one-entry ladder.
struct ConfigFile {
  ExperimentConfig experiment;
  std::optional<double> grid_T;
};

ConfigFile parse_config(const std::string& json_text);
/// Throws IoError when the file cannot be read, ConfigError on bad content.
ConfigFile load_config(const std::string& path);

}  // namespace sojourn
