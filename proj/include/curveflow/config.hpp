#pragma once

#include "curveflow/thermo.hpp"

#include <string>
#include <string_view>

namespace curveflow {

// Gas configuration file:
//   { "R": real, "n": int, "k": real, "g": real, "lambda": real,
//     "potential": { "type": "ideal" | "virial", "coeffs": [[c0, c1, ...], ...] } }
// omega is derived and may not be supplied. Unknown keys are rejected.
struct GasConfig {
    GasParams gas;
    PlanckPotential potential;
};

/// Throws ConfigError with a one-line description of the first problem found.
GasConfig parse_gas_config(std::string_view json_text);
GasConfig load_gas_config(const std::string& path);

/// R = 1, n = 3, k = 1, g = 1, lambda = 0.5 (so omega = 1), ideal gas.
GasConfig default_gas_config();

std::string gas_config_to_json(const GasConfig& config);

} // namespace curveflow
