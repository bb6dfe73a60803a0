#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaintransport/experiments.hpp"

namespace chaintransport {

// Run configurations are flat JSON objects whose keys match the command-line
// flags without leading dashes ("n", "omega", "gamma-out", "axis1", ...).
// Values are in the user's units; conversion rescales energies and rates by
// omega so the library always runs with hopping = 1.
using Config = nlohmann::json;

/// %.9g
std::string format_number(double v);

/// Reads n, omega, e0, gamma-out, gamma-phi, w, seed. Missing keys take defaults.
ChainParams chain_params_from_config(const Config& cfg);

/// "E0=lin:-1,1,21" style axis; energy-like grids are divided by omega.
SweepAxis parse_axis(const std::string& text, double omega);

/// Strict: throws Error(invalid_argument) on unknown keys.
SweepSpec sweep_spec_from_config(const Config& cfg);

/// Keys accepted by sweep_spec_from_config, in canonical order.
const std::vector<std::string>& sweep_config_keys();

/// Compact JSON with sorted keys; parses back to an equal object.
std::string canonical(const Config& cfg);

/// `# spec: <spec_json>` then `axis1,axis2,value,stderr,status`. One-dimensional
/// sweeps leave axis2 empty; failed cells leave value and stderr empty.
void write_sweep_csv(std::ostream& os, const SweepResult& result, const std::string& spec_json);

struct SweepCsvRow {
    double axis1 = 0.0;
    std::optional<double> axis2;
    std::optional<double> value;
    std::optional<double> stderr_value;
    std::string status;
};

struct SweepCsv {
    std::string spec_json;
    std::vector<SweepCsvRow> rows;
};

SweepCsv read_sweep_csv(std::istream& is);

/// First-line `# spec: {...}` of a file, or the whole file as a JSON object.
Config load_config_text(const std::string& text);

} // namespace chaintransport
