#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chaintransport/grid.hpp"
#include "chaintransport/model.hpp"
#include "chaintransport/transfer_time.hpp"

namespace chaintransport {

/// Liouville spectral route; on a numerical failure falls back to the
/// non-Hermitian route (gamma_phi = 0) and then to time integration.
/// Throws Error(unconverged) when the integration horizon is hit.
TransferTime transfer_time_auto(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                const SiteEnergies& site_energies = SiteEnergies());

enum class SweepParameter { e0, gamma_out, gamma_phi, disorder_width, n_sites, state_center };
enum class Observable { tau, delta_gamma, pr_super, pr_sub, current };

const char* to_string(SweepParameter p);   // E0, gamma_out, gamma_phi, W, N, n0
const char* to_string(Observable o);       // tau, delta_gamma, pr_super, pr_sub, current
SweepParameter parse_sweep_parameter(std::string_view name);
Observable parse_observable(std::string_view name);

struct SweepAxis {
    SweepParameter parameter = SweepParameter::e0;
    Grid grid;
};

struct EnsembleSpec {
    int n_realizations = 1;
    std::uint64_t seed = 0;
};

// n0 moves the Gaussian center or the localized site; it is an extension
// beyond the physical parameters so initial-state scans fit the same harness.
struct SweepSpec {
    ChainParams base;
    InitialState initial_state = GaussianState{};
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    Observable observable = Observable::tau;
    std::optional<EnsembleSpec> ensemble;  // required iff disorder is present
    bool gamma_out_at_st = false;          // resolve gamma_out per cell with locate_st
    std::string label;
};

/// Throws Error(invalid_argument) on inconsistent specs (for example disorder
/// without an ensemble).
void validate(const SweepSpec& spec);

struct SweepFailure {
    int i1 = 0;
    int i2 = 0;
    std::string message;
};

struct Provenance {
    std::string version;
    std::string timestamp;  // UTC, ISO 8601
    double cpu_seconds = 0.0;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<double> axis1;
    std::vector<double> axis2;  // single 0 entry for one-dimensional sweeps
    Eigen::MatrixXd values;     // [axis1 x axis2]; NaN only where status != ok
    Eigen::MatrixXd stderrs;    // ensemble standard error, 0 otherwise
    std::vector<std::vector<std::string>> status;  // "ok", "partial:k/n", "failed:<kind>"
    std::vector<SweepFailure> failures;
    Provenance provenance;
};

struct RunOptions {
    int jobs = 0;  // 0: hardware concurrency
};

/// Evaluates the observable on every grid cell. Cells and realizations run
/// concurrently; reduction is sequential, so results do not depend on jobs.
SweepResult run_sweep(const SweepSpec& spec, const RunOptions& options = {});

struct OptimalFieldResult {
    std::vector<double> grid;
    std::vector<double> tau;       // NaN where the solver failed
    double e0_opt = 0.0;
    double tau_min = 0.0;
    double plateau_low = 0.0;      // contiguous region with tau <= 1.1 tau_min
    double plateau_high = 0.0;
    double estimator_e0 = 0.0;     // spectral estimator, right-vector overlaps
    double estimator_e0_left = 0.0;
    bool unbracketed = false;      // minimizer sits on the grid boundary
    int failed_points = 0;
};

OptimalFieldResult optimal_field_search(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                        const std::vector<double>& e0_grid,
                                        const RunOptions& options = {});

struct ScalingRow {
    int n_sites = 0;
    std::string state;
    double e0_used = 0.0;
    double tau_min = 0.0;
};

/// For each N: Gaussian states use their optimal field from a grid search,
/// localized and flat states use E0 = 0. Localized sites are clamped to N.
std::vector<ScalingRow> n_scaling_comparison(const ChainParams& params,
                                             const std::vector<int>& n_values,
                                             const std::vector<InitialState>& states,
                                             const std::vector<double>& e0_grid,
                                             const RunOptions& options = {});

/// tau averaged over disorder realizations on a W x gamma_phi grid at E0 = 0.
SweepResult disorder_study(const ChainParams& params, const InitialState& state, const Grid& w_grid,
                           const Grid& gamma_phi_grid, int n_realizations, std::uint64_t seed,
                           const RunOptions& options = {});

struct CurrentResult {
    std::vector<double> e0_grid;
    std::vector<double> current;   // 1/tau(-E0) - 1/tau(E0); NaN where dropped
    double conductance = 0.0;      // least-squares slope of I against V = N E0
    double fit_window = 0.0;
    double residual = 0.0;         // RMS misfit over the fit window
    int fit_points = 0;
    int dropped_points = 0;
};

/// The default initial state is Gaussian((N+1)/2, 1, 0); a non-positive
/// fit_window selects 0.5 times the critical field.
CurrentResult current_and_conductance(const ChainParams& params, const std::vector<double>& e0_grid,
                                      double fit_window = 0.0,
                                      const std::optional<InitialState>& state = std::nullopt,
                                      const RunOptions& options = {});

/// Evaluates fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);
int resolve_jobs(int jobs);

} // namespace chaintransport
