#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chaintransport/model.hpp"

namespace chaintransport {

// Closed-form and heuristic estimates. All energies and rates share the unit
// of `hopping`; times come out in hbar/hopping.

/// Weak-coupling transfer time for a chain-site density matrix rho (N x N) at
/// E0 = gamma_phi = 0, evaluated in the sine eigenbasis of the open chain.
double tau_perturbative_general(const Eigen::MatrixXcd& rho, double gamma_out);

/// n (N - n + 1) / gamma_out, the localized-state case of the above.
double tau_perturbative_localized(int n, int n_sites, double gamma_out);

/// Exact result for |n> at E0 = gamma_phi = 0.
double tau_localized_closed_form(int n, int n_sites, double gamma_out, double hopping = 1.0);

/// gamma_out minimizing tau_localized_closed_form; infinite for n = N.
double optimal_sink_rate_localized(int n, int n_sites, double hopping = 1.0);

struct IncoherentRates {
    double forster;    // nearest-neighbour hopping under dephasing and tilt
    double leegwater;  // last-site rate including the sink broadening
};

/// Throws Error(invalid_argument) when gamma_phi = 0 (Forster pole) or when
/// gamma_phi + gamma_out/2 = 0.
IncoherentRates leegwater_rates(double hopping, double gamma_phi, double gamma_out, double e0);

/// Incoherent hopping estimate for |n>: diffusion to site N-1 plus the sink step.
double tau_leegwater_star(int n, int n_sites, double hopping, double gamma_phi, double gamma_out,
                          double e0);

/// Same quantity written as a polynomial in gamma_out, gamma_phi and E0^2.
double tau_leegwater_star_expanded(int n, int n_sites, double hopping, double gamma_phi,
                                   double gamma_out, double e0);

struct HeuristicTau {
    double value;
    double coherent_part;    // tau_perturbative_localized
    double incoherent_part;  // tau_leegwater_star
    bool in_validity_domain; // gamma_phi > critical dephasing or |E0| > critical field
};

HeuristicTau tau_heuristic(int n, int n_sites, double hopping, double gamma_phi, double gamma_out,
                           double e0);

/// 4 Omega n / (N + n).
double critical_dephasing(int n, int n_sites, double hopping = 1.0);
/// 4 Omega / N, the coarse version quoted for generic initial states.
double critical_dephasing_coarse(int n_sites, double hopping = 1.0);

/// 4 sqrt(2) Omega / N: tilt above which eigenstates localize.
double critical_field(int n_sites, double hopping = 1.0);

enum class OverlapConvention { right_unit, left_biorthogonal };

struct OptimalFieldEstimate {
    double e0 = 0.0;                   // grid minimizer for the chosen convention
    std::vector<double> grid;
    std::vector<double> objective;     // sum_k Im E_k |<psi0|E_k>|, right vectors
    std::vector<double> objective_left;// same with biorthogonal left vectors
    double e0_left = 0.0;              // minimizer of objective_left
    bool flat = false;                 // objective range below 1e-12; e0 set to 0
    std::string warning;
};

/// Minimizes sum_k Im E_k |<psi0|E_k>| over the grid using the spectrum of the
/// effective Hamiltonian; params.field_step and dephasing_rate are ignored.
OptimalFieldEstimate optimal_field_estimate(const Eigen::VectorXcd& psi0, const ChainParams& params,
                                            const std::vector<double>& e0_grid,
                                            OverlapConvention convention = OverlapConvention::right_unit);

struct AnalyticEstimates {
    double tau_perturbative = 0.0;
    std::optional<double> tau_leegwater;  // missing when gamma_phi = 0
    std::optional<double> tau_heuristic;
    std::optional<double> gamma_forster;
    double gamma_leegwater = 0.0;
    double critical_dephasing = 0.0;
    double critical_field = 0.0;
    std::optional<double> optimal_field;  // filled only when a grid is supplied
};

/// Bundle for a localized initial state |n>; optional E0 grid for the
/// optimal-field estimator.
AnalyticEstimates analytic_estimates(int n, const ChainParams& params,
                                     const std::vector<double>& e0_grid = {});

} // namespace chaintransport
