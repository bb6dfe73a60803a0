#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chaintransport/model.hpp"
#include "chaintransport/transfer_time.hpp"

namespace chaintransport {

// Eigen-decomposition of H - (i gamma_out/2)|N><N| on the chain sites.
// Eigenvalues E_a = e_a - i Gamma_a / 2.
struct EffectiveSpectrum {
    Eigen::VectorXcd eigenvalues;   // sorted by real part, then imaginary part
    Eigen::MatrixXcd right_vectors; // column a, unit 2-norm
    Eigen::MatrixXcd left_vectors;  // row a, left_vectors * right_vectors = I
    Eigen::VectorXd widths;         // Gamma_a = -2 Im E_a
    Eigen::VectorXd participation;  // PR of the unit-norm right vectors
    double residual = 0.0;          // reconstruction and biorthogonality error

    static constexpr double kReliableResidual = 1e-8;
    bool reliable() const { return residual <= kReliableResidual; }
    int size() const { return static_cast<int>(eigenvalues.size()); }
};

Eigen::MatrixXcd effective_hamiltonian(const ChainParams& params,
                                       const SiteEnergies& site_energies = SiteEnergies());

/// Works for any square complex matrix; used with effective_hamiltonian.
EffectiveSpectrum decompose_effective(const Eigen::MatrixXcd& h);

EffectiveSpectrum effective_spectrum(const ChainParams& params,
                                     const SiteEnergies& site_energies = SiteEnergies());

/// 1 / sum |c_k|^4 after normalizing c. Throws on a zero vector.
double participation_ratio(const Eigen::VectorXcd& v);

struct SuperradianceDiagnostics {
    int super_index = 0;                  // index of the widest state
    double gamma_max = 0.0;
    double gamma_avg_sub = 0.0;           // mean width of all other states
    std::optional<double> normalized_gap; // (gamma_max - gamma_avg_sub) / gamma_out
    std::string note;                     // why normalized_gap is missing
    double pr_super = 0.0;
    double pr_sub_avg = 0.0;
};

SuperradianceDiagnostics superradiance_diagnostics(const Eigen::VectorXd& widths,
                                                   const Eigen::VectorXd& participation,
                                                   double gamma_out);
SuperradianceDiagnostics superradiance_diagnostics(const EffectiveSpectrum& spectrum,
                                                   double gamma_out);

struct StLocation {
    double gamma_st = 0.0;        // argmax of the subradiant mean width
    double reference = 0.0;       // 2 Omega
    bool warning = false;
    std::string note;
    std::vector<double> grid;
    std::vector<double> sub_mean; // subradiant mean width per grid point
};

/// 201 log-spaced points on [0.1, 10] Omega.
std::vector<double> default_st_grid(double hopping = 1.0);

/// params.sink_rate is ignored; each grid value is used in turn.
StLocation locate_st(const ChainParams& params, const std::vector<double>& gamma_grid,
                     const SiteEnergies& site_energies = SiteEnergies());

/// Closed double-sum over eigenmodes; gamma_out is the sink rate used to build
/// the spectrum. Throws on non-decaying modes or an unreliable decomposition.
double transfer_time_spectral(const EffectiveSpectrum& spectrum, const Eigen::VectorXcd& psi0,
                              double gamma_out);

/// Integrates t gamma_out |<N|psi(t)>|^2 for the Schrodinger flow under the
/// effective Hamiltonian. Independent of the eigenvector route.
TransferTime transfer_time_wavefunction(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                        const SiteEnergies& site_energies = SiteEnergies(),
                                        double rel_tol = 1e-10);

/// Spectral route with integration fallback when the decomposition is
/// near-defective. Requires dephasing_rate == 0.
TransferTime transfer_time_nonhermitian(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                        const SiteEnergies& site_energies = SiteEnergies());

} // namespace chaintransport
