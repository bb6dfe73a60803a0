#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chaintransport/model.hpp"
#include "chaintransport/transfer_time.hpp"

namespace chaintransport {

// Vectorization is column stacking: vec(rho)[i + d*j] = rho(i, j), so that
// vec(A rho B) = (B^T kron A) vec(rho). Density matrices live on the
// (N+1)-dimensional space with the sink at index 0.

constexpr int kDefaultDimensionCap = 4096;

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int dim);

/// |psi><psi| on the chain, embedded with zero sink row and column.
Eigen::MatrixXcd embed_pure_state(const Eigen::VectorXcd& psi_chain);

/// Throws Error(size_limit) when (N+1)^2 exceeds dimension_cap.
Eigen::MatrixXcd build_liouvillian(const OperatorSet& ops, int dimension_cap = kDefaultDimensionCap);
Eigen::MatrixXcd build_liouvillian(const ChainParams& params,
                                   const SiteEnergies& site_energies = SiteEnergies(),
                                   int dimension_cap = kDefaultDimensionCap);

struct LiouvillianSpectrum {
    int dim = 0;                    // N+1
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd right_modes;   // V, unit-norm columns
    Eigen::MatrixXcd left_modes;    // V^{-1}
    int zero_mode_index = -1;       // argmin |E_n|
    double condition_estimate = 0.0;  // ||V||_1 ||V^{-1}||_1

    int dimension() const { return static_cast<int>(eigenvalues.size()); }
};

LiouvillianSpectrum liouvillian_spectrum(const Eigen::MatrixXcd& liouvillian);

struct LiouvilleOptions {
    double condition_limit = 1e12;  // above this, fall back to integration
    int dimension_cap = kDefaultDimensionCap;
};

/// Spectral formula tau = gamma_out sum_n c_n d_n / E_n^2 over non-zero modes.
/// Verifies the steady state is the sink projector before using it.
TransferTime transfer_time_liouville(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                     const SiteEnergies& site_energies = SiteEnergies(),
                                     const LiouvilleOptions& options = {});

struct IntegrateOptions {
    double rel_tol = 1e-10;
    double t_max = 1e13;
    int dimension_cap = kDefaultDimensionCap;
};

/// Time-domain oracle: propagates rho(t) and integrates t gamma_out rho_NN(t).
/// Result.converged is false when the horizon is hit before 99.9% arrival.
TransferTime transfer_time_integrate(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                     const SiteEnergies& site_energies = SiteEnergies(),
                                     const IntegrateOptions& options = {});

/// rho(t) at each requested time; times must be sorted and nonnegative.
std::vector<Eigen::MatrixXcd> propagate_density(const ChainParams& params,
                                                const Eigen::MatrixXcd& rho0,
                                                const std::vector<double>& times,
                                                const SiteEnergies& site_energies = SiteEnergies());

struct TrajectorySample {
    std::vector<double> times;
    Eigen::MatrixXd site_populations;  // row per time, column 0 is the sink
    std::optional<double> tau;         // average transfer time, when defined
};

TrajectorySample propagate_populations(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                       const std::vector<double>& times,
                                       const SiteEnergies& site_energies = SiteEnergies());

/// Header `t,p0,...,pN`; a leading `# tau = ...` comment when tau is known.
void write_trajectory_csv(std::ostream& os, const TrajectorySample& sample);

} // namespace chaintransport
