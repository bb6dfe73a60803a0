#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace chaintransport {

// Units: hbar = e = 1. Energies and rates are in the same unit as `hopping`
// (Omega); with the default hopping = 1 everything is in units of Omega.

struct DisorderSpec {
    double width = 0.0;       // W, site energies drawn from [-W/2, W/2]
    std::uint64_t seed = 0;
};

struct ChainParams {
    int n_sites = 10;
    double hopping = 1.0;         // Omega
    double field_step = 0.0;      // E0, potential on site j is j*E0
    double sink_rate = 2.0;       // gamma_out
    double dephasing_rate = 0.0;  // gamma_phi
    std::optional<DisorderSpec> disorder;
};

/// Throws Error(invalid_argument) unless N >= 2, Omega > 0, rates >= 0, W >= 0.
void validate(const ChainParams& params);

/// Per-site energy offsets eps_j (index j-1 for site j). Empty means clean chain.
using SiteEnergies = Eigen::VectorXd;

struct GaussianState {
    double center = 3.0;    // n0, may be non-integer
    double width = 1.0;     // Delta0 > 0
    double momentum = 0.0;  // k0
};
struct LocalizedState {
    int site = 1;  // 1..N
};
struct FlatState {};  // uniform on sites 1..N-1, nothing on the sink-adjacent site

using InitialState = std::variant<GaussianState, LocalizedState, FlatState>;

/// "gaussian:n0,width,k0", "localized:n", "flat".
InitialState parse_initial_state(std::string_view text);
std::string to_string(const InitialState& state);

struct JumpOperator {
    double rate;
    Eigen::MatrixXcd op;
};

struct OperatorSet {
    Eigen::MatrixXcd hamiltonian;
    std::vector<JumpOperator> jump_ops;
};

/// Chain-only N x N Hamiltonian: diagonal j*E0 + eps_j, off-diagonal -Omega.
Eigen::MatrixXd build_hamiltonian(const ChainParams& params,
                                  const SiteEnergies& site_energies = SiteEnergies());

/// Operators on the (N+1)-dimensional space. Index 0 is the sink, index j the
/// chain site j. Jump operators: sqrt-free (rate, L) pairs, sink first
/// (L = |0><N|), then dephasing L_j = |j><j| for j = 1..N.
OperatorSet build_operator_set(const ChainParams& params,
                               const SiteEnergies& site_energies = SiteEnergies());

/// Unit-norm amplitude vector over sites 1..N (index j-1 for site j).
Eigen::VectorXcd build_initial_state(const InitialState& state, int n_sites);

/// Deterministic in (seed, realization); N i.i.d. values uniform in [-W/2, W/2].
SiteEnergies sample_disorder(double width, std::uint64_t seed, std::uint64_t realization,
                             int n_sites);

} // namespace chaintransport
