#include "chaintransport/nonhermitian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "chaintransport/error.hpp"
#include "chaintransport/moment_integrator.hpp"

namespace chaintransport {

using cd = std::complex<double>;

Eigen::MatrixXcd effective_hamiltonian(const ChainParams& params, const SiteEnergies& eps) {
    Eigen::MatrixXcd h = build_hamiltonian(params, eps).cast<cd>();
    const int n = params.n_sites;
    h(n - 1, n - 1) -= cd(0.0, 0.5 * params.sink_rate);
    return h;
}

double participation_ratio(const Eigen::VectorXcd& v) {
    const double norm2 = v.squaredNorm();
    if (!(norm2 > 0.0)) throw_invalid("participation ratio of a zero vector");
    double s = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        double p = std::norm(v(k)) / norm2;
        s += p * p;
    }
    return 1.0 / s;
}

EffectiveSpectrum decompose_effective(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols() || h.rows() == 0) throw_invalid("decompose_effective: need a square matrix");
    const Eigen::Index n = h.rows();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, true);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::numerical, "effective Hamiltonian eigensolver failed");

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto& ev = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
        return ev(a).imag() < ev(b).imag();
    });

    EffectiveSpectrum s;
    s.eigenvalues.resize(n);
    s.right_vectors.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        s.eigenvalues(a) = ev(order[a]);
        s.right_vectors.col(a) = solver.eigenvectors().col(order[a]).normalized();
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(s.right_vectors);
    s.left_vectors = lu.inverse();

    s.widths = -2.0 * s.eigenvalues.imag();
    s.participation.resize(n);
    for (Eigen::Index a = 0; a < n; ++a) s.participation(a) = participation_ratio(s.right_vectors.col(a));

    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    Eigen::MatrixXcd recon =
        s.right_vectors * s.eigenvalues.asDiagonal() * s.left_vectors - h;
    Eigen::MatrixXcd bio = s.left_vectors * s.right_vectors - Eigen::MatrixXcd::Identity(n, n);
    s.residual = std::max(recon.cwiseAbs().maxCoeff() / scale, bio.cwiseAbs().maxCoeff());
    if (!std::isfinite(s.residual)) s.residual = std::numeric_limits<double>::infinity();
    return s;
}

EffectiveSpectrum effective_spectrum(const ChainParams& params, const SiteEnergies& eps) {
    return decompose_effective(effective_hamiltonian(params, eps));
}

SuperradianceDiagnostics superradiance_diagnostics(const Eigen::VectorXd& widths,
                                                   const Eigen::VectorXd& participation,
                                                   double gamma_out) {
    const Eigen::Index n = widths.size();
    if (n < 2) throw_invalid("superradiance diagnostics need at least two states");
    if (participation.size() != n) throw_invalid("widths and participation sizes differ");
    SuperradianceDiagnostics d;
    Eigen::Index imax = 0;
    d.gamma_max = widths.maxCoeff(&imax);
    d.super_index = static_cast<int>(imax);
    d.gamma_avg_sub = (widths.sum() - d.gamma_max) / double(n - 1);
    d.pr_super = participation(imax);
    d.pr_sub_avg = (participation.sum() - d.pr_super) / double(n - 1);
    if (gamma_out > 0.0) {
        d.normalized_gap = (d.gamma_max - d.gamma_avg_sub) / gamma_out;
    } else {
        d.note = "normalized gap undefined for gamma_out = 0";
    }
    return d;
}

SuperradianceDiagnostics superradiance_diagnostics(const EffectiveSpectrum& spectrum,
                                                   double gamma_out) {
    return superradiance_diagnostics(spectrum.widths, spectrum.participation, gamma_out);
}

std::vector<double> default_st_grid(double hopping) {
    constexpr int points = 201;
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = hopping * std::pow(10.0, -1.0 + 2.0 * i / (points - 1));
    return g;
}

StLocation locate_st(const ChainParams& params, const std::vector<double>& grid,
                     const SiteEnergies& eps) {
    if (grid.empty()) throw_invalid("locate_st: empty gamma_out grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw_invalid("locate_st: gamma_out grid values must be > 0");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw_invalid("locate_st: grid must be increasing");
    }
    StLocation loc;
    loc.reference = 2.0 * params.hopping;
    loc.grid = grid;
    ChainParams p = params;
    for (double g : grid) {
        p.sink_rate = g;
        auto spec = effective_spectrum(p, eps);
        auto diag = superradiance_diagnostics(spec, g);
        loc.sub_mean.push_back(diag.gamma_avg_sub);
    }
    auto best = std::max_element(loc.sub_mean.begin(), loc.sub_mean.end());
    const std::size_t ib = static_cast<std::size_t>(best - loc.sub_mean.begin());
    loc.gamma_st = grid[ib];

    std::vector<std::string> notes;
    if (grid.size() < 3) notes.push_back("grid too short to bracket a maximum");
    const double slack = 1.0 + 1e-9;
    if (grid.front() > 0.1 * params.hopping * slack || grid.back() * slack < 10.0 * params.hopping)
        notes.push_back("grid does not span [0.1, 10] Omega");
    if (grid.size() >= 3 && (ib == 0 || ib + 1 == grid.size()))
        notes.push_back("maximum at grid boundary");
    int peaks = 0;
    const double tiny = 1e-12 * std::max(1.0, *best);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (loc.sub_mean[i] > loc.sub_mean[i - 1] + tiny && loc.sub_mean[i] > loc.sub_mean[i + 1] + tiny)
            ++peaks;
    if (peaks > 1) notes.push_back("subradiant width profile is not unimodal; global maximum used");
    loc.warning = !notes.empty();
    for (std::size_t i = 0; i < notes.size(); ++i) loc.note += (i ? "; " : "") + notes[i];
    return loc;
}

double transfer_time_spectral(const EffectiveSpectrum& s, const Eigen::VectorXcd& psi0,
                              double gamma_out) {
    const int n = s.size();
    if (psi0.size() != n) throw_invalid("initial state length does not match the spectrum");
    if (!(gamma_out > 0.0)) throw_invalid("transfer time needs gamma_out > 0");
    if (!s.reliable())
        throw Error(ErrorKind::numerical, "effective spectrum is near-defective (residual " +
                                              std::to_string(s.residual) + ")");
    for (int a = 0; a < n; ++a)
        if (!(s.eigenvalues(a).imag() < 0.0))
            throw Error(ErrorKind::numerical, "non-decaying mode: transfer time diverges");

    Eigen::VectorXcd amp(n);
    const Eigen::VectorXcd proj = s.left_vectors * psi0;
    for (int a = 0; a < n; ++a) amp(a) = s.right_vectors(n - 1, a) * proj(a);

    cd sum = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cd z = s.eigenvalues(a) - std::conj(s.eigenvalues(b));
            sum += amp(a) * std::conj(amp(b)) * (-1.0 / (z * z));
        }
    const double tau = gamma_out * sum.real();
    if (std::abs(gamma_out * sum.imag()) > 1e-8 * std::abs(tau))
        throw Error(ErrorKind::numerical, "transfer time double sum has a large imaginary part");
    return tau;
}

TransferTime transfer_time_wavefunction(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                        const SiteEnergies& eps, double rel_tol) {
    validate(params);
    if (!(params.sink_rate > 0.0)) throw_invalid("transfer time needs gamma_out > 0");
    const int n = params.n_sites;
    if (psi0.size() != n) throw_invalid("initial state length does not match n_sites");
    const Eigen::MatrixXcd heff = effective_hamiltonian(params, eps);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(heff, false);

    detail::FluxMomentProblem pb;
    pb.generator = cd(0.0, -1.0) * heff;
    pb.initial = psi0;
    const double gamma = params.sink_rate;
    pb.flux = [gamma, n](const Eigen::VectorXcd& x) { return gamma * std::norm(x(n - 1)); };
    pb.survival = [](const Eigen::VectorXcd& x) { return x.squaredNorm(); };
    pb.slowest_rate = (-2.0 * es.eigenvalues().imag()).minCoeff();

    detail::FluxMomentOptions opt;
    opt.rel_tol = rel_tol;
    auto r = detail::integrate_flux_moment(pb, opt);
    return {r.value, TransferMethod::integration, r.error_estimate, r.converged};
}

TransferTime transfer_time_nonhermitian(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                        const SiteEnergies& eps) {
    validate(params);
    if (params.dephasing_rate != 0.0)
        throw_invalid("non-Hermitian transfer time requires dephasing_rate = 0");
    auto spec = effective_spectrum(params, eps);
    if (!spec.reliable()) return transfer_time_wavefunction(params, psi0, eps);
    return {transfer_time_spectral(spec, psi0, params.sink_rate),
            TransferMethod::nonhermitian_spectral, 0.0, true};
}

} // namespace chaintransport
