#include "chaintransport/liouvillian.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "chaintransport/error.hpp"
#include "chaintransport/moment_integrator.hpp"

namespace chaintransport {

using cd = std::complex<double>;

namespace {

constexpr double kZeroModeTol = 1e-10;
// Spectral propagation loses about cond(V) * eps; above this, step with exp.
constexpr double kPropagationConditionLimit = 1e6;

void check_dimension(int dim, int cap) {
    if (static_cast<long long>(dim) * dim > cap)
        throw Error(ErrorKind::size_limit,
                    "Liouvillian dimension " + std::to_string(dim * dim) + " exceeds cap " +
                        std::to_string(cap));
}

double one_norm(const Eigen::MatrixXcd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

void require_transfer_inputs(const ChainParams& params, const Eigen::VectorXcd& psi0) {
    validate(params);
    if (!(params.sink_rate > 0.0)) throw_invalid("transfer time needs gamma_out > 0");
    if (psi0.size() != params.n_sites) throw_invalid("initial state length does not match n_sites");
}

// Smallest decay rate among modes other than the steady state.
double slowest_nonzero_rate(const Eigen::VectorXcd& ev) {
    Eigen::Index k0 = 0;
    ev.cwiseAbs().minCoeff(&k0);
    double slow = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        if (k != k0) slow = std::min(slow, -ev(k).real());
    return slow;
}

} // namespace

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) throw_invalid("unvectorize: size mismatch");
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

Eigen::MatrixXcd embed_pure_state(const Eigen::VectorXcd& psi) {
    const Eigen::Index n = psi.size();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    rho.bottomRightCorner(n, n) = psi * psi.adjoint();
    return rho;
}

Eigen::MatrixXcd build_liouvillian(const OperatorSet& ops, int cap) {
    const Eigen::Index d = ops.hamiltonian.rows();
    check_dimension(static_cast<int>(d), cap);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd& h = ops.hamiltonian;
    Eigen::MatrixXcd l = cd(0.0, -1.0) * (Eigen::kroneckerProduct(id, h).eval() -
                                          Eigen::kroneckerProduct(h.transpose(), id).eval());
    for (const auto& [rate, op] : ops.jump_ops) {
        if (rate == 0.0) continue;
        const Eigen::MatrixXcd ldl = op.adjoint() * op;
        l += rate * (Eigen::kroneckerProduct(op.conjugate(), op).eval() -
                     0.5 * (Eigen::kroneckerProduct(id, ldl).eval() +
                            Eigen::kroneckerProduct(ldl.transpose(), id).eval()));
    }
    return l;
}

Eigen::MatrixXcd build_liouvillian(const ChainParams& params, const SiteEnergies& eps, int cap) {
    validate(params);
    check_dimension(params.n_sites + 1, cap);
    return build_liouvillian(build_operator_set(params, eps), cap);
}

LiouvillianSpectrum liouvillian_spectrum(const Eigen::MatrixXcd& l) {
    const Eigen::Index m = l.rows();
    const int dim = static_cast<int>(std::lround(std::sqrt(double(m))));
    if (l.cols() != m || static_cast<Eigen::Index>(dim) * dim != m)
        throw_invalid("Liouvillian must be square with a square dimension");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(l, true);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::numerical, "Liouvillian eigensolver failed");

    LiouvillianSpectrum s;
    s.dim = dim;
    s.eigenvalues = solver.eigenvalues();
    s.right_modes = solver.eigenvectors();
    s.right_modes.colwise().normalize();
    s.left_modes = Eigen::PartialPivLU<Eigen::MatrixXcd>(s.right_modes).inverse();
    Eigen::Index k0 = 0;
    s.eigenvalues.cwiseAbs().minCoeff(&k0);
    s.zero_mode_index = static_cast<int>(k0);
    s.condition_estimate = one_norm(s.right_modes) * one_norm(s.left_modes);
    if (!std::isfinite(s.condition_estimate)) s.condition_estimate = std::numeric_limits<double>::infinity();
    return s;
}

TransferTime transfer_time_liouville(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                     const SiteEnergies& eps, const LiouvilleOptions& opt) {
    require_transfer_inputs(params, psi0);
    const int n = params.n_sites;
    const int d = n + 1;
    const Eigen::MatrixXcd l = build_liouvillian(params, eps, opt.dimension_cap);
    const double lnorm = one_norm(l);

    // Efficiency 1 means the steady state is |0><0| with the trace as its left
    // partner. Both are known exactly, so check them directly and shift that
    // mode to -sigma (rank-one deflation). The other eigenpairs are untouched,
    // but slow modes no longer mix with a zero eigenvalue inside the solver.
    Eigen::MatrixXcd sink = Eigen::MatrixXcd::Zero(d, d);
    sink(0, 0) = 1.0;
    const Eigen::VectorXcd r0 = vectorize(sink);
    const Eigen::VectorXcd l0 = vectorize(Eigen::MatrixXcd::Identity(d, d));
    if ((l * r0).cwiseAbs().maxCoeff() > 1e-12 * lnorm ||
        (l0.transpose() * l).cwiseAbs().maxCoeff() > 1e-12 * lnorm)
        throw Error(ErrorKind::numerical, "steady state is not the sink projector");
    const double sigma = 1.0 + lnorm;
    const auto spec = liouvillian_spectrum(l - sigma * r0 * l0.transpose());
    if (spec.condition_estimate > opt.condition_limit) {
        IntegrateOptions iopt;
        iopt.dimension_cap = opt.dimension_cap;
        return transfer_time_integrate(params, psi0, eps, iopt);
    }

    Eigen::Index k0 = 0;
    (spec.eigenvalues.array() + sigma).abs().minCoeff(&k0);
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k)
        if (k != k0 && !(spec.eigenvalues(k).real() < 0.0))
            throw Error(ErrorKind::numerical, "Liouvillian has a second non-decaying mode");

    const Eigen::VectorXcd coeff = spec.left_modes * vectorize(embed_pure_state(psi0));
    const Eigen::Index row = n + static_cast<Eigen::Index>(d) * n;
    if (std::abs(spec.right_modes(row, k0) * coeff(k0)) > kZeroModeTol)
        throw Error(ErrorKind::numerical, "steady state overlaps the last chain site");

    cd sum = 0.0;
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
        if (k == k0) continue;
        const cd e = spec.eigenvalues(k);
        sum += spec.right_modes(row, k) * coeff(k) / (e * e);
    }
    return {params.sink_rate * sum.real(), TransferMethod::liouville_spectral, 0.0, true};
}

TransferTime transfer_time_integrate(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                     const SiteEnergies& eps, const IntegrateOptions& opt) {
    require_transfer_inputs(params, psi0);
    const int n = params.n_sites;
    const Eigen::Index d = n + 1;
    detail::FluxMomentProblem pb;
    pb.generator = build_liouvillian(params, eps, opt.dimension_cap);
    pb.initial = vectorize(embed_pure_state(psi0));
    const double gamma = params.sink_rate;
    const Eigen::Index last = n + d * n;
    pb.flux = [gamma, last](const Eigen::VectorXcd& x) { return gamma * x(last).real(); };
    pb.survival = [n, d](const Eigen::VectorXcd& x) {
        double s = 0.0;
        for (Eigen::Index j = 1; j <= n; ++j) s += x(j + d * j).real();
        return s;
    };
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(pb.generator, false);
    pb.slowest_rate = slowest_nonzero_rate(es.eigenvalues());

    detail::FluxMomentOptions fopt;
    fopt.rel_tol = opt.rel_tol;
    fopt.t_max = opt.t_max;
    auto r = detail::integrate_flux_moment(pb, fopt);
    return {r.value, TransferMethod::integration, r.error_estimate, r.converged};
}

std::vector<Eigen::MatrixXcd> propagate_density(const ChainParams& params, const Eigen::MatrixXcd& rho0,
                                                const std::vector<double>& times,
                                                const SiteEnergies& eps) {
    validate(params);
    const int d = params.n_sites + 1;
    if (rho0.rows() != d || rho0.cols() != d) throw_invalid("rho0 must be (N+1)x(N+1)");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw_invalid("times must be finite and >= 0");
        if (i > 0 && times[i] < times[i - 1]) throw_invalid("times must be sorted");
    }
    const Eigen::MatrixXcd l = build_liouvillian(params, eps);
    const Eigen::VectorXcd x0 = vectorize(rho0);
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(times.size());

    const auto spec = liouvillian_spectrum(l);
    if (spec.condition_estimate <= kPropagationConditionLimit) {
        const Eigen::VectorXcd coeff = spec.left_modes * x0;
        for (double t : times) {
            Eigen::VectorXcd w = (spec.eigenvalues * t).array().exp() * coeff.array();
            Eigen::MatrixXcd rho = unvectorize(spec.right_modes * w, d);
            out.push_back(0.5 * (rho + rho.adjoint()));
        }
        return out;
    }
    Eigen::VectorXcd x = x0;
    double t_prev = 0.0;
    for (double t : times) {
        if (t > t_prev) {
            Eigen::MatrixXcd step = l * (t - t_prev);
            x = step.exp() * x;
            t_prev = t;
        }
        Eigen::MatrixXcd rho = unvectorize(x, d);
        out.push_back(0.5 * (rho + rho.adjoint()));
    }
    return out;
}

TrajectorySample propagate_populations(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                       const std::vector<double>& times, const SiteEnergies& eps) {
    validate(params);
    if (psi0.size() != params.n_sites) throw_invalid("initial state length does not match n_sites");
    const int d = params.n_sites + 1;
    auto rhos = propagate_density(params, embed_pure_state(psi0), times, eps);
    TrajectorySample s;
    s.times = times;
    s.site_populations.resize(static_cast<Eigen::Index>(times.size()), d);
    for (std::size_t i = 0; i < rhos.size(); ++i)
        s.site_populations.row(static_cast<Eigen::Index>(i)) = rhos[i].diagonal().real().transpose();
    if (params.sink_rate > 0.0) s.tau = transfer_time_liouville(params, psi0, eps).value;
    return s;
}

void write_trajectory_csv(std::ostream& os, const TrajectorySample& s) {
    char buf[32];
    if (s.tau) {
        std::snprintf(buf, sizeof buf, "%.9g", *s.tau);
        os << "# tau = " << buf << '\n';
    }
    os << 't';
    for (Eigen::Index j = 0; j < s.site_populations.cols(); ++j) os << ",p" << j;
    os << '\n';
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", s.times[i]);
        os << buf;
        for (Eigen::Index j = 0; j < s.site_populations.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.9g", s.site_populations(static_cast<Eigen::Index>(i), j));
            os << ',' << buf;
        }
        os << '\n';
    }
}

} // namespace chaintransport
