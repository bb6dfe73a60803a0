#include "chaintransport/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chaintransport/error.hpp"
#include "chaintransport/nonhermitian.hpp"

namespace chaintransport {

namespace {

void check_site(int n, int n_sites) {
    if (n_sites < 1) throw_invalid("n_sites must be >= 1");
    if (n < 1 || n > n_sites)
        throw_invalid("site " + std::to_string(n) + " outside 1.." + std::to_string(n_sites));
}

void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw_invalid(std::string(what) + " must be > 0");
}

void check_nonnegative(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw_invalid(std::string(what) + " must be >= 0");
}

} // namespace

double tau_perturbative_general(const Eigen::MatrixXcd& rho, double gamma_out) {
    check_positive(gamma_out, "gamma_out");
    const Eigen::Index n = rho.rows();
    if (n < 1 || rho.cols() != n) throw_invalid("rho must be a square chain-site matrix");
    const double x = std::numbers::pi / double(n + 1);
    // sum_a rho_ij sin(a i x) sin(a j x) / sin(a N x)^2
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index j = 0; j < n; ++j) s(a, j) = std::sin(x * double((a + 1) * (j + 1)));
    std::complex<double> sum = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
        const double last = s(a, n - 1);
        const double inv = 1.0 / (last * last);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) sum += rho(i, j) * s(a, i) * s(a, j) * inv;
    }
    return sum.real() / gamma_out;
}

double tau_perturbative_localized(int n, int n_sites, double gamma_out) {
    check_site(n, n_sites);
    check_positive(gamma_out, "gamma_out");
    return double(n) * double(n_sites - n + 1) / gamma_out;
}

double tau_localized_closed_form(int n, int n_sites, double gamma_out, double hopping) {
    check_site(n, n_sites);
    check_positive(gamma_out, "gamma_out");
    check_positive(hopping, "hopping");
    return double(n) * double(n_sites - n + 1) / gamma_out +
           gamma_out * double(n) * double(n_sites - n) / (4.0 * hopping * hopping);
}

double optimal_sink_rate_localized(int n, int n_sites, double hopping) {
    check_site(n, n_sites);
    check_positive(hopping, "hopping");
    if (n == n_sites) return std::numeric_limits<double>::infinity();
    return 2.0 * hopping * std::sqrt(double(n_sites - n + 1) / double(n_sites - n));
}

IncoherentRates leegwater_rates(double hopping, double gamma_phi, double gamma_out, double e0) {
    check_positive(hopping, "hopping");
    check_nonnegative(gamma_out, "gamma_out");
    if (gamma_phi == 0.0) throw_invalid("Forster rate has a pole at gamma_phi = 0");
    check_positive(gamma_phi, "gamma_phi");
    const double w2 = 2.0 * hopping * hopping;
    const double g = gamma_phi + 0.5 * gamma_out;
    return {w2 * gamma_phi / (gamma_phi * gamma_phi + e0 * e0), w2 * g / (g * g + e0 * e0)};
}

double tau_leegwater_star(int n, int n_sites, double hopping, double gamma_phi, double gamma_out,
                          double e0) {
    check_site(n, n_sites);
    const auto r = leegwater_rates(hopping, gamma_phi, gamma_out, e0);
    const double m = n_sites - n;
    return m * (m - 1.0) / (2.0 * r.forster) + double(n) * m / r.leegwater;
}

double tau_leegwater_star_expanded(int n, int n_sites, double hopping, double gamma_phi,
                                   double gamma_out, double e0) {
    check_site(n, n_sites);
    check_positive(hopping, "hopping");
    check_positive(gamma_phi, "gamma_phi");
    check_nonnegative(gamma_out, "gamma_out");
    const double nn = n;
    const double m = n_sites - n;
    const double w2 = hopping * hopping;
    return nn * m * gamma_out / (4.0 * w2) + m * (n_sites + nn - 1.0) * gamma_phi / (4.0 * w2) +
           e0 * e0 * m / w2 * (nn / (2.0 * gamma_phi + gamma_out) + (m - 1.0) / (4.0 * gamma_phi));
}

double critical_dephasing(int n, int n_sites, double hopping) {
    check_site(n, n_sites);
    return 4.0 * hopping * n / double(n_sites + n);
}

double critical_dephasing_coarse(int n_sites, double hopping) {
    if (n_sites < 1) throw_invalid("n_sites must be >= 1");
    return 4.0 * hopping / n_sites;
}

double critical_field(int n_sites, double hopping) {
    if (n_sites < 1) throw_invalid("n_sites must be >= 1");
    return 4.0 * std::numbers::sqrt2 * hopping / n_sites;
}

HeuristicTau tau_heuristic(int n, int n_sites, double hopping, double gamma_phi, double gamma_out,
                           double e0) {
    HeuristicTau h;
    h.coherent_part = tau_perturbative_localized(n, n_sites, gamma_out);
    h.incoherent_part = tau_leegwater_star(n, n_sites, hopping, gamma_phi, gamma_out, e0);
    h.value = h.coherent_part + h.incoherent_part;
    h.in_validity_domain = gamma_phi > critical_dephasing(n, n_sites, hopping) ||
                           std::abs(e0) > critical_field(n_sites, hopping);
    return h;
}

OptimalFieldEstimate optimal_field_estimate(const Eigen::VectorXcd& psi0, const ChainParams& params,
                                            const std::vector<double>& grid,
                                            OverlapConvention convention) {
    if (grid.empty()) throw_invalid("optimal field estimate needs a non-empty E0 grid");
    if (psi0.size() != params.n_sites) throw_invalid("initial state length does not match n_sites");
    OptimalFieldEstimate est;
    est.grid = grid;
    ChainParams p = params;
    p.dephasing_rate = 0.0;
    for (double e0 : grid) {
        p.field_step = e0;
        const auto spec = effective_spectrum(p);
        const Eigen::VectorXcd right = spec.right_vectors.adjoint() * psi0;
        const Eigen::VectorXcd left = spec.left_vectors * psi0;
        double obj = 0.0;
        double obj_left = 0.0;
        for (int k = 0; k < spec.size(); ++k) {
            obj += spec.eigenvalues(k).imag() * std::abs(right(k));
            obj_left += spec.eigenvalues(k).imag() * std::abs(left(k));
        }
        est.objective.push_back(obj);
        est.objective_left.push_back(obj_left);
    }
    auto argmin = [&](const std::vector<double>& v) {
        return grid[static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin())];
    };
    est.e0_left = argmin(est.objective_left);
    const auto& chosen = convention == OverlapConvention::right_unit ? est.objective : est.objective_left;
    const auto [lo, hi] = std::minmax_element(chosen.begin(), chosen.end());
    if (*hi - *lo < 1e-12) {
        est.flat = true;
        est.warning = "objective is flat over the grid";
        est.e0 = 0.0;
    } else {
        est.e0 = argmin(chosen);
    }
    const double et = critical_field(params.n_sites, params.hopping);
    if (grid.front() > -et || grid.back() < et) {
        if (!est.warning.empty()) est.warning += "; ";
        est.warning += "grid does not span [-critical field, critical field]";
    }
    return est;
}

AnalyticEstimates analytic_estimates(int n, const ChainParams& params, const std::vector<double>& grid) {
    validate(params);
    check_site(n, params.n_sites);
    AnalyticEstimates a;
    const int big_n = params.n_sites;
    a.tau_perturbative = tau_perturbative_localized(n, big_n, params.sink_rate);
    a.critical_dephasing = critical_dephasing(n, big_n, params.hopping);
    a.critical_field = critical_field(big_n, params.hopping);
    const double g = params.dephasing_rate + 0.5 * params.sink_rate;
    a.gamma_leegwater = 2.0 * params.hopping * params.hopping * g / (g * g + params.field_step * params.field_step);
    if (params.dephasing_rate > 0.0) {
        const auto r = leegwater_rates(params.hopping, params.dephasing_rate, params.sink_rate, params.field_step);
        a.gamma_forster = r.forster;
        a.tau_leegwater = tau_leegwater_star(n, big_n, params.hopping, params.dephasing_rate,
                                             params.sink_rate, params.field_step);
        a.tau_heuristic = a.tau_perturbative + *a.tau_leegwater;
    }
    if (!grid.empty()) {
        a.optimal_field = optimal_field_estimate(build_initial_state(LocalizedState{n}, big_n), params, grid).e0;
    }
    return a;
}

} // namespace chaintransport
