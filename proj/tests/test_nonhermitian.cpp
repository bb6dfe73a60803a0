#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "chaintransport/error.hpp"
#include "chaintransport/liouvillian.hpp"
#include "chaintransport/nonhermitian.hpp"
#include "oracles.hpp"

using namespace chaintransport;

namespace {

std::vector<double> sorted(const Eigen::VectorXd& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("closed chain limit") {
    ChainParams p;
    p.field_step = 0.3;
    p.sink_rate = 0.0;
    const auto s = effective_spectrum(p);
    CHECK(s.widths.cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(p));
    for (int a = 0; a < s.size(); ++a) CHECK(std::abs(s.eigenvalues(a).real() - es.eigenvalues()(a)) < 1e-10);
}

TEST_CASE("single site with sink") {
    Eigen::MatrixXcd h(1, 1);
    h(0, 0) = oracle::cd(0.7, -0.5 * 3.0);
    const auto s = decompose_effective(h);
    CHECK(s.eigenvalues(0).real() == doctest::Approx(0.7));
    CHECK(s.widths(0) == doctest::Approx(3.0));
}

TEST_CASE("biorthogonal decomposition reconstructs the effective Hamiltonian") {
    ChainParams p;
    p.field_step = -0.35;
    p.sink_rate = 1.3;
    const auto h = effective_hamiltonian(p);
    const auto s = effective_spectrum(p);
    CHECK(s.reliable());
    const Eigen::MatrixXcd rec = s.right_vectors * s.eigenvalues.asDiagonal() * s.left_vectors;
    CHECK((rec - h).norm() < 1e-10);
    CHECK((s.left_vectors * s.right_vectors - Eigen::MatrixXcd::Identity(10, 10)).norm() < 1e-10);
    for (int a = 0; a < s.size(); ++a) CHECK(s.right_vectors.col(a).norm() == doctest::Approx(1.0));
    for (int a = 0; a + 1 < s.size(); ++a) CHECK(s.eigenvalues(a).real() <= s.eigenvalues(a + 1).real());
}

TEST_CASE("width sum rule and field-sign symmetry on random parameters") {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> e0(-3, 3), g(0.01, 20);
    std::uniform_int_distribution<int> n(2, 16);
    for (int trial = 0; trial < 30; ++trial) {
        ChainParams p;
        p.n_sites = n(rng);
        p.field_step = e0(rng);
        p.sink_rate = g(rng);
        const auto a = effective_spectrum(p);
        CHECK(a.widths.sum() == doctest::Approx(p.sink_rate).epsilon(1e-10));
        p.field_step = -p.field_step;
        const auto b = effective_spectrum(p);
        const auto wa = sorted(a.widths), wb = sorted(b.widths);
        for (size_t k = 0; k < wa.size(); ++k) CHECK(std::abs(wa[k] - wb[k]) < 1e-10);
    }
}

TEST_CASE("participation ratio") {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(10);
    e(4) = 1.0;
    CHECK(participation_ratio(e) == doctest::Approx(1.0));
    CHECK(participation_ratio(Eigen::VectorXcd::Ones(10)) == doctest::Approx(10.0));
    Eigen::VectorXcd two = Eigen::VectorXcd::Zero(10);
    two(0) = 1.0;
    two(1) = oracle::cd(0, 1);
    CHECK(participation_ratio(two) == doctest::Approx(2.0));
    CHECK_THROWS_AS(participation_ratio(Eigen::VectorXcd::Zero(3)), Error);
}

TEST_CASE("superradiance diagnostics") {
    Eigen::VectorXd equal = Eigen::VectorXd::Constant(10, 0.2);
    Eigen::VectorXd pr = Eigen::VectorXd::Constant(10, 3.0);
    const auto d = superradiance_diagnostics(equal, pr, 2.0);
    REQUIRE(d.normalized_gap.has_value());
    CHECK(std::abs(*d.normalized_gap) < 1e-15);
    const auto z = superradiance_diagnostics(Eigen::VectorXd::Zero(10), pr, 0.0);
    CHECK_FALSE(z.normalized_gap.has_value());
    CHECK_FALSE(z.note.empty());
}

TEST_CASE("width gap opens across the transition") {
    ChainParams p;
    p.field_step = 0.2;
    p.sink_rate = 0.01;
    const auto lo = superradiance_diagnostics(effective_spectrum(p), p.sink_rate);
    p.sink_rate = 100.0;
    const auto hi = superradiance_diagnostics(effective_spectrum(p), p.sink_rate);
    CHECK(*lo.normalized_gap < 0.1);
    CHECK(*hi.normalized_gap > 0.9);
}

TEST_CASE("width gap grows with field below the transition") {
    ChainParams p;
    p.sink_rate = 0.2;
    double last = -1.0;
    for (double e0 : {0.05, 0.5, 2.0, 8.0}) {
        p.field_step = e0;
        const double gap = *superradiance_diagnostics(effective_spectrum(p), p.sink_rate).normalized_gap;
        CHECK(gap > last);
        last = gap;
    }
}

TEST_CASE("widest width grows while the others shrink past the transition") {
    ChainParams p;
    const auto at = [&](double g) {
        p.sink_rate = g;
        return superradiance_diagnostics(effective_spectrum(p), g);
    };
    const auto a = at(4.0), b = at(8.0), c = at(16.0);
    CHECK(a.gamma_max < b.gamma_max);
    CHECK(b.gamma_max < c.gamma_max);
    CHECK(a.gamma_avg_sub > b.gamma_avg_sub);
    CHECK(b.gamma_avg_sub > c.gamma_avg_sub);
}

TEST_CASE("transition locator") {
    ChainParams p;
    const auto grid = default_st_grid();
    CHECK(grid.size() == 201);
    const auto a = locate_st(p, grid);
    CHECK(a.gamma_st >= 1.5);
    CHECK(a.gamma_st <= 2.6);
    CHECK(a.reference == 2.0);
    p.field_step = 0.2;
    const auto b = locate_st(p, grid);
    CHECK(std::abs(b.gamma_st / a.gamma_st - 1.0) < 0.3);
    const auto one = locate_st(p, {1.7});
    CHECK(one.gamma_st == 1.7);
    CHECK(one.warning);
}

TEST_CASE("single decaying mode integral") {
    // E = -i/2, gamma = 1: tau = gamma / Gamma^2 = 1
    Eigen::MatrixXcd h(1, 1);
    h(0, 0) = oracle::cd(0, -0.5);
    const auto s = decompose_effective(h);
    Eigen::VectorXcd psi(1);
    psi(0) = 1.0;
    CHECK(transfer_time_spectral(s, psi, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("weak coupling localized start") {
    ChainParams p;
    p.sink_rate = 0.1;
    const double tau = transfer_time_nonhermitian(p, build_initial_state(LocalizedState{3}, 10)).value;
    CHECK(std::abs(tau / 240.0 - 1.0) < 0.05);
}

TEST_CASE("spectral route matches the linear-solve oracle") {
    std::mt19937_64 rng(7);
    for (double e0 : {-0.2, 0.0, 0.7}) {
        for (double g : {0.3, 2.0, 9.0}) {
            ChainParams p;
            p.n_sites = 8;
            p.field_step = e0;
            p.sink_rate = g;
            const auto psi = oracle::random_state(rng, 8);
            const double ref = oracle::tau_wavefunction_linear_solve(p, psi);
            const double tau = transfer_time_spectral(effective_spectrum(p), psi, g);
            CHECK(oracle::rel(tau, ref) < 1e-8);
        }
    }
}

TEST_CASE("spectral route matches the density-matrix route") {
    ChainParams p;
    p.field_step = -0.2;
    const auto psi = build_initial_state(GaussianState{3, 1, 0}, 10);
    const double nh = transfer_time_nonhermitian(p, psi).value;
    const double lv = transfer_time_liouville(p, psi).value;
    CHECK(oracle::rel(nh, lv) < 1e-6);
}

TEST_CASE("wavefunction integration agrees with the spectral route") {
    ChainParams p;
    p.field_step = 0.1;
    p.sink_rate = 1.0;
    const auto psi = build_initial_state(GaussianState{4, 1.5, 0.3}, 10);
    const auto num = transfer_time_wavefunction(p, psi);
    CHECK(num.converged);
    CHECK(num.method == TransferMethod::integration);
    CHECK(oracle::rel(num.value, transfer_time_spectral(effective_spectrum(p), psi, 1.0)) < 1e-7);
}

TEST_CASE("non-Hermitian route rejects dephasing") {
    ChainParams p;
    p.dephasing_rate = 0.1;
    CHECK_THROWS_AS(transfer_time_nonhermitian(p, build_initial_state(LocalizedState{1}, 10)), Error);
}

TEST_CASE("strong sink slows a distant excitation") {
    ChainParams p;
    p.sink_rate = 100.0;
    const auto far = build_initial_state(LocalizedState{1}, 10);
    const auto near = build_initial_state(LocalizedState{10}, 10);
    const double strong = transfer_time_nonhermitian(p, far).value;
    CHECK(transfer_time_nonhermitian(p, near).value == doctest::Approx(10.0 / 100.0).epsilon(1e-8));
    p.sink_rate = 2.0;
    CHECK(strong > transfer_time_nonhermitian(p, far).value);
}
