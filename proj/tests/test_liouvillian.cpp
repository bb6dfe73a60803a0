#include <doctest.h>

#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "chaintransport/analytics.hpp"
#include "chaintransport/error.hpp"
#include "chaintransport/liouvillian.hpp"
#include "chaintransport/nonhermitian.hpp"
#include "oracles.hpp"

using namespace chaintransport;

TEST_CASE("vectorization is column stacking") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(3, 3);
    const auto v = vectorize(a);
    CHECK(v(1) == a(1, 0));
    CHECK(v(3) == a(0, 1));
    CHECK(unvectorize(v, 3) == a);
    const auto e = embed_pure_state(build_initial_state(LocalizedState{2}, 4));
    CHECK(e.rows() == 5);
    CHECK(e(2, 2) == oracle::cd(1.0));
    CHECK(e.trace() == oracle::cd(1.0));
}

TEST_CASE("generator action matches the term-by-term master equation") {
    std::mt19937_64 rng(11);
    ChainParams p;
    p.n_sites = 6;
    p.field_step = 0.4;
    p.sink_rate = 1.7;
    p.dephasing_rate = 0.6;
    const auto eps = sample_disorder(1.0, 3, 0, 6);
    const auto ops = build_operator_set(p, eps);
    const auto l = build_liouvillian(p, eps);
    for (int k = 0; k < 20; ++k) {
        const auto rho = oracle::random_density(rng, 7);
        const Eigen::VectorXcd lhs = l * vectorize(rho);
        const Eigen::VectorXcd rhs = vectorize(oracle::lindblad_rhs(ops, rho));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("trace annihilation") {
    ChainParams p;
    p.field_step = -0.3;
    p.dephasing_rate = 0.5;
    const auto l = build_liouvillian(p);
    const Eigen::VectorXcd id = vectorize(Eigen::MatrixXcd::Identity(11, 11));
    CHECK((id.transpose() * l).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("closed system spectrum is imaginary") {
    ChainParams p;
    p.n_sites = 6;
    p.field_step = 0.25;
    p.sink_rate = 0.0;
    const auto s = liouvillian_spectrum(build_liouvillian(p));
    CHECK(s.eigenvalues.real().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sink projector is the steady state") {
    ChainParams p;
    p.n_sites = 5;
    p.dephasing_rate = 0.2;
    const auto l = build_liouvillian(p);
    Eigen::MatrixXcd sink = Eigen::MatrixXcd::Zero(6, 6);
    sink(0, 0) = 1.0;
    CHECK((l * vectorize(sink)).norm() < 1e-14);
    const auto s = liouvillian_spectrum(l);
    CHECK(std::abs(s.eigenvalues(s.zero_mode_index)) < 1e-10);
    CHECK(s.condition_estimate >= 1.0);
}

TEST_CASE("size cap") {
    ChainParams p;
    p.n_sites = 70;
    try {
        build_liouvillian(p);
        FAIL("expected size_limit");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::size_limit);
    }
    p.n_sites = 5;
    CHECK_THROWS_AS(build_liouvillian(p, {}, 30), Error);
}

TEST_CASE("localized closed form") {
    for (int n : {1, 2, 5, 9}) {
        for (double g : {0.2, 2.0, 20.0}) {
            ChainParams p;
            p.sink_rate = g;
            const double tau = transfer_time_liouville(p, build_initial_state(LocalizedState{n}, 10)).value;
            CHECK(oracle::rel(tau, oracle::closed_form_localized(n, 10, g)) < 1e-4);
        }
    }
    ChainParams p;
    p.n_sites = 2;
    CHECK(transfer_time_liouville(p, build_initial_state(LocalizedState{1}, 2)).value == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("spectral route matches the bordered linear-solve oracle") {
    std::mt19937_64 rng(5);
    const std::vector<std::array<double, 3>> points = {
        {0.0, 2.0, 0.0}, {-0.2, 2.0, 1.0}, {0.6, 0.5, 0.05}, {1.5, 8.0, 3.0}, {-0.9, 0.1, 0.3}};
    for (const auto& [e0, g, gp] : points) {
        ChainParams p;
        p.n_sites = 7;
        p.field_step = e0;
        p.sink_rate = g;
        p.dephasing_rate = gp;
        const auto psi = oracle::random_state(rng, 7);
        const auto tau = transfer_time_liouville(p, psi);
        CHECK(tau.method == TransferMethod::liouville_spectral);
        CHECK(oracle::rel(tau.value, oracle::tau_linear_solve(p, psi)) < 1e-8);
    }
}

TEST_CASE("dephased gaussian agrees with time integration") {
    ChainParams p;
    p.field_step = -0.2;
    p.dephasing_rate = 1.0;
    const auto psi = build_initial_state(GaussianState{3, 1, 0}, 10);
    const auto spectral = transfer_time_liouville(p, psi);
    const auto integrated = transfer_time_integrate(p, psi);
    CHECK(integrated.converged);
    CHECK(integrated.method == TransferMethod::integration);
    CHECK(oracle::rel(spectral.value, integrated.value) < 1e-5);
}

TEST_CASE("two-site integration") {
    ChainParams p;
    p.n_sites = 2;
    const auto t = transfer_time_integrate(p, build_initial_state(LocalizedState{1}, 2));
    CHECK(t.converged);
    CHECK(t.value == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("integration agrees with the spectral route on a grid") {
    for (double e0 : {-0.2, 0.0, 0.2}) {
        for (double g : {0.5, 2.0, 8.0}) {
            ChainParams p;
            p.field_step = e0;
            p.sink_rate = g;
            const auto psi = build_initial_state(GaussianState{3, 1, 0}, 10);
            const auto a = transfer_time_liouville(p, psi).value;
            const auto b = transfer_time_integrate(p, psi);
            CHECK(b.converged);
            CHECK(oracle::rel(b.value, a) < 1e-5);
        }
    }
}

TEST_CASE("population dynamics") {
    ChainParams p;
    p.field_step = 0.3;
    p.dephasing_rate = 0.2;
    const auto psi = build_initial_state(GaussianState{3, 1, 0}, 10);
    const double tau = transfer_time_liouville(p, psi).value;
    std::vector<double> times;
    for (int k = 0; k <= 50; ++k) times.push_back(k * tau);
    const auto s = propagate_populations(p, psi, times);
    REQUIRE(s.tau.has_value());
    CHECK(*s.tau == doctest::Approx(tau));
    CHECK(s.site_populations(0, 0) == doctest::Approx(0.0));
    for (int j = 1; j <= 10; ++j) CHECK(s.site_populations(0, j) == doctest::Approx(std::norm(psi(j - 1))));
    for (int r = 0; r < s.site_populations.rows(); ++r) CHECK(std::abs(s.site_populations.row(r).sum() - 1.0) < 1e-8);
    CHECK(s.site_populations(50, 0) >= 1.0 - 1e-6);
}

TEST_CASE("propagated densities stay physical") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> e0(-2, 2), g(0.05, 10), gp(0, 3);
    for (int k = 0; k < 10; ++k) {
        ChainParams p;
        p.n_sites = 6;
        p.field_step = e0(rng);
        p.sink_rate = g(rng);
        p.dephasing_rate = gp(rng);
        const auto rho0 = oracle::random_density(rng, 7);
        const auto out = propagate_density(p, rho0, {0.0, 0.3, 2.0, 15.0});
        for (const auto& rho : out) {
            CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
            CHECK(std::abs(rho.trace() - 1.0) < 1e-8);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
            CHECK(es.eigenvalues().minCoeff() > -1e-8);
        }
    }
}

TEST_CASE("propagation agrees with RK4 at short times") {
    ChainParams p;
    p.n_sites = 4;
    p.field_step = 0.5;
    p.dephasing_rate = 0.4;
    const auto ops = build_operator_set(p);
    std::mt19937_64 rng(2);
    const auto rho0 = oracle::random_density(rng, 5);
    Eigen::MatrixXcd rho = rho0;
    const double h = 1e-3;
    for (int k = 0; k < 2000; ++k) {
        const auto k1 = oracle::lindblad_rhs(ops, rho);
        const auto k2 = oracle::lindblad_rhs(ops, rho + 0.5 * h * k1);
        const auto k3 = oracle::lindblad_rhs(ops, rho + 0.5 * h * k2);
        const auto k4 = oracle::lindblad_rhs(ops, rho + h * k3);
        rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const auto out = propagate_density(p, rho0, {2.0});
    CHECK((out[0] - rho).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("trajectory csv layout") {
    TrajectorySample s;
    s.times = {0.0, 1.0};
    s.site_populations = Eigen::MatrixXd::Zero(2, 3);
    s.site_populations(0, 2) = 1.0;
    s.site_populations(1, 0) = 1.0;
    s.tau = 2.5;
    std::ostringstream os;
    write_trajectory_csv(os, s);
    const std::string text = os.str();
    CHECK(text.rfind("# tau = 2.5\nt,p0,p1,p2\n", 0) == 0);
    CHECK(text.find("\n0,0,0,1\n") != std::string::npos);
}
