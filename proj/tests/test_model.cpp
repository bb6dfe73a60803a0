#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "chaintransport/error.hpp"
#include "chaintransport/model.hpp"
#include "oracles.hpp"

using namespace chaintransport;

TEST_CASE("two-site chain at zero field") {
    ChainParams p;
    p.n_sites = 2;
    Eigen::Matrix2d expected;
    expected << 0, -1, -1, 0;
    CHECK((build_hamiltonian(p) - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("tilted three-site chain") {
    ChainParams p;
    p.n_sites = 3;
    p.field_step = 0.5;
    const auto h = build_hamiltonian(p);
    CHECK(h(0, 0) == doctest::Approx(0.5));
    CHECK(h(1, 1) == doctest::Approx(1.0));
    CHECK(h(2, 2) == doctest::Approx(1.5));
    CHECK(h(0, 1) == -1.0);
    CHECK(h(1, 2) == -1.0);
    CHECK(h(0, 2) == 0.0);
}

TEST_CASE("tilted chain spectrum matches a symmetric eigensolver") {
    ChainParams p;
    p.field_step = 0.2;
    const auto h = build_hamiltonian(p);
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(10, 10);
    for (int j = 0; j < 10; ++j) {
        ref(j, j) = 0.2 * (j + 1);
        if (j + 1 < 10) ref(j, j + 1) = ref(j + 1, j) = -1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(h), b(ref);
    CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero-field spectrum is -2 cos(pi k/(N+1))") {
    ChainParams p;
    p.n_sites = 7;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(p));
    for (int k = 1; k <= 7; ++k)
        CHECK(es.eigenvalues()(k - 1) == doctest::Approx(-2.0 * std::cos(std::numbers::pi * k / 8.0)).epsilon(1e-12));
}

TEST_CASE("site energies add to the diagonal") {
    ChainParams p;
    p.n_sites = 3;
    Eigen::VectorXd eps(3);
    eps << 0.1, -0.2, 0.3;
    const auto h = build_hamiltonian(p, eps);
    CHECK(h(1, 1) == doctest::Approx(-0.2));
    CHECK_THROWS_AS(build_hamiltonian(p, Eigen::VectorXd::Zero(2)), Error);
}

TEST_CASE("parameter validation") {
    ChainParams p;
    p.n_sites = 1;
    CHECK_THROWS_AS(validate(p), Error);
    p = ChainParams{};
    p.hopping = 0;
    CHECK_THROWS_AS(validate(p), Error);
    p = ChainParams{};
    p.sink_rate = -1;
    CHECK_THROWS_AS(validate(p), Error);
    p = ChainParams{};
    p.dephasing_rate = -1;
    CHECK_THROWS_AS(validate(p), Error);
    p = ChainParams{};
    p.disorder = DisorderSpec{-1, 0};
    CHECK_THROWS_AS(validate(p), Error);
    try {
        p = ChainParams{};
        p.n_sites = 0;
        validate(p);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_argument);
    }
}

TEST_CASE("operator set layout") {
    ChainParams p;
    p.n_sites = 4;
    p.dephasing_rate = 0.3;
    const auto ops = build_operator_set(p);
    CHECK(ops.hamiltonian.rows() == 5);
    CHECK(ops.hamiltonian.row(0).norm() == 0.0);
    REQUIRE(ops.jump_ops.size() == 5);
    CHECK(ops.jump_ops[0].rate == 2.0);
    CHECK(ops.jump_ops[0].op(0, 4) == oracle::cd(1.0));
    CHECK(ops.jump_ops[0].op.norm() == doctest::Approx(1.0));
    for (int j = 1; j <= 4; ++j) {
        CHECK(ops.jump_ops[j].rate == 0.3);
        CHECK(ops.jump_ops[j].op(j, j) == oracle::cd(1.0));
        CHECK(ops.jump_ops[j].op.norm() == doctest::Approx(1.0));
    }
    p.dephasing_rate = 0.0;
    CHECK(build_operator_set(p).jump_ops.size() == 1);
}

TEST_CASE("localized state") {
    const auto v = build_initial_state(LocalizedState{3}, 10);
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK(v(2) == oracle::cd(1.0));
    CHECK_THROWS_AS(build_initial_state(LocalizedState{11}, 10), Error);
    CHECK_THROWS_AS(build_initial_state(LocalizedState{0}, 10), Error);
}

TEST_CASE("gaussian state peaks at its center") {
    const auto v = build_initial_state(GaussianState{3, 1, 0}, 10);
    CHECK(v.norm() == doctest::Approx(1.0));
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    CHECK(arg == 2);
    for (int j = 0; j < 10; ++j) {
        CHECK(v(j).real() > 0.0);
        CHECK(std::abs(v(j).imag()) < 1e-15);
    }
}

TEST_CASE("mid-chain gaussian is mirror symmetric") {
    const auto v = build_initial_state(GaussianState{5.5, 1, 0}, 10);
    for (int j = 1; j <= 10; ++j) CHECK(std::abs(v(j - 1) - v(10 - j)) < 1e-14);
}

TEST_CASE("gaussian momentum sets the phase gradient") {
    const auto v = build_initial_state(GaussianState{5, 2, 0.7}, 10);
    for (int j = 0; j + 1 < 10; ++j) {
        const double dphi = std::arg(v(j + 1) / v(j));
        CHECK(std::abs(std::remainder(std::abs(dphi) - 0.7, 2 * std::numbers::pi)) < 1e-12);
    }
    CHECK_THROWS_AS(build_initial_state(GaussianState{5, 0, 0}, 10), Error);
}

TEST_CASE("flat state avoids the sink-adjacent site") {
    const auto v = build_initial_state(FlatState{}, 10);
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK(v(9) == oracle::cd(0.0));
    for (int j = 0; j < 9; ++j) CHECK(v(j).real() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("initial state text round trip") {
    for (const char* s : {"gaussian:3,1,0", "gaussian:5.5,2,0.25", "localized:4", "flat"}) {
        const auto st = parse_initial_state(s);
        CHECK(to_string(parse_initial_state(to_string(st))) == to_string(st));
    }
    const auto g = std::get<GaussianState>(parse_initial_state("gaussian:5.5,2,0.25"));
    CHECK(g.center == 5.5);
    CHECK(g.width == 2.0);
    CHECK(g.momentum == 0.25);
    CHECK(std::get<LocalizedState>(parse_initial_state("localized:4")).site == 4);
    for (const char* bad : {"", "gauss:1,2,3", "gaussian:1,2", "localized:x", "localized:", "flat:1"})
        CHECK_THROWS_AS(parse_initial_state(bad), Error);
}

TEST_CASE("disorder sampling") {
    CHECK(sample_disorder(0.0, 5, 0, 10).norm() == 0.0);
    const auto a = sample_disorder(1.0, 42, 7, 10);
    const auto b = sample_disorder(1.0, 42, 7, 10);
    CHECK(a == b);
    CHECK(a != sample_disorder(1.0, 42, 8, 10));
    CHECK(a != sample_disorder(1.0, 43, 7, 10));
    double sum = 0.0;
    double lo = 1.0, hi = -1.0;
    const int draws = 10000;
    for (int r = 0; r < draws; ++r) {
        const auto e = sample_disorder(1.0, 1, r, 10);
        sum += e.sum();
        lo = std::min(lo, e.minCoeff());
        hi = std::max(hi, e.maxCoeff());
    }
    CHECK(lo >= -0.5);
    CHECK(hi <= 0.5);
    const double n = 10.0 * draws;
    const double sigma = std::sqrt(1.0 / 12.0 / n);
    CHECK(std::abs(sum / n) < 3 * sigma);
}
