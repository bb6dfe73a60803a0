#pragma once

#include <functional>

#include <Eigen/Dense>

namespace chaintransport::detail {

// Computes T = \int_0^inf t f(x(t)) dt for dx/dt = G x, where f is the
// instantaneous flux into an absorbing state and s(x) the probability that has
// not arrived yet. Steps use exact propagators exp(G dt) at dyadic step sizes,
// so stiffness and very slow modes cost only a logarithmic number of squarings.
struct FluxMomentProblem {
    Eigen::MatrixXcd generator;
    Eigen::VectorXcd initial;
    std::function<double(const Eigen::VectorXcd&)> flux;
    std::function<double(const Eigen::VectorXcd&)> survival;
    double slowest_rate = 0.0;  // tail decay rate; <= 0 disables the tail term
};

struct FluxMomentOptions {
    double rel_tol = 1e-10;
    double survival_target = 1e-8;
    double converged_survival = 1e-3;
    double t_max = 1e13;
    int max_steps = 200000;
};

struct FluxMomentResult {
    double value = 0.0;           // includes the exponential tail estimate
    double error_estimate = 0.0;  // quadrature error plus tail magnitude bound
    double t_end = 0.0;
    double survival = 1.0;
    bool converged = false;
    int steps = 0;
};

FluxMomentResult integrate_flux_moment(const FluxMomentProblem& problem,
                                       const FluxMomentOptions& options = {});

} // namespace chaintransport::detail
