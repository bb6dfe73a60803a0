#include "chaintransport/moment_integrator.hpp"

#include <array>
#include <cmath>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

#include "chaintransport/error.hpp"

namespace chaintransport::detail {

namespace {

constexpr int kMinLevel = -12;
constexpr int kMaxLevel = 60;
constexpr int kPanels = 8;

// Caches exp(G h0 2^k). Non-positive levels come straight from the matrix
// exponential, positive ones from squaring the level below.
class PropagatorLadder {
public:
    PropagatorLadder(const Eigen::MatrixXcd& g, double h0) : g_(g), h0_(h0) {}

    double step(int level) const { return std::ldexp(h0_, level); }

    const Eigen::MatrixXcd& get(int level) {
        auto it = cache_.find(level);
        if (it != cache_.end()) return it->second;
        Eigen::MatrixXcd p;
        if (level <= 0) {
            Eigen::MatrixXcd scaled = g_ * step(level);
            p = scaled.exp();
        } else {
            const Eigen::MatrixXcd& half = get(level - 1);
            p = half * half;
        }
        return cache_.emplace(level, std::move(p)).first->second;
    }

private:
    const Eigen::MatrixXcd& g_;
    double h0_;
    std::map<int, Eigen::MatrixXcd> cache_;
};

} // namespace

FluxMomentResult integrate_flux_moment(const FluxMomentProblem& pb, const FluxMomentOptions& opt) {
    if (pb.generator.rows() != pb.generator.cols() || pb.generator.rows() != pb.initial.size())
        throw_invalid("flux moment: generator and initial vector sizes disagree");
    const double gnorm = pb.generator.cwiseAbs().colwise().sum().maxCoeff();
    if (!(gnorm > 0.0)) throw Error(ErrorKind::numerical, "flux moment: zero generator");
    PropagatorLadder ladder(pb.generator, 1.0 / gnorm);

    FluxMomentResult res;
    Eigen::VectorXcd x = pb.initial;
    double t = 0.0;
    double acc = 0.0;
    double err_acc = 0.0;
    int level = 0;
    double survival_before = 0.0;
    double last_dt = 0.0;
    std::array<Eigen::VectorXcd, kPanels + 1> xs;
    std::array<double, kPanels + 1> g;

    res.survival = pb.survival(x);
    while (res.survival > opt.survival_target && t < opt.t_max) {
        if (++res.steps > opt.max_steps) break;
        const Eigen::MatrixXcd& p = ladder.get(level);
        const double dt = ladder.step(level);
        xs[0] = x;
        for (int i = 1; i <= kPanels; ++i) xs[i] = p * xs[i - 1];
        for (int i = 0; i <= kPanels; ++i) g[i] = (t + i * dt) * pb.flux(xs[i]);

        double s8 = g[0] + g[kPanels];
        for (int i = 1; i < kPanels; ++i) s8 += (i % 2 ? 4.0 : 2.0) * g[i];
        s8 *= dt / 3.0;
        double s4 = g[0] + 4.0 * (g[2] + g[6]) + 2.0 * g[4] + g[8];
        s4 *= 2.0 * dt / 3.0;
        const double err = std::abs(s8 - s4) / 15.0;
        const double val = s8 + (s8 - s4) / 15.0;
        const double tol = opt.rel_tol * (std::abs(acc) + std::abs(val));

        if (err > tol && level > kMinLevel) {
            --level;
            continue;
        }
        acc += val;
        err_acc += err;
        t += kPanels * dt;
        x = xs[kPanels];
        survival_before = res.survival;
        last_dt = kPanels * dt;
        res.survival = pb.survival(x);
        if (err < tol / 32.0 && level < kMaxLevel) ++level;
    }

    // The remaining mass decays at least as fast as the slowest mode; the
    // rate seen over the last step is used for the value, the bound for the error.
    double tail = 0.0;
    double tail_bound = 0.0;
    if (pb.slowest_rate > 0.0) {
        double rate = pb.slowest_rate;
        if (last_dt > 0.0 && res.survival > 0.0 && survival_before > res.survival)
            rate = std::max(rate, std::log(survival_before / res.survival) / last_dt);
        tail = res.survival * (t + 1.0 / rate);
        tail_bound = res.survival * (t + 1.0 / pb.slowest_rate);
    }
    res.value = acc + tail;
    res.error_estimate = err_acc + tail_bound;
    res.t_end = t;
    res.converged = res.survival <= opt.converged_survival;
    return res;
}

} // namespace chaintransport::detail
