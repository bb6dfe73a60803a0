#include "chaintransport/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "chaintransport/error.hpp"

namespace chaintransport {

void validate(const ChainParams& p) {
    if (p.n_sites < 2) throw_invalid("n_sites must be >= 2");
    if (!(p.hopping > 0.0) || !std::isfinite(p.hopping)) throw_invalid("hopping must be > 0");
    if (!std::isfinite(p.field_step)) throw_invalid("field_step must be finite");
    if (!(p.sink_rate >= 0.0) || !std::isfinite(p.sink_rate))
        throw_invalid("sink_rate must be >= 0");
    if (!(p.dephasing_rate >= 0.0) || !std::isfinite(p.dephasing_rate))
        throw_invalid("dephasing_rate must be >= 0");
    if (p.disorder && (!(p.disorder->width >= 0.0) || !std::isfinite(p.disorder->width)))
        throw_invalid("disorder width must be >= 0");
}

namespace {

double parse_double(std::string_view s, std::string_view what) {
    // from_chars for double is available in libstdc++ 11
    double v = 0.0;
    auto first = s.data();
    auto last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last)
        throw_invalid("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

InitialState parse_initial_state(std::string_view text) {
    auto colon = text.find(':');
    auto kind = text.substr(0, colon);
    auto rest = colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
    if (kind == "flat") {
        if (colon != std::string_view::npos) throw_invalid("flat state takes no arguments");
        return FlatState{};
    }
    if (kind == "localized") {
        double site = parse_double(rest, "localized site");
        if (site != std::floor(site)) throw_invalid("localized site must be an integer");
        return LocalizedState{static_cast<int>(site)};
    }
    if (kind == "gaussian") {
        auto parts = split(rest, ',');
        if (parts.size() != 3) throw_invalid("gaussian state needs center,width,momentum");
        GaussianState g{parse_double(parts[0], "gaussian center"),
                        parse_double(parts[1], "gaussian width"),
                        parse_double(parts[2], "gaussian momentum")};
        if (!(g.width > 0.0)) throw_invalid("gaussian width must be > 0");
        return g;
    }
    throw_invalid("unknown initial state '" + std::string(text) +
                  "' (expected gaussian:c,w,k | localized:n | flat)");
}

std::string to_string(const InitialState& state) {
    if (auto g = std::get_if<GaussianState>(&state))
        return "gaussian:" + fmt(g->center) + "," + fmt(g->width) + "," + fmt(g->momentum);
    if (auto l = std::get_if<LocalizedState>(&state)) return "localized:" + std::to_string(l->site);
    return "flat";
}

Eigen::MatrixXd build_hamiltonian(const ChainParams& params, const SiteEnergies& eps) {
    validate(params);
    const int n = params.n_sites;
    if (eps.size() != 0 && eps.size() != n)
        throw_invalid("site energy vector has length " + std::to_string(eps.size()) +
                      ", expected " + std::to_string(n));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        h(j, j) = (j + 1) * params.field_step + (eps.size() ? eps(j) : 0.0);
        if (j + 1 < n) h(j, j + 1) = h(j + 1, j) = -params.hopping;
    }
    return h;
}

OperatorSet build_operator_set(const ChainParams& params, const SiteEnergies& eps) {
    const int n = params.n_sites;
    const int d = n + 1;
    OperatorSet ops;
    ops.hamiltonian = Eigen::MatrixXcd::Zero(d, d);
    ops.hamiltonian.bottomRightCorner(n, n) = build_hamiltonian(params, eps).cast<std::complex<double>>();

    Eigen::MatrixXcd sink = Eigen::MatrixXcd::Zero(d, d);
    sink(0, n) = 1.0;
    ops.jump_ops.push_back({params.sink_rate, std::move(sink)});
    if (params.dephasing_rate > 0.0) {
        for (int j = 1; j <= n; ++j) {
            Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(d, d);
            proj(j, j) = 1.0;
            ops.jump_ops.push_back({params.dephasing_rate, std::move(proj)});
        }
    }
    return ops;
}

Eigen::VectorXcd build_initial_state(const InitialState& state, int n_sites) {
    if (n_sites < 1) throw_invalid("n_sites must be >= 1");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n_sites);
    if (auto g = std::get_if<GaussianState>(&state)) {
        if (!(g->width > 0.0)) throw_invalid("gaussian width must be > 0");
        for (int j = 1; j <= n_sites; ++j) {
            double x = j - g->center;
            psi(j - 1) = std::polar(std::exp(-x * x / (4.0 * g->width * g->width)), -g->momentum * j);
        }
        double norm = psi.norm();
        if (!(norm > 0.0)) throw_invalid("gaussian state underflows on the chain");
        psi /= norm;
    } else if (auto l = std::get_if<LocalizedState>(&state)) {
        if (l->site < 1 || l->site > n_sites)
            throw_invalid("localized site " + std::to_string(l->site) + " outside 1.." +
                          std::to_string(n_sites));
        psi(l->site - 1) = 1.0;
    } else {
        if (n_sites < 2) throw_invalid("flat state needs at least 2 sites");
        psi.head(n_sites - 1).setConstant(1.0 / std::sqrt(double(n_sites - 1)));
    }
    return psi;
}

SiteEnergies sample_disorder(double width, std::uint64_t seed, std::uint64_t realization,
                             int n_sites) {
    if (!(width >= 0.0)) throw_invalid("disorder width must be >= 0");
    SiteEnergies eps = SiteEnergies::Zero(n_sites);
    if (width == 0.0) return eps;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(realization),
                      static_cast<std::uint32_t>(realization >> 32)};
    std::mt19937_64 rng(seq);
    // uniform_real_distribution is implementation-defined; map 53 bits by hand
    for (int j = 0; j < n_sites; ++j) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        eps(j) = width * (u - 0.5);
    }
    return eps;
}

} // namespace chaintransport
