#include "chaintransport/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "chaintransport/analytics.hpp"
#include "chaintransport/error.hpp"
#include "chaintransport/liouvillian.hpp"
#include "chaintransport/nonhermitian.hpp"

#ifndef CHAINTRANSPORT_VERSION
#define CHAINTRANSPORT_VERSION "unknown"
#endif

namespace chaintransport {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPlateauFactor = 1.1;

struct TaskOutcome {
    double value = kNaN;
    bool ok = false;
    std::string error;
};

std::string describe(const std::exception& e) {
    if (auto err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->kind())) + ": " + e.what();
    return std::string("error: ") + e.what();
}

std::string kind_of(const std::string& message) {
    auto colon = message.find(':');
    return colon == std::string::npos ? message : message.substr(0, colon);
}

void apply_axis(SweepParameter p, double v, ChainParams& params, InitialState& state) {
    switch (p) {
        case SweepParameter::e0: params.field_step = v; break;
        case SweepParameter::gamma_out: params.sink_rate = v; break;
        case SweepParameter::gamma_phi: params.dephasing_rate = v; break;
        case SweepParameter::disorder_width:
            if (!params.disorder) params.disorder = DisorderSpec{};
            params.disorder->width = v;
            break;
        case SweepParameter::n_sites:
            if (v != std::floor(v)) throw_invalid("N axis values must be integers");
            params.n_sites = static_cast<int>(v);
            break;
        case SweepParameter::state_center:
            if (auto g = std::get_if<GaussianState>(&state)) {
                g->center = v;
            } else if (auto l = std::get_if<LocalizedState>(&state)) {
                if (v != std::floor(v)) throw_invalid("n0 axis values must be integers for localized states");
                l->site = static_cast<int>(v);
            } else {
                throw_invalid("n0 axis needs a gaussian or localized initial state");
            }
            break;
    }
}

double observable_value(const SweepSpec& spec, ChainParams p, const InitialState& state,
                        const SiteEnergies& eps) {
    if (spec.gamma_out_at_st) p.sink_rate = locate_st(p, default_st_grid(p.hopping)).gamma_st;
    validate(p);
    const Eigen::VectorXcd psi = build_initial_state(state, p.n_sites);
    switch (spec.observable) {
        case Observable::tau: return transfer_time_auto(p, psi, eps).value;
        case Observable::current: {
            if (p.field_step == 0.0) return 0.0;
            ChainParams q = p;
            q.field_step = -p.field_step;
            return 1.0 / transfer_time_auto(q, psi, eps).value - 1.0 / transfer_time_auto(p, psi, eps).value;
        }
        case Observable::delta_gamma:
        case Observable::pr_super:
        case Observable::pr_sub: {
            const auto diag = superradiance_diagnostics(effective_spectrum(p, eps), p.sink_rate);
            if (spec.observable == Observable::pr_super) return diag.pr_super;
            if (spec.observable == Observable::pr_sub) return diag.pr_sub_avg;
            if (!diag.normalized_gap) throw_invalid(diag.note);
            return *diag.normalized_gap;
        }
    }
    throw_invalid("unknown observable");
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> tau_curve(const ChainParams& params, const Eigen::VectorXcd& psi0,
                              const std::vector<double>& grid, int jobs, int& failed) {
    std::vector<double> tau(grid.size(), kNaN);
    parallel_for(static_cast<int>(grid.size()), jobs, [&](int i) {
        ChainParams p = params;
        p.field_step = grid[i];
        try {
            tau[i] = transfer_time_auto(p, psi0).value;
        } catch (const Error&) {
        }
    });
    failed = static_cast<int>(std::count_if(tau.begin(), tau.end(), [](double t) { return std::isnan(t); }));
    return tau;
}

} // namespace

TransferTime transfer_time_auto(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                const SiteEnergies& eps) {
    auto require_converged = [](TransferTime t) {
        if (!t.converged)
            throw Error(ErrorKind::unconverged, "time integration hit its horizon (partial tau " +
                                                    std::to_string(t.value) + ")");
        return t;
    };
    try {
        return require_converged(transfer_time_liouville(params, psi0, eps));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::numerical) throw;
    }
    if (params.dephasing_rate == 0.0) {
        try {
            return require_converged(transfer_time_nonhermitian(params, psi0, eps));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numerical) throw;
        }
    }
    return require_converged(transfer_time_integrate(params, psi0, eps));
}

const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::e0: return "E0";
        case SweepParameter::gamma_out: return "gamma_out";
        case SweepParameter::gamma_phi: return "gamma_phi";
        case SweepParameter::disorder_width: return "W";
        case SweepParameter::n_sites: return "N";
        case SweepParameter::state_center: return "n0";
    }
    return "unknown";
}

const char* to_string(Observable o) {
    switch (o) {
        case Observable::tau: return "tau";
        case Observable::delta_gamma: return "delta_gamma";
        case Observable::pr_super: return "pr_super";
        case Observable::pr_sub: return "pr_sub";
        case Observable::current: return "current";
    }
    return "unknown";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
    for (auto p : {SweepParameter::e0, SweepParameter::gamma_out, SweepParameter::gamma_phi,
                   SweepParameter::disorder_width, SweepParameter::n_sites, SweepParameter::state_center})
        if (name == to_string(p)) return p;
    throw_invalid("unknown sweep parameter '" + std::string(name) +
                  "' (expected E0, gamma_out, gamma_phi, W, N, n0)");
}

Observable parse_observable(std::string_view name) {
    for (auto o : {Observable::tau, Observable::delta_gamma, Observable::pr_super, Observable::pr_sub,
                   Observable::current})
        if (name == to_string(o)) return o;
    throw_invalid("unknown observable '" + std::string(name) + "'");
}

void validate(const SweepSpec& spec) {
    validate(spec.base);
    if (spec.axis1.grid.values.empty()) throw_invalid("axis1 grid is empty");
    if (spec.axis2) {
        if (spec.axis2->grid.values.empty()) throw_invalid("axis2 grid is empty");
        if (spec.axis2->parameter == spec.axis1.parameter) throw_invalid("axis1 and axis2 sweep the same parameter");
    }
    auto swept = [&](SweepParameter p) {
        return spec.axis1.parameter == p || (spec.axis2 && spec.axis2->parameter == p);
    };
    if (spec.gamma_out_at_st && swept(SweepParameter::gamma_out))
        throw_invalid("gamma_out cannot be swept when it is resolved at the transition");
    const bool disordered = swept(SweepParameter::disorder_width) ||
                            (spec.base.disorder && spec.base.disorder->width > 0.0);
    if (disordered && !spec.ensemble) throw_invalid("disorder requires an ensemble (realizations)");
    if (!disordered && spec.ensemble) throw_invalid("an ensemble is only meaningful with disorder");
    if (spec.ensemble && spec.ensemble->n_realizations < 1) throw_invalid("realizations must be >= 1");
}

int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    const int workers = std::min(resolve_jobs(jobs), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

SweepResult run_sweep(const SweepSpec& spec, const RunOptions& options) {
    validate(spec);
    const std::clock_t cpu_start = std::clock();
    SweepResult res;
    res.spec = spec;
    res.axis1 = spec.axis1.grid.values;
    res.axis2 = spec.axis2 ? spec.axis2->grid.values : std::vector<double>{0.0};
    const int n1 = static_cast<int>(res.axis1.size());
    const int n2 = static_cast<int>(res.axis2.size());
    const int reals = spec.ensemble ? spec.ensemble->n_realizations : 1;
    const std::uint64_t seed = spec.ensemble ? spec.ensemble->seed : 0;

    struct Cell {
        ChainParams params;
        InitialState state;
        std::string setup_error;
        int realizations = 1;
        int first_task = 0;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(n1) * n2);
    int tasks = 0;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            Cell& c = cells[static_cast<std::size_t>(i) * n2 + j];
            c.params = spec.base;
            c.state = spec.initial_state;
            try {
                apply_axis(spec.axis1.parameter, res.axis1[i], c.params, c.state);
                if (spec.axis2) apply_axis(spec.axis2->parameter, res.axis2[j], c.params, c.state);
            } catch (const std::exception& e) {
                c.setup_error = describe(e);
            }
            if (c.params.disorder) c.params.disorder->seed = seed;
            const bool disordered = c.params.disorder && c.params.disorder->width > 0.0;
            // a clean cell is evaluated once so it equals the deterministic value exactly
            c.realizations = disordered ? reals : 1;
            c.first_task = tasks;
            tasks += c.realizations;
        }

    std::vector<TaskOutcome> outcomes(static_cast<std::size_t>(tasks));
    std::vector<int> task_cell(static_cast<std::size_t>(tasks));
    for (std::size_t k = 0; k < cells.size(); ++k)
        for (int r = 0; r < cells[k].realizations; ++r) task_cell[cells[k].first_task + r] = static_cast<int>(k);

    parallel_for(tasks, options.jobs, [&](int t) {
        const Cell& c = cells[task_cell[t]];
        TaskOutcome& out = outcomes[t];
        if (!c.setup_error.empty()) {
            out.error = c.setup_error;
            return;
        }
        try {
            SiteEnergies eps;
            if (c.params.disorder && c.params.disorder->width > 0.0)
                eps = sample_disorder(c.params.disorder->width, seed,
                                      static_cast<std::uint64_t>(t - c.first_task), c.params.n_sites);
            out.value = observable_value(spec, c.params, c.state, eps);
            out.ok = std::isfinite(out.value);
            if (!out.ok) out.error = "numerical: non-finite value";
        } catch (const std::exception& e) {
            out.error = describe(e);
        }
    });

    res.values = Eigen::MatrixXd::Constant(n1, n2, kNaN);
    res.stderrs = Eigen::MatrixXd::Zero(n1, n2);
    res.status.assign(n1, std::vector<std::string>(n2));
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const Cell& c = cells[static_cast<std::size_t>(i) * n2 + j];
            double sum = 0.0;
            int ok = 0;
            std::string first_error;
            for (int r = 0; r < c.realizations; ++r) {
                const TaskOutcome& o = outcomes[c.first_task + r];
                if (o.ok) {
                    sum += o.value;
                    ++ok;
                } else {
                    if (first_error.empty()) first_error = o.error;
                    std::string msg = o.error;
                    if (c.realizations > 1) msg = "realization " + std::to_string(r) + ": " + msg;
                    res.failures.push_back({i, j, msg});
                }
            }
            if (ok == 0) {
                res.status[i][j] = "failed:" + kind_of(first_error);
                continue;
            }
            const double mean = sum / ok;
            double ss = 0.0;
            for (int r = 0; r < c.realizations; ++r) {
                const TaskOutcome& o = outcomes[c.first_task + r];
                if (o.ok) ss += (o.value - mean) * (o.value - mean);
            }
            res.values(i, j) = mean;
            res.stderrs(i, j) = ok > 1 ? std::sqrt(ss / (ok - 1) / ok) : 0.0;
            res.status[i][j] = ok == c.realizations
                                   ? "ok"
                                   : "partial:" + std::to_string(ok) + "/" + std::to_string(c.realizations);
        }

    res.provenance.version = CHAINTRANSPORT_VERSION;
    res.provenance.timestamp = utc_timestamp();
    res.provenance.cpu_seconds = double(std::clock() - cpu_start) / CLOCKS_PER_SEC;
    return res;
}

OptimalFieldResult optimal_field_search(const ChainParams& params, const Eigen::VectorXcd& psi0,
                                        const std::vector<double>& grid, const RunOptions& options) {
    validate(params);
    if (grid.empty()) throw_invalid("optimal field search needs a non-empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw_invalid("E0 grid must be strictly increasing");
    OptimalFieldResult r;
    r.grid = grid;
    r.tau = tau_curve(params, psi0, grid, options.jobs, r.failed_points);
    std::size_t best = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!std::isnan(r.tau[i]) && (best == grid.size() || r.tau[i] < r.tau[best])) best = i;
    if (best == grid.size()) throw Error(ErrorKind::numerical, "transfer time failed on every grid point");
    r.e0_opt = grid[best];
    r.tau_min = r.tau[best];
    r.unbracketed = grid.size() < 3 || best == 0 || best + 1 == grid.size();
    const double limit = kPlateauFactor * r.tau_min;
    std::size_t lo = best, hi = best;
    while (lo > 0 && !std::isnan(r.tau[lo - 1]) && r.tau[lo - 1] <= limit) --lo;
    while (hi + 1 < grid.size() && !std::isnan(r.tau[hi + 1]) && r.tau[hi + 1] <= limit) ++hi;
    r.plateau_low = grid[lo];
    r.plateau_high = grid[hi];
    const auto est = optimal_field_estimate(psi0, params, grid);
    r.estimator_e0 = est.e0;
    r.estimator_e0_left = est.e0_left;
    return r;
}

std::vector<ScalingRow> n_scaling_comparison(const ChainParams& params, const std::vector<int>& n_values,
                                             const std::vector<InitialState>& states,
                                             const std::vector<double>& e0_grid, const RunOptions& options) {
    std::vector<ScalingRow> rows;
    for (int n : n_values) {
        ChainParams p = params;
        p.n_sites = n;
        p.field_step = 0.0;
        validate(p);
        for (const auto& s : states) {
            InitialState state = s;
            if (auto l = std::get_if<LocalizedState>(&state)) l->site = std::min(l->site, n);
            const Eigen::VectorXcd psi = build_initial_state(state, n);
            ScalingRow row{n, to_string(state), 0.0, 0.0};
            if (std::holds_alternative<GaussianState>(state)) {
                const auto opt = optimal_field_search(p, psi, e0_grid, options);
                row.e0_used = opt.e0_opt;
                row.tau_min = opt.tau_min;
            } else {
                row.tau_min = transfer_time_auto(p, psi).value;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

SweepResult disorder_study(const ChainParams& params, const InitialState& state, const Grid& w_grid,
                           const Grid& gamma_phi_grid, int n_realizations, std::uint64_t seed,
                           const RunOptions& options) {
    SweepSpec spec;
    spec.base = params;
    spec.base.field_step = 0.0;
    spec.base.disorder.reset();
    spec.initial_state = state;
    spec.axis1 = {SweepParameter::disorder_width, w_grid};
    spec.axis2 = SweepAxis{SweepParameter::gamma_phi, gamma_phi_grid};
    spec.observable = Observable::tau;
    spec.ensemble = EnsembleSpec{n_realizations, seed};
    return run_sweep(spec, options);
}

CurrentResult current_and_conductance(const ChainParams& params, const std::vector<double>& e0_grid,
                                      double fit_window, const std::optional<InitialState>& state,
                                      const RunOptions& options) {
    validate(params);
    if (e0_grid.empty()) throw_invalid("current needs a non-empty E0 grid");
    const int n = params.n_sites;
    const InitialState s = state ? *state : InitialState{GaussianState{0.5 * (n + 1), 1.0, 0.0}};
    const Eigen::VectorXcd psi = build_initial_state(s, n);

    // tau at every +-E0 needed, each computed once
    std::vector<double> fields;
    for (double e : e0_grid) {
        fields.push_back(e);
        fields.push_back(-e);
    }
    std::sort(fields.begin(), fields.end());
    fields.erase(std::unique(fields.begin(), fields.end()), fields.end());
    int failed = 0;
    const auto tau = tau_curve(params, psi, fields, options.jobs, failed);
    auto tau_at = [&](double e) {
        return tau[static_cast<std::size_t>(std::lower_bound(fields.begin(), fields.end(), e) - fields.begin())];
    };

    CurrentResult r;
    r.e0_grid = e0_grid;
    r.fit_window = fit_window > 0.0 ? fit_window : 0.5 * critical_field(n, params.hopping);
    double svi = 0.0, svv = 0.0;
    for (double e : e0_grid) {
        const double tm = tau_at(-e), tp = tau_at(e);
        if (std::isnan(tm) || std::isnan(tp)) {
            r.current.push_back(kNaN);
            ++r.dropped_points;
            continue;
        }
        const double i = 1.0 / tm - 1.0 / tp;
        r.current.push_back(i);
        if (std::abs(e) <= r.fit_window * (1.0 + 1e-12)) {
            const double v = n * e;
            svi += v * i;
            svv += v * v;
            ++r.fit_points;
        }
    }
    if (!(svv > 0.0)) throw_invalid("conductance fit window contains no nonzero field");
    r.conductance = svi / svv;
    double ss = 0.0;
    for (std::size_t k = 0; k < e0_grid.size(); ++k) {
        if (std::isnan(r.current[k]) || std::abs(e0_grid[k]) > r.fit_window * (1.0 + 1e-12)) continue;
        const double d = r.current[k] - r.conductance * n * e0_grid[k];
        ss += d * d;
    }
    r.residual = std::sqrt(ss / r.fit_points);
    return r;
}

} // namespace chaintransport
