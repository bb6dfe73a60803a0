#include "chaintransport/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <variant>

#include <CLI11.hpp>

#include "chaintransport/analytics.hpp"
#include "chaintransport/error.hpp"
#include "chaintransport/experiments.hpp"
#include "chaintransport/liouvillian.hpp"
#include "chaintransport/nonhermitian.hpp"
#include "chaintransport/presets.hpp"
#include "chaintransport/sweep_io.hpp"

namespace chaintransport::cli {

namespace {

using Value = std::variant<long long, double, std::string, bool>;

struct OptionDef {
    std::string key;
    Value fallback;
    std::string help;
};

// Keys shared by the model-based commands.
const OptionDef kN{"n", 10LL, "number of chain sites N"};
const OptionDef kOmega{"omega", 1.0, "hopping Omega; energies and rates are given in its unit"};
const OptionDef kE0{"e0", 0.0, "field step E0 per site"};
const OptionDef kGammaOut{"gamma-out", 2.0, "sink rate gamma_out"};
const OptionDef kGammaPhi{"gamma-phi", 0.0, "dephasing rate gamma_phi"};
const OptionDef kW{"w", 0.0, "disorder width W"};
const OptionDef kSeed{"seed", 0LL, "disorder seed"};
const OptionDef kRealization{"realization", 0LL, "disorder realization index"};
const OptionDef kState{"state", std::string("gaussian:3,1,0"), "gaussian:c,w,k | localized:n | flat"};
const OptionDef kLabel{"label", std::string(), "free-form label echoed into outputs"};

struct CommandDef {
    std::string name;
    std::string help;
    std::vector<OptionDef> options;
};

const std::vector<CommandDef>& commands() {
    static const std::vector<CommandDef> defs = {
        {"spectrum", "eigenvalues, widths and participation ratios of the effective Hamiltonian",
         {kN, kOmega, kE0, kGammaOut, kW, kSeed, kRealization, kLabel}},
        {"transfer-time", "average transfer time to the sink",
         {kN, kOmega, kE0, kGammaOut, kGammaPhi, kW, kSeed, kRealization, kState, kLabel,
          {"method", std::string("auto"), "auto | liouville | nonhermitian | integrate"}}},
        {"trajectory", "site populations over time",
         {kN, kOmega, kE0, kGammaOut, kGammaPhi, kW, kSeed, kRealization, kState, kLabel,
          {"times", std::string("lin:0,50,101"), "time grid in hbar/Omega"}}},
        {"sweep", "observable on a one- or two-dimensional parameter grid",
         {kN, kOmega, kE0, kGammaOut, kGammaPhi, kW, kSeed, kState, kLabel,
          {"axis1", std::string(), "NAME=GRID, NAME in E0, gamma_out, gamma_phi, W, N, n0"},
          {"axis2", std::string(), "optional second axis"},
          {"observable", std::string("tau"), "tau | delta_gamma | pr_super | pr_sub | current"},
          {"realizations", 0LL, "disorder realizations per cell"},
          {"gamma-out-at-st", false, "resolve gamma_out at the superradiant transition per cell"}}},
        {"optimal-field", "grid search for the field minimizing the transfer time",
         {kN, kOmega, kGammaOut, {"gamma-phi", 1e-6, "dephasing rate gamma_phi"}, kState, kLabel,
          {"grid", std::string("lin:-1,1,201"), "E0 grid"}}},
        {"disorder", "ensemble-averaged transfer time over disorder width and dephasing",
         {kN, kOmega, kGammaOut, kState, kLabel, {"seed", 0LL, "disorder seed"},
          {"w-grid", std::string("lin:0,5,11"), "disorder width grid"},
          {"gamma-phi-grid", std::string("log:0.001,10,13"), "dephasing grid"},
          {"realizations", 1000LL, "disorder realizations per cell"}}},
        {"current", "charge current and linear conductance",
         {kN, kOmega, kGammaOut, kGammaPhi, kLabel,
          {"state", std::string(), "initial state; empty selects gaussian:(N+1)/2,1,0"},
          {"grid", std::string("lin:-1,1,41"), "E0 grid"},
          {"fit-window", 0.0, "max |E0| for the conductance fit; 0 selects half the critical field"}}},
    };
    return defs;
}

const CommandDef& command(const std::string& name) {
    for (const auto& c : commands())
        if (c.name == name) return c;
    throw_invalid("unknown command '" + name + "'");
}

using Values = std::map<std::string, Value>;

Values defaults(const CommandDef& def) {
    Values v;
    for (const auto& o : def.options) v[o.key] = o.fallback;
    return v;
}

void bind(CLI::App& app, const CommandDef& def, Values& values) {
    for (const auto& o : def.options) {
        Value& slot = values.at(o.key);
        const std::string flag = "--" + o.key;
        std::visit(
            [&](auto& target) {
                using T = std::decay_t<decltype(target)>;
                if constexpr (std::is_same_v<T, bool>)
                    app.add_flag(flag, target, o.help);
                else
                    app.add_option(flag, target, o.help)->capture_default_str();
            },
            slot);
    }
}

void assign(Value& slot, const nlohmann::json& j, const std::string& key) {
    auto bad = [&](const char* want) { throw_invalid("config key '" + key + "' must be " + want); };
    if (std::holds_alternative<long long>(slot)) {
        if (!j.is_number_integer()) bad("an integer");
        slot = j.get<long long>();
    } else if (std::holds_alternative<double>(slot)) {
        if (!j.is_number()) bad("a number");
        slot = j.get<double>();
    } else if (std::holds_alternative<std::string>(slot)) {
        if (!j.is_string()) bad("a string");
        slot = j.get<std::string>();
    } else {
        if (!j.is_boolean()) bad("true or false");
        slot = j.get<bool>();
    }
}

// Config entries fill only options that the command line left unset.
void apply_config(const CommandDef& def, const Config& cfg, Values& values,
                  const std::function<bool(const std::string&)>& given) {
    for (const auto& [key, j] : cfg.items()) {
        if (key == "command") {
            if (!j.is_string() || j.get<std::string>() != def.name)
                throw_invalid("config is for command '" + j.dump() + "', not '" + def.name + "'");
            continue;
        }
        auto it = values.find(key);
        if (it == values.end()) throw_invalid("unknown config key '" + key + "' for " + def.name);
        if (!given(key)) assign(it->second, j, key);
    }
}

Config to_config(const CommandDef& def, const Values& values) {
    Config c = Config::object();
    c["command"] = def.name;
    for (const auto& [key, v] : values) std::visit([&](const auto& x) { c[key] = x; }, v);
    return c;
}

// Typed accessors over the resolved values.
struct Resolved {
    const CommandDef& def;
    Config config;  // echo, includes "command"

    double num(const char* k) const { return config.at(k).get<double>(); }
    long long integer(const char* k) const { return config.at(k).get<long long>(); }
    std::string str(const char* k) const { return config.at(k).get<std::string>(); }
    std::string echo() const { return "# spec: " + canonical(config); }
};

struct Output {
    std::string path;
    std::ostream& fallback;
    std::ofstream file;

    std::ostream& stream() {
        if (path.empty()) return fallback;
        if (!file.is_open()) {
            file.open(path);
            if (!file) throw_invalid("cannot open output file '" + path + "'");
        }
        return file;
    }
    bool to_file() const { return !path.empty(); }
};

SiteEnergies realization_energies(const Resolved& r, const ChainParams& p) {
    if (!p.disorder || p.disorder->width == 0.0) return {};
    const long long idx = r.integer("realization");
    if (idx < 0) throw_invalid("realization must be >= 0");
    return sample_disorder(p.disorder->width, p.disorder->seed, static_cast<std::uint64_t>(idx), p.n_sites);
}

Config model_subset(const Config& c) {
    Config m = Config::object();
    for (const char* k : {"n", "omega", "e0", "gamma-out", "gamma-phi", "w", "seed"})
        if (c.contains(k)) m[k] = c.at(k);
    return m;
}

std::vector<double> energy_grid(const std::string& text, double omega) {
    auto g = parse_grid(text).values;
    for (auto& v : g) v /= omega;
    return g;
}

int cmd_spectrum(const Resolved& r, Output& o, std::ostream& out) {
    const ChainParams p = chain_params_from_config(model_subset(r.config));
    const auto spec = effective_spectrum(p, realization_energies(r, p));
    std::ostream& os = o.stream();
    os << r.echo() << '\n' << "index,re_e,gamma,pr\n";
    for (int a = 0; a < spec.size(); ++a)
        os << a << ',' << format_number(spec.eigenvalues(a).real()) << ',' << format_number(spec.widths(a)) << ','
           << format_number(spec.participation(a)) << '\n';
    os << "# check: sum_gamma=" << format_number(spec.widths.sum())
       << ",gamma_out=" << format_number(p.sink_rate) << '\n';
    if (o.to_file())
        out << "spectrum: " << spec.size() << " states, sum_gamma = " << format_number(spec.widths.sum()) << '\n';
    return kExitOk;
}

int cmd_transfer_time(const Resolved& r, Output& o, std::ostream& out) {
    const ChainParams p = chain_params_from_config(model_subset(r.config));
    const auto eps = realization_energies(r, p);
    const auto psi = build_initial_state(parse_initial_state(r.str("state")), p.n_sites);
    const std::string method = r.str("method");
    TransferTime t;
    if (method == "auto") t = transfer_time_auto(p, psi, eps);
    else if (method == "liouville") t = transfer_time_liouville(p, psi, eps);
    else if (method == "nonhermitian") t = transfer_time_nonhermitian(p, psi, eps);
    else if (method == "integrate") t = transfer_time_integrate(p, psi, eps);
    else throw_invalid("unknown method '" + method + "'");
    if (!t.converged)
        throw Error(ErrorKind::unconverged, "integration horizon reached; partial tau " + format_number(t.value));
    std::ostream& os = o.stream();
    os << r.echo() << '\n';
    os << "tau = " << format_number(t.value) << " [hbar/Omega]\n";
    os << "method = " << to_string(t.method) << '\n';
    if (t.method == TransferMethod::integration) os << "error_estimate = " << format_number(t.error_estimate) << '\n';
    if (o.to_file()) out << "tau = " << format_number(t.value) << " [hbar/Omega]\n";
    return kExitOk;
}

int cmd_trajectory(const Resolved& r, Output& o, std::ostream& out) {
    const ChainParams p = chain_params_from_config(model_subset(r.config));
    const auto psi = build_initial_state(parse_initial_state(r.str("state")), p.n_sites);
    const auto times = parse_grid(r.str("times")).values;
    const auto sample = propagate_populations(p, psi, times, realization_energies(r, p));
    std::ostream& os = o.stream();
    os << r.echo() << '\n';
    write_trajectory_csv(os, sample);
    if (o.to_file()) {
        out << "trajectory: " << times.size() << " samples";
        if (sample.tau) out << ", tau = " << format_number(*sample.tau) << " [hbar/Omega]";
        out << '\n';
    }
    return kExitOk;
}

void report_sweep(const SweepResult& res, std::ostream& out) {
    int failed = 0;
    for (const auto& row : res.status)
        for (const auto& s : row)
            if (s != "ok") ++failed;
    out << "sweep: " << res.axis1.size() * res.axis2.size() << " cells, " << failed << " not ok, cpu "
        << format_number(res.provenance.cpu_seconds) << " s, version " << res.provenance.version << ", "
        << res.provenance.timestamp << '\n';
}

int cmd_sweep(const Resolved& r, Output& o, std::ostream& out, const RunOptions& run) {
    const SweepSpec spec = sweep_spec_from_config(r.config);
    const SweepResult res = run_sweep(spec, run);
    write_sweep_csv(o.stream(), res, canonical(r.config));
    report_sweep(res, o.to_file() ? out : std::cerr);
    return kExitOk;
}

int cmd_optimal_field(const Resolved& r, Output& o, std::ostream& out, const RunOptions& run) {
    const ChainParams p = chain_params_from_config(model_subset(r.config));
    const auto psi = build_initial_state(parse_initial_state(r.str("state")), p.n_sites);
    const auto res = optimal_field_search(p, psi, energy_grid(r.str("grid"), r.num("omega")), run);
    std::ostream& os = o.stream();
    os << r.echo() << '\n' << "e0,tau,status\n";
    for (std::size_t i = 0; i < res.grid.size(); ++i) {
        const bool ok = !std::isnan(res.tau[i]);
        os << format_number(res.grid[i]) << ',' << (ok ? format_number(res.tau[i]) : "") << ','
           << (ok ? "ok" : "failed") << '\n';
    }
    std::ostringstream summary;
    summary << "e0_opt = " << format_number(res.e0_opt) << ", tau_min = " << format_number(res.tau_min)
            << ", plateau = [" << format_number(res.plateau_low) << ", " << format_number(res.plateau_high)
            << "], estimator = " << format_number(res.estimator_e0)
            << ", estimator_left = " << format_number(res.estimator_e0_left)
            << (res.unbracketed ? ", unbracketed" : "") << '\n';
    os << "# " << summary.str();
    if (o.to_file()) out << summary.str();
    return kExitOk;
}

int cmd_disorder(const Resolved& r, Output& o, std::ostream& out, const RunOptions& run) {
    const double omega = r.num("omega");
    Config m = model_subset(r.config);
    m.erase("seed");
    const ChainParams p = chain_params_from_config(m);
    const long long seed = r.integer("seed");
    const long long reals = r.integer("realizations");
    if (seed < 0) throw_invalid("seed must be >= 0");
    if (reals < 1) throw_invalid("realizations must be >= 1");
    Grid w = parse_grid(r.str("w-grid"));
    Grid g = parse_grid(r.str("gamma-phi-grid"));
    for (auto& v : w.values) v /= omega;
    for (auto& v : g.values) v /= omega;
    const auto res = disorder_study(p, parse_initial_state(r.str("state")), w, g, static_cast<int>(reals),
                                    static_cast<std::uint64_t>(seed), run);
    write_sweep_csv(o.stream(), res, canonical(r.config));
    report_sweep(res, o.to_file() ? out : std::cerr);
    return kExitOk;
}

int cmd_current(const Resolved& r, Output& o, std::ostream& out, const RunOptions& run) {
    const double omega = r.num("omega");
    const ChainParams p = chain_params_from_config(model_subset(r.config));
    std::optional<InitialState> state;
    if (!r.str("state").empty()) state = parse_initial_state(r.str("state"));
    const auto res = current_and_conductance(p, energy_grid(r.str("grid"), omega), r.num("fit-window") / omega,
                                             state, run);
    std::ostream& os = o.stream();
    os << r.echo() << '\n' << "e0,current,status\n";
    for (std::size_t i = 0; i < res.e0_grid.size(); ++i) {
        const bool ok = !std::isnan(res.current[i]);
        os << format_number(res.e0_grid[i]) << ',' << (ok ? format_number(res.current[i]) : "") << ','
           << (ok ? "ok" : "failed") << '\n';
    }
    std::ostringstream summary;
    summary << "g = " << format_number(res.conductance) << " [e^2/hbar], fit_window = "
            << format_number(res.fit_window) << ", fit_points = " << res.fit_points
            << ", residual = " << format_number(res.residual) << '\n';
    os << "# " << summary.str();
    if (o.to_file()) out << summary.str();
    return kExitOk;
}

int dispatch(const Resolved& r, Output& o, std::ostream& out, const RunOptions& run) {
    const std::string& name = r.def.name;
    if (name == "spectrum") return cmd_spectrum(r, o, out);
    if (name == "transfer-time") return cmd_transfer_time(r, o, out);
    if (name == "trajectory") return cmd_trajectory(r, o, out);
    if (name == "sweep") return cmd_sweep(r, o, out, run);
    if (name == "optimal-field") return cmd_optimal_field(r, o, out, run);
    if (name == "disorder") return cmd_disorder(r, o, out, run);
    if (name == "current") return cmd_current(r, o, out, run);
    throw_invalid("unknown command '" + name + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_invalid("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int resolve_jobs_flag(int jobs) {
    if (jobs > 0) return jobs;
    if (const char* env = std::getenv("CHAINTRANSPORT_JOBS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw_invalid("CHAINTRANSPORT_JOBS must be a positive integer");
        return static_cast<int>(v);
    }
    return 0;
}

std::string part_path(const std::string& base, const std::string& part) {
    if (part.empty()) return base;
    auto dot = base.rfind('.');
    auto slash = base.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return base + "_" + part;
    return base.substr(0, dot) + "_" + part + base.substr(dot);
}

int run_preset(const std::string& name, const std::string& out_path, const RunOptions& run, std::ostream& out) {
    const auto parts = preset(name);
    const std::string base = out_path.empty() ? name + ".csv" : out_path;
    for (const auto& part : parts) {
        const CommandDef& def = command(part.config.at("command").get<std::string>());
        Values values = defaults(def);
        apply_config(def, part.config, values, [](const std::string&) { return false; });
        Resolved r{def, to_config(def, values)};
        Output o{part_path(base, part.part), out, {}};
        out << name << (part.part.empty() ? "" : "/" + part.part) << " -> " << o.path << '\n';
        dispatch(r, o, out, run);
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Single-excitation transport through a tilted, dephased chain with a sink", "chaintransport"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CHAINTRANSPORT_VERSION));

    std::map<std::string, Values> values;
    std::map<std::string, CLI::App*> subs;
    std::string config_path, out_path, preset_name;
    int jobs = 0;
    for (const auto& def : commands()) {
        auto* sub = app.add_subcommand(def.name, def.help);
        values[def.name] = defaults(def);
        bind(*sub, def, values[def.name]);
        sub->add_option("--config", config_path, "JSON config file, or a file whose first line is '# spec: {...}'");
        sub->add_option("--out", out_path, "output file (default: standard output)");
        sub->add_option("--jobs", jobs, "concurrent tasks (default: CHAINTRANSPORT_JOBS or all cores)");
        subs[def.name] = sub;
    }
    auto* preset_cmd = app.add_subcommand("preset", "regenerate a named figure data set");
    preset_cmd->add_option("name", preset_name, "preset name")->required();
    preset_cmd->add_option("--out", out_path, "output CSV (multi-part presets append _<part>)");
    preset_cmd->add_option("--jobs", jobs, "concurrent tasks");
    std::string preset_list;
    for (const auto& n : preset_names()) preset_list += (preset_list.empty() ? "" : ", ") + n;
    preset_cmd->footer("presets: " + preset_list);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << CHAINTRANSPORT_VERSION << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        RunOptions run;
        if (jobs < 0) throw_invalid("--jobs must be >= 0");
        run.jobs = resolve_jobs_flag(jobs);
        if (preset_cmd->parsed()) return run_preset(preset_name, out_path, run, out);

        const CommandDef* def = nullptr;
        for (const auto& d : commands())
            if (subs[d.name]->parsed()) def = &d;
        if (!def) throw_invalid("no command given");
        Values& vals = values[def->name];
        if (!config_path.empty()) {
            CLI::App* sub = subs[def->name];
            apply_config(*def, load_config_text(read_file(config_path)), vals,
                         [&](const std::string& key) { return sub->count("--" + key) > 0; });
        }
        Resolved r{*def, to_config(*def, vals)};
        Output o{out_path, out, {}};
        return dispatch(r, o, out, run);
    } catch (const Error& e) {
        const bool usage = e.kind() == ErrorKind::invalid_argument;
        err << "error[" << (usage ? "usage" : to_string(e.kind())) << "]: " << e.what() << '\n';
        return usage ? kExitUsage : kExitSolver;
    } catch (const std::exception& e) {
        err << "error[internal]: " << e.what() << '\n';
        return kExitSolver;
    }
}

} // namespace chaintransport::cli
