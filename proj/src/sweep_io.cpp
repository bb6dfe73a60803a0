#include "chaintransport/sweep_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "chaintransport/error.hpp"

namespace chaintransport {

namespace {

const std::string kSpecPrefix = "# spec: ";

double get_number(const Config& cfg, const char* key, double fallback) {
    if (!cfg.contains(key)) return fallback;
    const auto& v = cfg.at(key);
    if (!v.is_number()) throw_invalid(std::string("config key '") + key + "' must be a number");
    return v.get<double>();
}

std::string get_string(const Config& cfg, const char* key, const std::string& fallback) {
    if (!cfg.contains(key)) return fallback;
    const auto& v = cfg.at(key);
    if (!v.is_string()) throw_invalid(std::string("config key '") + key + "' must be a string");
    return v.get<std::string>();
}

long long get_integer(const Config& cfg, const char* key, long long fallback) {
    if (!cfg.contains(key)) return fallback;
    const auto& v = cfg.at(key);
    if (!v.is_number_integer()) throw_invalid(std::string("config key '") + key + "' must be an integer");
    return v.get<long long>();
}

bool energy_like(SweepParameter p) {
    return p == SweepParameter::e0 || p == SweepParameter::gamma_out || p == SweepParameter::gamma_phi ||
           p == SweepParameter::disorder_width;
}

std::optional<double> parse_optional(const std::string& field) {
    if (field.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw_invalid("bad number '" + field + "' in sweep CSV");
    return v;
}

} // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

ChainParams chain_params_from_config(const Config& cfg) {
    const double omega = get_number(cfg, "omega", 1.0);
    if (!(omega > 0.0)) throw_invalid("omega must be > 0");
    ChainParams p;
    const long long n = get_integer(cfg, "n", 10);
    if (n < 2 || n > 1000) throw_invalid("n must be in 2..1000");
    p.n_sites = static_cast<int>(n);
    p.hopping = 1.0;
    p.field_step = get_number(cfg, "e0", 0.0) / omega;
    p.sink_rate = get_number(cfg, "gamma-out", 2.0) / omega;
    p.dephasing_rate = get_number(cfg, "gamma-phi", 0.0) / omega;
    const double w = get_number(cfg, "w", 0.0) / omega;
    const long long seed = get_integer(cfg, "seed", 0);
    if (seed < 0) throw_invalid("seed must be >= 0");
    if (w != 0.0 || cfg.contains("seed")) p.disorder = DisorderSpec{w, static_cast<std::uint64_t>(seed)};
    validate(p);
    return p;
}

SweepAxis parse_axis(const std::string& text, double omega) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw_invalid("axis '" + text + "' must look like NAME=GRID");
    SweepAxis axis;
    axis.parameter = parse_sweep_parameter(text.substr(0, eq));
    axis.grid = parse_grid(text.substr(eq + 1));
    if (energy_like(axis.parameter))
        for (auto& v : axis.grid.values) v /= omega;
    return axis;
}

const std::vector<std::string>& sweep_config_keys() {
    static const std::vector<std::string> keys = {
        "n", "omega", "e0", "gamma-out", "gamma-phi", "w", "seed", "state", "axis1", "axis2",
        "observable", "realizations", "gamma-out-at-st", "label"};
    return keys;
}

SweepSpec sweep_spec_from_config(const Config& cfg) {
    if (!cfg.is_object()) throw_invalid("sweep config must be a JSON object");
    const auto& keys = sweep_config_keys();
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command") {
            if (value != "sweep") throw_invalid("config command is not 'sweep'");
            continue;
        }
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw_invalid("unknown config key '" + key + "'");
    }
    const double omega = get_number(cfg, "omega", 1.0);
    SweepSpec spec;
    spec.base = chain_params_from_config(cfg);
    spec.initial_state = parse_initial_state(get_string(cfg, "state", "gaussian:3,1,0"));
    const std::string a1 = get_string(cfg, "axis1", "");
    if (a1.empty()) throw_invalid("sweep needs axis1");
    spec.axis1 = parse_axis(a1, omega);
    const std::string a2 = get_string(cfg, "axis2", "");
    if (!a2.empty()) spec.axis2 = parse_axis(a2, omega);
    spec.observable = parse_observable(get_string(cfg, "observable", "tau"));
    const long long reals = get_integer(cfg, "realizations", 0);
    if (reals < 0) throw_invalid("realizations must be >= 0");
    if (reals > 0) {
        spec.ensemble = EnsembleSpec{static_cast<int>(reals),
                                     spec.base.disorder ? spec.base.disorder->seed : 0};
    }
    if (cfg.contains("gamma-out-at-st")) {
        if (!cfg.at("gamma-out-at-st").is_boolean()) throw_invalid("gamma-out-at-st must be true or false");
        spec.gamma_out_at_st = cfg.at("gamma-out-at-st").get<bool>();
    }
    spec.label = get_string(cfg, "label", "");
    validate(spec);
    return spec;
}

std::string canonical(const Config& cfg) { return cfg.dump(); }

void write_sweep_csv(std::ostream& os, const SweepResult& r, const std::string& spec_json) {
    os << kSpecPrefix << spec_json << '\n';
    os << "axis1,axis2,value,stderr,status\n";
    const bool two_d = r.spec.axis2.has_value();
    for (std::size_t i = 0; i < r.axis1.size(); ++i)
        for (std::size_t j = 0; j < r.axis2.size(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            const std::string& status = r.status[i][j];
            const bool failed = status.rfind("failed", 0) == 0;
            os << format_number(r.axis1[i]) << ',';
            if (two_d) os << format_number(r.axis2[j]);
            os << ',';
            if (!failed) os << format_number(r.values(ii, jj));
            os << ',';
            if (!failed) os << format_number(r.stderrs(ii, jj));
            os << ',' << status << '\n';
        }
}

SweepCsv read_sweep_csv(std::istream& is) {
    SweepCsv csv;
    std::string line;
    if (!std::getline(is, line) || line.rfind(kSpecPrefix, 0) != 0)
        throw_invalid("sweep CSV must start with '# spec: '");
    csv.spec_json = line.substr(kSpecPrefix.size());
    if (!std::getline(is, line) || line != "axis1,axis2,value,stderr,status")
        throw_invalid("sweep CSV header mismatch");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 5) throw_invalid("sweep CSV row needs 5 fields: " + line);
        SweepCsvRow row;
        auto a1 = parse_optional(f[0]);
        if (!a1) throw_invalid("sweep CSV row without axis1 value");
        row.axis1 = *a1;
        row.axis2 = parse_optional(f[1]);
        row.value = parse_optional(f[2]);
        row.stderr_value = parse_optional(f[3]);
        row.status = f[4];
        csv.rows.push_back(row);
    }
    return csv;
}

Config load_config_text(const std::string& text) {
    std::string body = text;
    if (text.rfind(kSpecPrefix, 0) == 0) {
        auto nl = text.find('\n');
        body = text.substr(kSpecPrefix.size(), nl == std::string::npos ? std::string::npos : nl - kSpecPrefix.size());
    }
    Config cfg;
    try {
        cfg = Config::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw_invalid(std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw_invalid("config must be a JSON object");
    return cfg;
}

} // namespace chaintransport
