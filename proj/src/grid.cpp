#include "chaintransport/grid.hpp"

#include <charconv>
#include <cmath>

#include "chaintransport/error.hpp"

namespace chaintransport {

namespace {

std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(',', start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

double number(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw_invalid("bad number '" + std::string(s) + "' in grid");
    return v;
}

int count(std::string_view s) {
    double v = number(s);
    if (v != std::floor(v) || v < 1 || v > 1e6) throw_invalid("bad point count '" + std::string(s) + "'");
    return static_cast<int>(v);
}

std::string shortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void require_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) throw_invalid("grid values must be strictly increasing");
}

} // namespace

std::vector<double> linspace(double first, double last, int n) {
    if (n < 1) throw_invalid("grid needs at least one point");
    if (n == 1) return {first};
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = first + (last - first) * i / double(n - 1);
    v.back() = last;
    return v;
}

std::vector<double> logspace(double first, double last, int n) {
    if (!(first > 0.0) || !(last > 0.0)) throw_invalid("log grid endpoints must be > 0");
    auto e = linspace(std::log10(first), std::log10(last), n);
    for (auto& x : e) x = std::pow(10.0, x);
    e.front() = first;
    e.back() = last;
    return e;
}

std::vector<double> symlogspace(double max, double linthresh, int log_count, int lin_count) {
    if (!(linthresh > 0.0) || !(max > linthresh)) throw_invalid("symlog grid needs max > linthresh > 0");
    if (log_count < 1 || lin_count < 1) throw_invalid("symlog grid needs positive point counts");
    std::vector<double> mags(log_count);
    const double ratio = std::log10(max / linthresh);
    for (int i = 1; i <= log_count; ++i) mags[i - 1] = linthresh * std::pow(10.0, ratio * i / log_count);
    mags.back() = max;
    std::vector<double> v;
    for (auto it = mags.rbegin(); it != mags.rend(); ++it) v.push_back(-*it);
    for (double x : linspace(-linthresh, linthresh, lin_count)) v.push_back(lin_count == 1 ? 0.0 : x);
    for (double m : mags) v.push_back(m);
    return v;
}

Grid parse_grid(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw_invalid("grid '" + std::string(text) + "' needs a kind prefix (lin|log|symlog|values)");
    auto kind = text.substr(0, colon);
    auto args = split_commas(text.substr(colon + 1));
    Grid g;
    auto want = [&](std::size_t n) {
        if (args.size() != n)
            throw_invalid("grid kind '" + std::string(kind) + "' takes " + std::to_string(n) + " arguments");
    };
    if (kind == "lin") {
        want(3);
        double a = number(args[0]), b = number(args[1]);
        int n = count(args[2]);
        g.scale = GridScale::linear;
        g.values = linspace(a, b, n);
        g.text = "lin:" + shortest(a) + "," + shortest(b) + "," + std::to_string(n);
    } else if (kind == "log") {
        want(3);
        double a = number(args[0]), b = number(args[1]);
        int n = count(args[2]);
        g.scale = GridScale::log;
        g.values = logspace(a, b, n);
        g.text = "log:" + shortest(a) + "," + shortest(b) + "," + std::to_string(n);
    } else if (kind == "symlog") {
        want(4);
        double m = number(args[0]), t = number(args[1]);
        int nl = count(args[2]), nn = count(args[3]);
        g.scale = GridScale::symlog;
        g.values = symlogspace(m, t, nl, nn);
        g.text = "symlog:" + shortest(m) + "," + shortest(t) + "," + std::to_string(nl) + "," +
                 std::to_string(nn);
    } else if (kind == "values") {
        g.scale = GridScale::values;
        g.text = "values:";
        for (std::size_t i = 0; i < args.size(); ++i) {
            g.values.push_back(number(args[i]));
            g.text += (i ? "," : "") + shortest(g.values.back());
        }
    } else {
        throw_invalid("unknown grid kind '" + std::string(kind) + "'");
    }
    require_increasing(g.values);
    return g;
}

const char* to_string(GridScale s) {
    switch (s) {
        case GridScale::linear: return "linear";
        case GridScale::log: return "log";
        case GridScale::symlog: return "symlog";
        case GridScale::values: return "values";
    }
    return "unknown";
}

} // namespace chaintransport
