#include "chaintransport/presets.hpp"

#include <algorithm>

#include "chaintransport/error.hpp"

namespace chaintransport {

namespace {

const char* kGaussian = "gaussian:3,1,0";
const char* kFieldGrid = "symlog:10,0.01,30,5";

Config sweep(const std::string& label, const std::string& axis1, const std::string& axis2,
             const std::string& observable, double gamma_phi, const std::string& state = kGaussian) {
    Config c = {{"command", "sweep"}, {"label", label},       {"n", 10},           {"omega", 1.0},
                {"e0", 0.0},          {"gamma-out", 2.0},     {"gamma-phi", gamma_phi},
                {"state", state},     {"axis1", axis1},       {"axis2", axis2},    {"observable", observable}};
    return c;
}

std::vector<PresetPart> build(std::string_view name) {
    const std::string n(name);
    if (name == "fig2")
        return {{"", sweep(n, std::string("E0=") + kFieldGrid, "gamma_out=log:0.01,100,41", "tau", 0.001)}};
    if (name == "fig3a")
        return {{"", sweep(n, "gamma_out=log:0.01,100,81", "E0=values:0.2,10", "delta_gamma", 0.0)}};
    if (name == "fig3b")
        return {{"", sweep(n, std::string("E0=") + kFieldGrid, "gamma_out=log:0.01,100,41", "delta_gamma", 0.0)}};
    if (name == "fig4")
        return {{"", sweep(n, std::string("E0=") + kFieldGrid, "gamma_phi=log:0.001,10,41", "tau", 0.0)}};
    if (name == "fig5")
        return {{"super", sweep(n + "_super", std::string("E0=") + kFieldGrid, "gamma_out=log:0.01,100,41",
                                "pr_super", 0.0)},
                {"sub", sweep(n + "_sub", std::string("E0=") + kFieldGrid, "gamma_out=log:0.01,100,41",
                              "pr_sub", 0.0)}};
    if (name == "fig6")
        return {{"", sweep(n, "N=lin:6,14,9", "E0=lin:-1,0.2,121", "tau", 1e-6)}};
    if (name == "fig7") {
        auto gauss = sweep(n + "_gaussian", "N=lin:4,20,17", "E0=lin:-1,0.2,121", "tau", 1e-6);
        auto loc = sweep(n + "_localized", "N=lin:4,20,17", "", "tau", 1e-6, "localized:3");
        auto flat = sweep(n + "_flat", "N=lin:4,20,17", "", "tau", 1e-6, "flat");
        return {{"gaussian", gauss}, {"localized", loc}, {"flat", flat}};
    }
    if (name == "fig8") {
        std::vector<PresetPart> parts;
        const double fields[] = {-1.0, -0.2, -0.001, 0.001, 0.2, 1.0};
        const double dephasing[] = {1e-4, 0.1, 1.0};
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 3; ++c) {
                std::string part = "r" + std::to_string(r + 1) + "c" + std::to_string(c + 1);
                Config cfg = {{"command", "trajectory"}, {"label", n + "_" + part}, {"n", 10},
                              {"omega", 1.0},            {"e0", fields[r]},         {"gamma-out", 2.0},
                              {"gamma-phi", dephasing[c]}, {"state", kGaussian},    {"times", "lin:0,40,201"}};
                parts.push_back({part, cfg});
            }
        return parts;
    }
    if (name == "fig_disorder") {
        Config cfg = {{"command", "disorder"}, {"label", n},         {"n", 10},
                      {"omega", 1.0},          {"gamma-out", 2.0},   {"state", kGaussian},
                      {"seed", 1},             {"w-grid", "lin:0,5,11"},
                      {"gamma-phi-grid", "log:0.001,10,13"},         {"realizations", 1000}};
        return {{"", cfg}};
    }
    if (name == "fig_leegwater")
        return {{"", sweep(n, std::string("E0=") + kFieldGrid, "gamma_phi=values:0.01,0.1,0.4,1,2,10", "tau", 0.0)}};
    if (name == "fig_current") {
        std::vector<PresetPart> parts;
        for (auto [part, gp] : {std::pair{"coherent", 0.001}, std::pair{"dephased", 1.0}}) {
            Config cfg = {{"command", "current"}, {"label", n + "_" + part}, {"n", 10},
                          {"omega", 1.0},         {"gamma-out", 2.0},        {"gamma-phi", gp},
                          {"grid", "lin:-2,2,81"}};
            parts.push_back({part, cfg});
        }
        return parts;
    }
    if (name == "fig_conductance")
        return {{"", sweep(n, "gamma_phi=log:0.001,20,27", "E0=values:0.025,0.05,0.1", "current", 0.0,
                           "gaussian:5.5,1,0")}};
    if (name == "app1")
        return {{"", sweep(n, "gamma_out=log:0.01,100,41", "n0=values:1,2,5,9", "tau", 0.0, "localized:1")}};
    if (name == "app2")
        return {{"", sweep(n, std::string("E0=") + kFieldGrid, "gamma_phi=log:0.001,10,41", "tau", 0.0,
                           "localized:3")}};
    throw_invalid("unknown preset '" + n + "'");
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7",
                                                   "fig8", "fig_disorder", "fig_leegwater", "fig_current",
                                                   "fig_conductance", "app1", "app2"};
    return names;
}

std::vector<PresetPart> preset(std::string_view name) {
    auto parts = build(name);
    // empty axis2 means a one-dimensional sweep
    for (auto& p : parts)
        if (p.config.contains("axis2") && p.config["axis2"] == "") p.config.erase("axis2");
    return parts;
}

} // namespace chaintransport
