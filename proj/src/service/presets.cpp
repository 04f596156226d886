#include "sarlab/service/presets.hpp"

#include "sarlab/error.hpp"

namespace sarlab::service {

namespace {

Json fmcw(double f0, double bandwidth, Index nf) {
    const double tc = 40e-6;
    const double slope = bandwidth == 10e9 ? 2.5e14 : bandwidth == 5e9 ? 1.25e14 : bandwidth / tc;
    return {{"type", "fmcw"}, {"f0", f0}, {"K", slope}, {"Tc", tc}, {"Tr", 50e-6},
            {"Nc", 64},       {"fS", 10e6}, {"Nf", nf}};
}

Json fig5(Index elements, double bandwidth) {
    const double fc = 435e9;
    return {{"waveform", fmcw(fc - 0.5 * bandwidth, bandwidth, 64)},
            {"aperture", {{"kind", "linear"}, {"ny", elements}, {"dy_lambda", 0.25}, {"Z0", 0.0}}},
            {"scene",
             {{"text",
               {{{"string", "UTD"}, {"height", 0.06}, {"origin_y", -0.066}, {"origin_z", 0.27}, {"spacing", 1e-3}}}}}},
            {"grid", {{"plane_x", 0.0}, {"y", {{"min", -0.08}, {"max", 0.08}, {"count", 161}}},
                      {"z", {{"min", 0.24}, {"max", 0.36}, {"count", 61}}}}},
            {"algo", "rma-linear"},
            {"reconstruction", {{"pad", 8}}}};
}

Json knife() {
    const double fc = 435e9;
    const double bandwidth = 10e9;
    return {{"waveform", fmcw(fc - 0.5 * bandwidth, bandwidth, 32)},
            {"aperture", {{"kind", "cylindrical"}, {"ntheta", 128}, {"ny", 32}, {"dy_lambda", 0.25}, {"R0", 0.05}}},
            {"scene", {{"meshes", {{{"builtin", "knife"}, {"length", 5e-3}, {"spacing", 1.25e-4}, {"seed", 1}}}}}},
            {"grid", {{"x", {{"min", -1.5e-3}, {"max", 1.5e-3}, {"count", 25}}},
                      {"y", {{"min", -3.5e-3}, {"max", 3.5e-3}, {"count", 31}}},
                      {"z", {{"min", -1.5e-3}, {"max", 1.5e-3}, {"count", 25}}}}},
            {"algo", "rma-cylindrical"}};
}

}  // namespace

Json presets() {
    Json list = Json::array();
    auto add = [&](const char* id, const char* title, Json config) {
        list.push_back({{"id", id}, {"title", title}, {"type", "pipeline"}, {"config", std::move(config)}});
    };
    add("fig5a", "128-element linear array, 5 GHz", fig5(128, 5e9));
    add("fig5b", "128-element linear array, 10 GHz", fig5(128, 10e9));
    add("fig5c", "256-element linear array, 5 GHz", fig5(256, 5e9));
    add("fig5d", "256-element linear array, 10 GHz", fig5(256, 10e9));
    add("cylindrical-knife", "Cylindrical scan of a knife model", knife());
    return list;
}

Json preset_config(const std::string& id) {
    for (const auto& p : presets())
        if (p["id"] == id) return p["config"];
    throw ValidationError("unknown preset '" + id + "'", "preset");
}

}  // namespace sarlab::service
