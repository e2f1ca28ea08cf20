#pragma once

#include <fstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "fgs/grid.hpp"
#include "fgs/initial_data.hpp"
#include "fgs/velocity.hpp"

namespace fgs {

/// One fully resolved simulation setup (dimension fixed at compile time).
template <int D> struct SimConfig {
    double k = 0.0;
    VelocityField<D> velocity;
    InitialData<D> data;
    Grid<D> grid;
    double t_final = 0.5;
    double dt = 1e-4;
    std::string sampling_kind = "auto";
    std::size_t M = 100;
    std::uint64_t seed = 0;
    int cdf_grid_size = 4096;
};

using AnySimConfig = std::variant<SimConfig<1>, SimConfig<2>, SimConfig<3>>;

namespace detail {

template <int D> inline Vec<D> vec_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != D)
        throw ConfigError(std::string(what) + " must be an array of length " + std::to_string(D));
    Vec<D> v{};
    for (int i = 0; i < D; ++i) v[i] = j[i].get<double>();
    return v;
}

template <int D> inline VelocityField<D> velocity_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    if (kind == "constant") return VelocityField<D>::constant(params.value("c0", 1.0));
    if (kind == "sine_sum")
        return VelocityField<D>::sine_sum(params.value("base", 1.0), params.value("amp", 0.25));
    throw ConfigError("unknown velocity kind '" + kind + "'");
}

template <int D>
inline InitialData<D> initial_data_from_json(const nlohmann::json& j, double k) {
    const std::string kind = j.at("kind").get<std::string>();
    const nlohmann::json& p = j.at("params");
    if (kind == "gaussian") {
        GaussianInitialData<D> g;
        g.k = k;
        g.center = vec_from_json<D>(p.at("center"), "center");
        g.momentum = vec_from_json<D>(p.at("momentum"), "momentum");
        g.widths = vec_from_json<D>(p.at("widths"), "widths");
        if (norm<D>(g.momentum) == 0.0) throw ConfigError("gaussian momentum must be nonzero");
        return g;
    }
    if (kind == "wkb_gaussian" || kind == "wkb_poly_gaussian") {
        WKBInitialData<D> w;
        w.k = k;
        QuadraticPhase<D> ph;
        ph.coeff = p.contains("phase_coeff") ? vec_from_json<D>(p.at("phase_coeff"), "phase_coeff")
                                             : [] { Vec<D> v; v.fill(1.0); return v; }();
        ph.center = vec_from_json<D>(p.at("phase_center"), "phase_center");
        ph.offset = p.value("phase_offset", 0.0);
        w.phase = ph;
        if (kind == "wkb_gaussian") {
            GaussianAmplitude<D> a;
            a.widths = vec_from_json<D>(p.at("amp_widths"), "amp_widths");
            a.center = vec_from_json<D>(p.at("amp_center"), "amp_center");
            w.amplitude = a;
        } else {
            if constexpr (D != 1) throw ConfigError("wkb_poly_gaussian is 1D only");
            PolyGaussianAmplitude a;
            a.width = p.at("amp_width").get<double>();
            a.center = p.value("amp_center", 0.0);
            w.amplitude = a;
        }
        return w;
    }
    throw ConfigError("unknown initial_data kind '" + kind + "'");
}

template <int D> inline SimConfig<D> config_from_json(const nlohmann::json& j) {
    SimConfig<D> c;
    c.k = j.at("wave_number").get<double>();
    if (c.k <= 0.0) throw ConfigError("wave_number must be positive");
    c.velocity = velocity_from_json<D>(j.at("velocity"));
    c.data = initial_data_from_json<D>(j.at("initial_data"), c.k);

    const nlohmann::json& gj = j.at("grid");
    Vec<D> lo{}, hi{};
    const auto& bounds = gj.at("bounds");
    if (!bounds.is_array() || bounds.size() != D)
        throw ConfigError("grid.bounds must list one [lo, hi] pair per axis");
    for (int a = 0; a < D; ++a) {
        lo[a] = bounds[a][0].get<double>();
        hi[a] = bounds[a][1].get<double>();
    }
    c.grid = Grid<D>::for_wavenumber(lo, hi, c.k, gj.value("ppw", default_ppw));

    const nlohmann::json& tj = j.at("time");
    c.t_final = tj.at("t_final").get<double>();
    c.dt = tj.value("dt", 1e-4);
    if (c.t_final < 0.0 || c.dt <= 0.0) throw ConfigError("need t_final >= 0 and dt > 0");

    const nlohmann::json& sj = j.at("sampling");
    c.sampling_kind = sj.value("kind", "auto");
    c.M = sj.at("M").get<std::size_t>();
    c.seed = sj.value("seed", 0ULL);
    c.cdf_grid_size = sj.value("cdf_grid_size", 4096);
    return c;
}

} // namespace detail

inline AnySimConfig parse_config(const nlohmann::json& j) {
    const int dim = j.at("dimension").get<int>();
    switch (dim) {
        case 1: return detail::config_from_json<1>(j);
        case 2: return detail::config_from_json<2>(j);
        case 3: return detail::config_from_json<3>(j);
        default: throw ConfigError("dimension must be 1, 2 or 3");
    }
}

inline AnySimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    try {
        return parse_config(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config schema error: " + std::string(e.what()));
    }
}

} // namespace fgs
