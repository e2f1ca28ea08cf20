#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "fgs/config.hpp"

namespace fgs {

/// Built-in experiment scenarios: the published numerical examples, each with
/// both velocity fields (c1 constant, c2 = 1 + sin(.)/4) and the k/M lists and
/// reference sizes used for the error sweeps. The 3D lists ship reduced for
/// desk-scale runs.
struct ScenarioInfo {
    std::string id;
    int dim;
    std::vector<double> k_list;
    std::vector<std::size_t> m_list;
    std::size_t m0;
    double t_final = 0.5;
    double dt = 1e-4;
};

inline const std::vector<ScenarioInfo>& scenario_registry() {
    static const std::vector<ScenarioInfo> reg = [] {
        std::vector<ScenarioInfo> v;
        const std::vector<std::size_t> m1{50, 100, 200, 400, 800, 1600, 3200};
        const std::vector<std::size_t> m2{200, 400, 800, 1600, 3200, 6400, 12800};
        const std::vector<std::size_t> m3{800, 1600, 3200};
        const std::vector<double> k1{512, 1024, 2048, 4096};
        const std::vector<double> k2{256, 512, 1024, 2048};
        const std::vector<double> k3{32, 64};  // reduced 3D defaults
        for (const char* c : {"c1", "c2"}) {
            v.push_back({std::string("1d-gauss-") + c, 1, k1, m1, 150000});
            v.push_back({std::string("2d-gauss-") + c, 2, k2, m2, 200000});
            v.push_back({std::string("3d-gauss-") + c, 3, k3, m3, 50000});
            v.push_back({std::string("1d-wkb-") + c, 1, k1, m1, 150000});
            v.push_back({std::string("1d-wkb-poly-") + c, 1, k1, m1, 150000});
            v.push_back({std::string("2d-wkb-") + c, 2, k2, m2, 200000});
            v.push_back({std::string("3d-wkb-") + c, 3, k3, m3, 50000});
        }
        return v;
    }();
    return reg;
}

inline const ScenarioInfo& find_scenario(const std::string& id) {
    std::string key = id;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) {
        return static_cast<char>(std::tolower(ch));
    });
    for (const auto& s : scenario_registry())
        if (s.id == key) return s;
    throw ConfigError("unknown scenario '" + id + "'");
}

namespace detail {

template <int D> inline VelocityField<D> scenario_velocity(const std::string& id) {
    return id.ends_with("c2") ? VelocityField<D>::sine_sum(1.0, 0.25)
                              : VelocityField<D>::constant(1.0);
}

template <int D> inline SimConfig<D> scenario_config_impl(const ScenarioInfo& info, double k) {
    SimConfig<D> c;
    c.k = k;
    c.velocity = scenario_velocity<D>(info.id);
    c.t_final = info.t_final;
    c.dt = info.dt;

    Vec<D> lo, hi;
    const double half = info.id.starts_with("3d-wkb") ? 2.0 : 1.0;
    lo.fill(-half);
    hi.fill(half);
    c.grid = Grid<D>::for_wavenumber(lo, hi, k);

    if (info.id.find("gauss") != std::string::npos) {
        GaussianInitialData<D> g;
        g.k = k;
        g.center.fill(0.0);
        g.momentum.fill(-1.0);
        g.widths.fill(2.0);
        c.data = g;
        c.sampling_kind = "gaussian";
    } else {
        WKBInitialData<D> w;
        w.k = k;
        QuadraticPhase<D> ph;
        ph.coeff.fill(1.0);
        ph.center.fill(0.5);
        ph.offset = 0.0;
        if (info.id.find("poly") != std::string::npos) {
            if constexpr (D == 1) {
                PolyGaussianAmplitude a;
                a.width = 100.0;
                a.center = 0.0;
                w.amplitude = a;
                w.phase = ph;  // S = (x - 1/2)^2
                c.sampling_kind = "wkb_inverse_transform";
            } else {
                throw ConfigError("poly amplitude scenario is 1D only");
            }
        } else {
            GaussianAmplitude<D> a;
            a.center.fill(0.0);
            a.widths.fill(info.dim == 3 ? 5.0 : 50.0);
            w.amplitude = a;
            if constexpr (D == 1) {
                // S = (|x-1/4|^2 + |x-3/4|^2)/2 = (x-1/2)^2 + 1/16
                ph.offset = 1.0 / 16.0;
            }
            w.phase = ph;
            c.sampling_kind = "wkb_hierarchical";
        }
        c.data = w;
    }
    return c;
}

} // namespace detail

/// Resolve a scenario id at one wave number. D must match the scenario.
template <int D> inline SimConfig<D> scenario_config(const std::string& id, double k) {
    const ScenarioInfo& info = find_scenario(id);
    if (info.dim != D) throw ConfigError("scenario " + id + " has dimension " + std::to_string(info.dim));
    return detail::scenario_config_impl<D>(info, k);
}

} // namespace fgs
