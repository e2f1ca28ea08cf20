#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgs/core.hpp"
#include "fgs/grid.hpp"

namespace fgs {

/// Complex wavefield u and du/dt on a grid. FGS reconstruction also fills the
/// analytic spatial gradient (needed by the energy norm); fields loaded from
/// dumps carry only u and du/dt.
template <int D> struct WaveField {
    Grid<D> grid;
    std::vector<cplx> u;
    std::vector<cplx> du_dt;
    std::array<std::vector<cplx>, D> grad;

    // metadata
    double t = 0.0;
    double k = 0.0;
    std::uint64_t M = 0;
    std::uint64_t seed = 0;
    std::string branches = "+-";

    bool has_grad() const { return !grad[0].empty(); }

    void allocate() {
        u.assign(grid.size(), cplx{});
        du_dt.assign(grid.size(), cplx{});
        for (int j = 0; j < D; ++j) grad[j].assign(grid.size(), cplx{});
    }
};

/// High-frequency energy norm (1/k)*sqrt(||du/dt||^2 + ||grad u||^2).
/// Note: the L2 components are combined in quadrature; this is the convention
/// that reproduces the published sampling-error tables (the sum-of-norms
/// variant is exposed as sum_value(), uniformly within a factor sqrt(2)).
struct EnergyNorm {
    double dt_l2 = 0.0;
    double grad_l2 = 0.0;
    double k = 1.0;

    double value() const { return std::hypot(dt_l2, grad_l2) / k; }
    double sum_value() const { return (dt_l2 + grad_l2) / k; }
};

namespace detail {

/// Per-axis trapezoid weights (h inside, h/2 at the ends).
template <int D> inline std::array<std::vector<double>, D> trapezoid_weights(const Grid<D>& g) {
    std::array<std::vector<double>, D> w;
    for (int j = 0; j < D; ++j) {
        w[j].assign(g.n[j], g.h[j]);
        w[j].front() *= 0.5;
        w[j].back() *= 0.5;
    }
    return w;
}

template <int D, typename Term>
inline double l2_accumulate(const Grid<D>& g, Term&& term) {
    const auto w = trapezoid_weights<D>(g);
    std::array<int, D> idx{};
    const std::int64_t total = g.size();
    double acc = 0.0;
    for (std::int64_t lin = 0; lin < total; ++lin) {
        double wq = 1.0;
        for (int j = 0; j < D; ++j) wq *= w[j][idx[j]];
        acc += wq * term(lin);
        // odometer
        for (int j = D - 1; j >= 0; --j) {
            if (++idx[j] < g.n[j]) break;
            idx[j] = 0;
        }
    }
    return acc;
}

} // namespace detail

template <int D> inline EnergyNorm energy_norm(const WaveField<D>& f) {
    if (!f.has_grad())
        throw GridMismatch("energy_norm needs the gradient arrays (see spectral_gradient)");
    EnergyNorm e;
    e.k = f.k;
    e.dt_l2 = std::sqrt(detail::l2_accumulate<D>(f.grid, [&](std::int64_t i) {
        return std::norm(f.du_dt[i]);
    }));
    e.grad_l2 = std::sqrt(detail::l2_accumulate<D>(f.grid, [&](std::int64_t i) {
        double s = 0.0;
        for (int j = 0; j < D; ++j) s += std::norm(f.grad[j][i]);
        return s;
    }));
    return e;
}

/// Energy norm of f - g without materializing the difference field.
template <int D> inline EnergyNorm energy_norm_diff(const WaveField<D>& f, const WaveField<D>& g) {
    if (!(f.grid == g.grid)) throw GridMismatch("energy_norm_diff: grids differ");
    if (f.k != g.k) throw GridMismatch("energy_norm_diff: wave numbers differ");
    if (!f.has_grad() || !g.has_grad())
        throw GridMismatch("energy_norm_diff needs gradient arrays on both fields");
    EnergyNorm e;
    e.k = f.k;
    e.dt_l2 = std::sqrt(detail::l2_accumulate<D>(f.grid, [&](std::int64_t i) {
        return std::norm(f.du_dt[i] - g.du_dt[i]);
    }));
    e.grad_l2 = std::sqrt(detail::l2_accumulate<D>(f.grid, [&](std::int64_t i) {
        double s = 0.0;
        for (int j = 0; j < D; ++j) s += std::norm(f.grad[j][i] - g.grad[j][i]);
        return s;
    }));
    return e;
}

// ---------------------------------------------------------------------------
// Grid dumps: raw little-endian f64 (Re, Im) pairs in row-major order, plus a
// JSON sidecar per array. A field dump is the pair of arrays "u" and "du_dt"
// sharing a basename: <base>.u.f64 / <base>.u.json / <base>.du_dt.f64 / ...

namespace detail {

template <int D>
inline nlohmann::json sidecar_json(const WaveField<D>& f, const std::string& name) {
    nlohmann::json j;
    j["field"] = name;
    j["k"] = f.k;
    j["t"] = f.t;
    j["M"] = f.M;
    j["seed"] = f.seed;
    j["branches"] = f.branches;
    nlohmann::json bounds = nlohmann::json::array(), shape = nlohmann::json::array();
    for (int a = 0; a < D; ++a) {
        bounds.push_back({f.grid.lo[a], f.grid.hi[a]});
        shape.push_back(f.grid.n[a]);
    }
    j["grid"]["bounds"] = bounds;
    j["grid"]["shape"] = shape;
    return j;
}

inline void write_raw(const std::string& path, const std::vector<cplx>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    static_assert(sizeof(cplx) == 2 * sizeof(double));
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(cplx)));
    if (!out) throw Error("short write to " + path);
}

inline std::vector<cplx> read_raw(const std::string& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::vector<cplx> data(count);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(cplx)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(cplx))
        throw Error("short read from " + path);
    return data;
}

} // namespace detail

template <int D>
inline void save_wave_field(const std::string& base, const WaveField<D>& f) {
    for (const char* name : {"u", "du_dt"}) {
        const auto& arr = std::string(name) == "u" ? f.u : f.du_dt;
        detail::write_raw(base + "." + name + ".f64", arr);
        std::ofstream side(base + "." + name + ".json");
        side << detail::sidecar_json<D>(f, name).dump(2) << "\n";
    }
}

template <int D>
inline WaveField<D> load_wave_field(const std::string& base) {
    std::ifstream side(base + ".u.json");
    if (!side) throw Error("cannot open sidecar " + base + ".u.json");
    nlohmann::json j;
    side >> j;
    if (j["grid"]["shape"].size() != D)
        throw GridMismatch("dump dimension does not match the requested loader");
    WaveField<D> f;
    Vec<D> lo, hi;
    std::array<int, D> n{};
    for (int a = 0; a < D; ++a) {
        lo[a] = j["grid"]["bounds"][a][0];
        hi[a] = j["grid"]["bounds"][a][1];
        n[a] = j["grid"]["shape"][a];
    }
    f.k = j["k"];
    f.t = j["t"];
    f.M = j.value("M", 0);
    f.seed = j.value("seed", 0);
    f.branches = j.value("branches", "+-");
    f.grid = Grid<D>(lo, hi, n, f.k);
    f.u = detail::read_raw(base + ".u.f64", f.grid.size());
    f.du_dt = detail::read_raw(base + ".du_dt.f64", f.grid.size());
    return f;
}

} // namespace fgs
