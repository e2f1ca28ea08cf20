#pragma once

#include <cstdint>

#include "fgs/core.hpp"

namespace fgs {

inline constexpr int default_ppw = 8;
inline constexpr int min_points_per_axis = 32;

/// Uniform rectangular grid, endpoints included. Construction enforces the
/// points-per-wavelength constraint h_j <= 2*pi/(ppw*k), so a grid that is
/// too coarse for its wave number cannot exist.
template <int D> struct Grid {
    Vec<D> lo{}, hi{};
    std::array<int, D> n{};
    Vec<D> h{};

    Grid() = default;

    Grid(const Vec<D>& lo_, const Vec<D>& hi_, const std::array<int, D>& n_,
         double k, int ppw = default_ppw)
        : lo(lo_), hi(hi_), n(n_) {
        const double hmax = 2.0 * pi / (ppw * k);
        for (int j = 0; j < D; ++j) {
            if (hi[j] <= lo[j]) throw ConfigError("grid bounds must satisfy lo < hi");
            if (n[j] < min_points_per_axis) throw GridTooCoarse("grid needs >= 32 points per axis");
            h[j] = (hi[j] - lo[j]) / (n[j] - 1);
            if (h[j] > hmax * (1.0 + 1e-12))
                throw GridTooCoarse("grid spacing violates the points-per-wavelength constraint");
        }
    }

    /// Smallest grid satisfying the PPW constraint on the given box.
    static Grid for_wavenumber(const Vec<D>& lo, const Vec<D>& hi, double k,
                               int ppw = default_ppw) {
        std::array<int, D> n{};
        const double hmax = 2.0 * pi / (ppw * k);
        for (int j = 0; j < D; ++j) {
            const int cells = static_cast<int>(std::ceil((hi[j] - lo[j]) / hmax));
            n[j] = std::max(cells + 1, min_points_per_axis);
        }
        return Grid(lo, hi, n, k, ppw);
    }

    std::int64_t size() const {
        std::int64_t s = 1;
        for (int j = 0; j < D; ++j) s *= n[j];
        return s;
    }

    double coord(int axis, int i) const { return lo[axis] + h[axis] * i; }

    Vec<D> point(const std::array<int, D>& idx) const {
        Vec<D> x{};
        for (int j = 0; j < D; ++j) x[j] = coord(j, idx[j]);
        return x;
    }

    /// Row-major linear index.
    std::int64_t linear(const std::array<int, D>& idx) const {
        std::int64_t r = 0;
        for (int j = 0; j < D; ++j) r = r * n[j] + idx[j];
        return r;
    }

    /// Trapezoid quadrature weight for grid point `idx`.
    double quad_weight(const std::array<int, D>& idx) const {
        double w = 1.0;
        for (int j = 0; j < D; ++j) {
            const double wj = (idx[j] == 0 || idx[j] == n[j] - 1) ? 0.5 : 1.0;
            w *= wj * h[j];
        }
        return w;
    }

    bool operator==(const Grid& o) const { return lo == o.lo && hi == o.hi && n == o.n; }
};

} // namespace fgs
