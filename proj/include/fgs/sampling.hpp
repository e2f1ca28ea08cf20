#pragma once

#include <atomic>
#include <vector>

#include "fgs/core.hpp"
#include "fgs/initial_data.hpp"
#include "fgs/parallel.hpp"
#include "fgs/ray_dynamics.hpp"
#include "fgs/rng.hpp"

namespace fgs {

enum class DensityKind { gaussian_data, wkb_gaussian_amplitude, wkb_inverse_transform };

/// Sampling density pi(q, p) with its closed-form evaluator and normalization
/// constant Z. One spec serves both wave branches (pi_+ = pi_-).
template <int D> struct DensitySpec {
    DensityKind kind;
    double k;
    double normalization;  // Z
    std::variant<GaussianInitialData<D>, WKBInitialData<D>> source;

    double operator()(const PhasePoint<D>& z) const {
        if (kind == DensityKind::gaussian_data) {
            const auto& g = std::get<GaussianInitialData<D>>(source);
            double pref = std::pow(2.0 * pi, -D) * std::pow(k, D);
            double e = 0.0;
            for (int j = 0; j < D; ++j) {
                const double aj = g.widths[j];
                const double dq = g.center[j] - z.q[j];
                const double dp = g.momentum[j] - z.p[j];
                pref *= std::sqrt(aj) / (1.0 + aj);
                e += k * (dp * dp + aj * dq * dq) / (2.0 * (1.0 + aj));
            }
            return pref * std::exp(-e);
        }
        const auto& w = std::get<WKBInitialData<D>>(source);
        Vec<D> y;
        if (const auto* qp = std::get_if<QuadraticPhase<D>>(&w.phase)) {
            y = qp->inverse(z.p);
        } else {
            const auto& cp = std::get<CustomPhase<D>>(w.phase);
            if (cp.momentum_domain && !cp.momentum_domain(z.p)) return 0.0;
            y = cp.inverse_map(z.p);
        }
        Mat<D> hm = w.hessS(y);
        CMat<D> hc{};
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) hc[i][j] = hm[i][j];
        const double dh = std::abs(det<D>(hc).real());
        double e = 0.0;
        for (int j = 0; j < D; ++j) e += (y[j] - z.q[j]) * (y[j] - z.q[j]);
        const double pref = std::pow(2.0, D) * std::pow(pi, 0.5 * D) * std::pow(k, -0.5 * D);
        return pref * w.amp(y) * std::exp(-0.5 * k * e) / (dh * normalization);
    }
};

template <int D> struct SampleBatch {
    std::vector<PhasePoint<D>> points;
    std::vector<double> pi_values;  // cached pi(z0_j), all > 0
    DensityKind kind;
    double normalization;
    std::uint64_t seed;
    std::uint64_t rejections = 0;  // measure-zero |p| <= p_floor resamples

    std::size_t size() const { return points.size(); }
};

/// pi for Gaussian data (a diagonal multivariate normal) and its Z.
template <int D>
inline DensitySpec<D> density_gaussian(const GaussianInitialData<D>& data) {
    DensitySpec<D> spec{DensityKind::gaussian_data, data.k, 0.0, data};
    double z = std::pow(2.0, 2.0 * D) * std::pow(pi, 1.25 * D) * std::pow(data.k, -1.25 * D);
    for (int j = 0; j < D; ++j)
        z *= std::sqrt((1.0 + data.widths[j]) / std::sqrt(data.widths[j]));
    spec.normalization = z;
    return spec;
}

/// pi for WKB data via the leading stationary-phase term. Assumptions:
/// grad S injective with smooth inverse T, det(hess S) bounded away from 0.
template <int D>
inline DensitySpec<D> density_wkb(const WKBInitialData<D>& data) {
    // Degenerate directions and sign changes violate Assumption 3.
    if (const auto* qp = std::get_if<QuadraticPhase<D>>(&data.phase)) {
        for (int j = 0; j < D; ++j)
            if (qp->coeff[j] == 0.0)
                throw AssumptionViolated("quadratic phase has a flat direction (zero Hessian)");
    } else {
        const auto& cp = std::get<CustomPhase<D>>(data.phase);
        if (!cp.inverse_map)
            throw AssumptionViolated("custom phase must supply the inverse map T");
        const Vec<D> ctr = data.support_center();
        int sign_seen = 0;
        constexpr int npts = 257;
        for (int i = 0; i < npts; ++i) {
            Vec<D> y = ctr;
            const double s = data.support_halfwidth(0);
            y[0] = ctr[0] - s + 2.0 * s * i / (npts - 1);
            Mat<D> hm = data.hessS(y);
            CMat<D> hc{};
            for (int a = 0; a < D; ++a)
                for (int b = 0; b < D; ++b) hc[a][b] = hm[a][b];
            const double dh = det<D>(hc).real();
            const int sgn = dh > 0 ? 1 : (dh < 0 ? -1 : 0);
            if (sgn == 0 || (sign_seen != 0 && sgn != sign_seen))
                throw AssumptionViolated("det(hess S) changes sign on the support");
            sign_seen = sgn;
        }
    }

    const bool hierarchical = std::holds_alternative<GaussianAmplitude<D>>(data.amplitude);
    DensitySpec<D> spec{hierarchical ? DensityKind::wkb_gaussian_amplitude
                                     : DensityKind::wkb_inverse_transform,
                        data.k, 0.0, data};
    if (hierarchical) {
        const auto& ga = std::get<GaussianAmplitude<D>>(data.amplitude);
        double z = std::pow(2.0, 2.0 * D) * std::pow(pi, 1.25 * D) * std::pow(data.k, -double(D));
        for (int j = 0; j < D; ++j) z *= std::pow(1.0 / ga.widths[j], 0.25);
        spec.normalization = z;
    } else {
        // Z = 2^{3d/2} pi^d k^{-d} * int a_in dy (change of variables p -> y).
        double amp_integral;
        if constexpr (D == 1) {
            const Vec<D> ctr = data.support_center();
            const double s = data.support_halfwidth(0);
            amp_integral = detail::simpson([&](double y) { return data.amp(Vec<1>{y}); },
                                           ctr[0] - s, ctr[0] + s, 8000);
        } else {
            throw UnsupportedForm("non-Gaussian WKB amplitudes are supported in d = 1 only");
        }
        spec.normalization = std::pow(2.0, 1.5 * D) * std::pow(pi, double(D)) *
                             std::pow(data.k, -double(D)) * amp_integral;
    }
    return spec;
}

/// M i.i.d. draws from the Gaussian-data density; per-axis univariate normals
/// (the covariance is diagonal). Deterministic given (seed, M), independent of
/// thread count: sample j uses its own counter-based stream.
template <int D>
inline SampleBatch<D> sample_gaussian(const DensitySpec<D>& spec, std::size_t M,
                                      std::uint64_t seed) {
    if (M < 1) throw ConfigError("sample_gaussian: M >= 1 required");
    const auto& g = std::get<GaussianInitialData<D>>(spec.source);
    SampleBatch<D> batch;
    batch.kind = spec.kind;
    batch.normalization = spec.normalization;
    batch.seed = seed;
    batch.points.resize(M);
    batch.pi_values.resize(M);
    std::atomic<std::uint64_t> rejections{0};

    Vec<D> sq, sp;
    for (int j = 0; j < D; ++j) {
        sq[j] = std::sqrt((1.0 + g.widths[j]) / (g.widths[j] * spec.k));
        sp[j] = std::sqrt((1.0 + g.widths[j]) / spec.k);
    }

    parallel_for(static_cast<std::int64_t>(M), [&](std::int64_t i) {
        SampleRng rng(seed, static_cast<std::uint64_t>(i));
        PhasePoint<D> z;
        for (;;) {
            for (int j = 0; j < D; ++j) z.q[j] = rng.normal(g.center[j], sq[j]);
            for (int j = 0; j < D; ++j) z.p[j] = rng.normal(g.momentum[j], sp[j]);
            if (norm<D>(z.p) > p_floor) break;
            rejections.fetch_add(1, std::memory_order_relaxed);
        }
        batch.points[i] = z;
        batch.pi_values[i] = spec(z);
    });
    batch.rejections = rejections.load();
    return batch;
}

/// Two-stage hierarchical sampler for WKB data with Gaussian amplitude:
///   q ~ N(x~, 1/k + 1/a_j);  y | q ~ N((a_j x~_j + k q_j)/(a_j + k), 1/(a_j + k));
///   p = grad S(y).
template <int D>
inline SampleBatch<D> sample_wkb_gaussian_amplitude(const DensitySpec<D>& spec, std::size_t M,
                                                    std::uint64_t seed) {
    if (M < 1) throw ConfigError("sample_wkb_gaussian_amplitude: M >= 1 required");
    const auto& w = std::get<WKBInitialData<D>>(spec.source);
    const auto& ga = std::get<GaussianAmplitude<D>>(w.amplitude);
    SampleBatch<D> batch;
    batch.kind = spec.kind;
    batch.normalization = spec.normalization;
    batch.seed = seed;
    batch.points.resize(M);
    batch.pi_values.resize(M);
    std::atomic<std::uint64_t> rejections{0};

    const double k = spec.k;
    Vec<D> s1, s2;
    for (int j = 0; j < D; ++j) {
        s1[j] = std::sqrt(1.0 / k + 1.0 / ga.widths[j]);
        s2[j] = std::sqrt(1.0 / (ga.widths[j] + k));
    }

    parallel_for(static_cast<std::int64_t>(M), [&](std::int64_t i) {
        SampleRng rng(seed, static_cast<std::uint64_t>(i));
        PhasePoint<D> z;
        for (;;) {
            Vec<D> y;
            for (int j = 0; j < D; ++j) z.q[j] = rng.normal(ga.center[j], s1[j]);
            for (int j = 0; j < D; ++j) {
                const double mu2 = (ga.widths[j] * ga.center[j] + k * z.q[j]) / (ga.widths[j] + k);
                y[j] = rng.normal(mu2, s2[j]);
            }
            z.p = w.gradS(y);
            if (norm<D>(z.p) > p_floor) break;
            rejections.fetch_add(1, std::memory_order_relaxed);
        }
        batch.points[i] = z;
        batch.pi_values[i] = spec(z);
    });
    batch.rejections = rejections.load();
    return batch;
}

namespace detail {

/// Tabulated CDF on a uniform grid with inverse by binary search + linear
/// interpolation. Density values are taken at the grid nodes.
class CdfTable {
public:
    CdfTable(std::vector<double> density, double lo, double hi)
        : lo_(lo), h_((hi - lo) / (density.size() - 1)) {
        cum_.resize(density.size());
        double acc = 0.0;
        cum_[0] = 0.0;
        for (std::size_t i = 1; i < density.size(); ++i) {
            const double inc = 0.5 * h_ * (density[i - 1] + density[i]);
            if (inc < 0.0) throw CDFNotMonotone("negative density increment in CDF table");
            acc += inc;
            cum_[i] = acc;
        }
        if (!(acc > 0.0) || !std::isfinite(acc))
            throw CDFNotMonotone("CDF table has no mass; increase the grid size");
        for (auto& c : cum_) c /= acc;
    }

    double invert(double u) const {
        // first index with cum >= u
        std::size_t lo = 0, hi = cum_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (cum_[mid] < u ? lo : hi) = mid;
        }
        const double c0 = cum_[lo], c1 = cum_[hi];
        const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
        return lo_ + h_ * (lo + frac);
    }

private:
    std::vector<double> cum_;
    double lo_, h_;
};

} // namespace detail

/// Inverse-transform sampler for 1D WKB data (non-Gaussian amplitudes):
/// tabulate the marginal CDF of Q on a uniform grid, invert a uniform draw,
/// then tabulate and invert the conditional CDF of Y given q; p = grad S(y).
inline SampleBatch<1> sample_wkb_inverse_transform(const WKBInitialData<1>& data, std::size_t M,
                                                   std::uint64_t seed, int cdf_grid_size = 4096) {
    if (M < 1) throw ConfigError("sample_wkb_inverse_transform: M >= 1 required");
    if (cdf_grid_size < 16) throw ConfigError("cdf_grid_size too small");
    const DensitySpec<1> spec = density_wkb<1>(data);
    const double k = data.k;
    const double win = 8.0 / std::sqrt(k);
    const Vec<1> ctr = data.support_center();
    const double sup = data.support_halfwidth(0);

    // Marginal pi_Q(q) ~ int a_in(y) exp(-(k/2)(y-q)^2) dy, tabulated once.
    const double qlo = ctr[0] - sup - win, qhi = ctr[0] + sup + win;
    std::vector<double> marginal(cdf_grid_size);
    const double hq = (qhi - qlo) / (cdf_grid_size - 1);
    parallel_for(cdf_grid_size, [&](std::int64_t i) {
        const double q = qlo + i * hq;
        marginal[i] = detail::simpson([&](double y) {
            return data.amp(Vec<1>{y}) * std::exp(-0.5 * k * (y - q) * (y - q));
        }, q - win, q + win, 512);
    });
    const detail::CdfTable f_q(std::move(marginal), qlo, qhi);

    SampleBatch<1> batch;
    batch.kind = DensityKind::wkb_inverse_transform;
    batch.normalization = spec.normalization;
    batch.seed = seed;
    batch.points.resize(M);
    batch.pi_values.resize(M);
    std::atomic<std::uint64_t> rejections{0};

    parallel_for(static_cast<std::int64_t>(M), [&](std::int64_t i) {
        SampleRng rng(seed, static_cast<std::uint64_t>(i));
        PhasePoint<1> z;
        for (;;) {
            z.q[0] = f_q.invert(rng.uniform());
            // conditional of Y given q over the union of the window and support
            const double ylo = std::min(z.q[0] - win, ctr[0] - sup);
            const double yhi = std::max(z.q[0] + win, ctr[0] + sup);
            std::vector<double> cond(cdf_grid_size);
            const double hy = (yhi - ylo) / (cdf_grid_size - 1);
            for (int m = 0; m < cdf_grid_size; ++m) {
                const double y = ylo + m * hy;
                cond[m] = data.amp(Vec<1>{y}) * std::exp(-0.5 * k * (y - z.q[0]) * (y - z.q[0]));
            }
            const detail::CdfTable f_y(std::move(cond), ylo, yhi);
            const double y = f_y.invert(rng.uniform());
            z.p = data.gradS(Vec<1>{y});
            if (norm<1>(z.p) > p_floor) break;
            rejections.fetch_add(1, std::memory_order_relaxed);
        }
        batch.points[i] = z;
        batch.pi_values[i] = spec(z);
    });
    batch.rejections = rejections.load();
    return batch;
}

/// Draw a batch with the sampler matching the data class.
template <int D>
inline SampleBatch<D> draw_batch(const InitialData<D>& data, std::size_t M, std::uint64_t seed,
                                 int cdf_grid_size = 4096) {
    if (const auto* g = std::get_if<GaussianInitialData<D>>(&data))
        return sample_gaussian<D>(density_gaussian<D>(*g), M, seed);
    if (const auto* w = std::get_if<WKBInitialData<D>>(&data)) {
        if (std::holds_alternative<GaussianAmplitude<D>>(w->amplitude))
            return sample_wkb_gaussian_amplitude<D>(density_wkb<D>(*w), M, seed);
        if constexpr (D == 1)
            return sample_wkb_inverse_transform(*w, M, seed, cdf_grid_size);
        else
            throw UnsupportedForm("inverse-transform sampling is 1D only");
    }
    throw UnsupportedForm("no sampling density for custom (f0, f1) data");
}

} // namespace fgs
