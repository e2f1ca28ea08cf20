#pragma once

#include <functional>
#include <variant>

#include "fgs/core.hpp"
#include "fgs/velocity.hpp"

namespace fgs {

/// Gaussian wave packet data (f0 = 0):
///   f1(x) = k (prod a_j)^{1/4} (pi/k)^{-d/4}
///           exp(i k p~.(x - q~)) exp(-(k/2) sum_j a_j (x_j - q~_j)^2)
/// normalized so that int |f1/k|^2 dx = 1.
template <int D> struct GaussianInitialData {
    double k;
    Vec<D> center;    // q~
    Vec<D> momentum;  // p~, nonzero
    Vec<D> widths;    // a_j > 0

    cplx f1(const Vec<D>& x) const {
        double amp = 1.0, decay = 0.0, phase = 0.0;
        for (int j = 0; j < D; ++j) {
            amp *= std::pow(widths[j], 0.25);
            decay += widths[j] * (x[j] - center[j]) * (x[j] - center[j]);
            phase += momentum[j] * (x[j] - center[j]);
        }
        amp *= std::pow(pi / k, -0.25 * D);
        return k * amp * std::exp(cplx(-0.5 * k * decay, k * phase));
    }
};

/// a_in(x) = (prod a_j)^{1/4} pi^{-d/4} exp(-(1/2) sum a_j (x_j - x~_j)^2)
template <int D> struct GaussianAmplitude {
    Vec<D> widths;  // a_j
    Vec<D> center;  // x~

    double operator()(const Vec<D>& x) const {
        double amp = 1.0, e = 0.0;
        for (int j = 0; j < D; ++j) {
            amp *= std::pow(widths[j], 0.25);
            e += widths[j] * (x[j] - center[j]) * (x[j] - center[j]);
        }
        return amp * std::pow(pi, -0.25 * D) * std::exp(-0.5 * e);
    }

    double support_halfwidth(int axis) const { return 6.0 / std::sqrt(widths[axis]); }
};

/// 1D non-Gaussian amplitude a_in(y) = C y^2 exp(-(w/2) y^2), C fixed by
/// int a_in^2 = 1:  C = (2w/sqrt(3)) (w/pi)^{1/4}.
struct PolyGaussianAmplitude {
    double width;       // w
    double center = 0.0;

    double norm_const() const {
        return 2.0 * width / std::sqrt(3.0) * std::pow(width / pi, 0.25);
    }

    double operator()(const Vec<1>& x) const {
        const double y = x[0] - center;
        return norm_const() * y * y * std::exp(-0.5 * width * y * y);
    }

    double support_halfwidth(int) const { return 8.0 / std::sqrt(width); }
};

template <int D> struct CustomAmplitude {
    std::function<double(const Vec<D>&)> f;
    Vec<D> support_center{};
    Vec<D> support_half{};  // per-axis half-width of the effective support

    double operator()(const Vec<D>& x) const { return f(x); }
    double support_halfwidth(int axis) const { return support_half[axis]; }
};

template <int D>
using Amplitude = std::variant<GaussianAmplitude<D>, PolyGaussianAmplitude, CustomAmplitude<D>>;

/// S(y) = sum_j sigma_j (y_j - s_j)^2 + gamma. grad S = 2 sigma (y - s),
/// hess = diag(2 sigma), inverse map T(p)_j = s_j + p_j / (2 sigma_j) on all of R^d.
template <int D> struct QuadraticPhase {
    Vec<D> coeff;   // sigma_j, nonzero
    Vec<D> center;  // s
    double offset = 0.0;

    double operator()(const Vec<D>& y) const {
        double v = offset;
        for (int j = 0; j < D; ++j) v += coeff[j] * (y[j] - center[j]) * (y[j] - center[j]);
        return v;
    }
    Vec<D> grad(const Vec<D>& y) const {
        Vec<D> g{};
        for (int j = 0; j < D; ++j) g[j] = 2.0 * coeff[j] * (y[j] - center[j]);
        return g;
    }
    Mat<D> hess(const Vec<D>&) const {
        Mat<D> h{};
        for (int j = 0; j < D; ++j) h[j][j] = 2.0 * coeff[j];
        return h;
    }
    Vec<D> inverse(const Vec<D>& p) const {
        Vec<D> y{};
        for (int j = 0; j < D; ++j) y[j] = center[j] + p[j] / (2.0 * coeff[j]);
        return y;
    }
};

/// User phase: closures for S, grad S, hess S, and (optionally) the inverse
/// map T of grad S together with an indicator of its domain D(T).
template <int D> struct CustomPhase {
    std::function<double(const Vec<D>&)> S;
    std::function<Vec<D>(const Vec<D>&)> gradS;
    std::function<Mat<D>(const Vec<D>&)> hessS;
    std::function<Vec<D>(const Vec<D>&)> inverse_map;           // may be null
    std::function<bool(const Vec<D>&)> momentum_domain;         // may be null (= all of R^d)
};

template <int D> using Phase = std::variant<QuadraticPhase<D>, CustomPhase<D>>;

/// WKB data (f0 = 0):  f1(x) = k a_in(x) exp(i k S_in(x)).
template <int D> struct WKBInitialData {
    double k;
    Amplitude<D> amplitude;
    Phase<D> phase;

    double amp(const Vec<D>& x) const {
        return std::visit([&](const auto& a) { return a(x); }, amplitude);
    }
    double S(const Vec<D>& y) const {
        return std::visit([&](const auto& ph) -> double {
            if constexpr (requires { ph(y); }) return ph(y);
            else return ph.S(y);
        }, phase);
    }
    Vec<D> gradS(const Vec<D>& y) const {
        return std::visit([&](const auto& ph) -> Vec<D> {
            if constexpr (requires { ph.grad(y); }) return ph.grad(y);
            else return ph.gradS(y);
        }, phase);
    }
    Mat<D> hessS(const Vec<D>& y) const {
        return std::visit([&](const auto& ph) -> Mat<D> {
            if constexpr (requires { ph.hess(y); }) return ph.hess(y);
            else return ph.hessS(y);
        }, phase);
    }

    double support_halfwidth(int axis) const {
        return std::visit([&](const auto& a) { return a.support_halfwidth(axis); }, amplitude);
    }
    Vec<D> support_center() const {
        return std::visit([&](const auto& a) -> Vec<D> {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, GaussianAmplitude<D>>) return a.center;
            else if constexpr (std::is_same_v<A, PolyGaussianAmplitude>) return Vec<D>{a.center};
            else return a.support_center;
        }, amplitude);
    }

    cplx f1(const Vec<D>& x) const {
        return k * amp(x) * std::exp(iu * (k * S(x)));
    }
};

/// General data with both f0 and f1 evaluators; only the quadrature pathway
/// of the window transform supports it (all built-in paper data has f0 = 0).
template <int D> struct CustomInitialData {
    double k;
    std::function<cplx(const Vec<D>&)> f0;  // may be null (= 0)
    std::function<cplx(const Vec<D>&)> f1;  // may be null (= 0)
};

template <int D>
using InitialData = std::variant<GaussianInitialData<D>, WKBInitialData<D>, CustomInitialData<D>>;

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
    double normalization_residual = 0.0;
    bool injectivity_checked = false;
    bool injective = true;
};

namespace detail {

/// Composite Simpson on [a, b] with n (even) intervals.
template <typename F> inline double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace detail

/// Quadrature-verify normalization; for WKB also scan det(hess S) for sign
/// changes over the amplitude's effective support (6 sigma per axis).
/// Throws NotNormalized (residual > 1e-4) or NonInjectivePhase.
template <int D>
inline ValidationReport validate_initial_data(const GaussianInitialData<D>& data) {
    // |f1/k|^2 is a separable Gaussian; integrate axis by axis.
    double integral = 1.0;
    for (int j = 0; j < D; ++j) {
        const double aj = data.widths[j], qj = data.center[j];
        const double s = 6.0 / std::sqrt(2.0 * data.k * aj);
        const double pref = std::sqrt(aj) * std::sqrt(data.k / pi);
        integral *= detail::simpson([&](double x) {
            return pref * std::exp(-data.k * aj * (x - qj) * (x - qj));
        }, qj - s, qj + s, 2000);
    }
    ValidationReport rep;
    rep.normalization_residual = std::abs(integral - 1.0);
    if (rep.normalization_residual > 1e-4)
        throw NotNormalized("Gaussian data normalization residual " +
                            std::to_string(rep.normalization_residual));
    return rep;
}

template <int D>
inline ValidationReport validate_initial_data(const WKBInitialData<D>& data) {
    ValidationReport rep;
    // int a_in^2 = 1 over the effective support.
    const Vec<D> ctr = data.support_center();
    if constexpr (D == 1) {
        const double s = data.support_halfwidth(0);
        const double integral = detail::simpson([&](double x) {
            const double a = data.amp(Vec<1>{x});
            return a * a;
        }, ctr[0] - s, ctr[0] + s, 4000);
        rep.normalization_residual = std::abs(integral - 1.0);
    } else {
        // Built-in multi-d amplitudes are Gaussian (separable); validate per axis.
        if (const auto* g = std::get_if<GaussianAmplitude<D>>(&data.amplitude)) {
            double integral = 1.0;
            for (int j = 0; j < D; ++j) {
                const double aj = g->widths[j], xj = g->center[j];
                const double s = 6.0 / std::sqrt(aj);
                const double pref = std::sqrt(aj / pi);
                integral *= detail::simpson([&](double x) {
                    return pref * std::exp(-aj * (x - xj) * (x - xj));
                }, xj - s, xj + s, 2000);
            }
            rep.normalization_residual = std::abs(integral - 1.0);
        } else {
            throw UnsupportedForm("normalization check for non-separable amplitudes needs d = 1");
        }
    }
    if (rep.normalization_residual > 1e-4)
        throw NotNormalized("WKB amplitude normalization residual " +
                            std::to_string(rep.normalization_residual));

    // Injectivity of grad S on the support: sign of det(hess S) must not change.
    rep.injectivity_checked = true;
    if (const auto* qp = std::get_if<QuadraticPhase<D>>(&data.phase)) {
        for (int j = 0; j < D; ++j)
            if (qp->coeff[j] == 0.0) {
                rep.injective = false;
                throw NonInjectivePhase("quadratic phase has a zero coefficient");
            }
        return rep;
    }
    // Custom phase: scan a tensor grid over the support.
    constexpr int npts = 129;
    std::array<int, D> idx{};
    int sign_seen = 0;
    const std::int64_t total = [&] {
        std::int64_t t = 1;
        for (int j = 0; j < D; ++j) t *= npts;
        return t;
    }();
    for (std::int64_t lin = 0; lin < total; ++lin) {
        std::int64_t r = lin;
        Vec<D> y{};
        for (int j = D - 1; j >= 0; --j) {
            idx[j] = static_cast<int>(r % npts);
            r /= npts;
        }
        for (int j = 0; j < D; ++j) {
            const double s = data.support_halfwidth(j);
            y[j] = ctr[j] - s + 2.0 * s * idx[j] / (npts - 1);
        }
        Mat<D> hm = data.hessS(y);
        CMat<D> hc{};
        for (int i2 = 0; i2 < D; ++i2)
            for (int j2 = 0; j2 < D; ++j2) hc[i2][j2] = hm[i2][j2];
        const double dh = det<D>(hc).real();
        const int sgn = dh > 0 ? 1 : (dh < 0 ? -1 : 0);
        if (sgn == 0 || (sign_seen != 0 && sgn != sign_seen)) {
            rep.injective = false;
            throw NonInjectivePhase("det(hess S) changes sign on the amplitude support");
        }
        sign_seen = sgn;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Shared evaluation over the variant

template <int D> inline double wave_number(const InitialData<D>& data) {
    return std::visit([](const auto& d) { return d.k; }, data);
}

template <int D> inline cplx eval_f0(const InitialData<D>& data, const Vec<D>& x) {
    if (const auto* c = std::get_if<CustomInitialData<D>>(&data))
        return c->f0 ? c->f0(x) : cplx(0.0);
    (void)x;
    return cplx(0.0);
}

template <int D> inline cplx eval_f1(const InitialData<D>& data, const Vec<D>& x) {
    return std::visit([&](const auto& d) -> cplx {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CustomInitialData<D>>)
            return d.f1 ? d.f1(x) : cplx(0.0);
        else
            return d.f1(x);
    }, data);
}

} // namespace fgs
