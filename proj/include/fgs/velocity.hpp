#pragma once

#include <functional>
#include <string>

#include "fgs/core.hpp"

namespace fgs {

enum class VelocityKind { constant, sine_sum, custom };

/// Wave speed c(x) with analytic gradient and Hessian.
///
/// Built-in fields are evaluated in closed form. Custom fields supply c(x)
/// and optionally grad/hess closures; missing derivatives fall back to
/// central finite differences with step 1e-5 (documented accuracy loss).
template <int D> class VelocityField {
public:
    static VelocityField constant(double c0) {
        if (c0 <= 0.0) throw NonPositiveVelocity("constant velocity must be positive");
        VelocityField f;
        f.kind_ = VelocityKind::constant;
        f.base_ = c0;
        f.c_inf_ = c0;
        return f;
    }

    /// c(x) = base + amp * sin(sum_j x_j)
    static VelocityField sine_sum(double base, double amp) {
        if (base - std::abs(amp) <= 0.0)
            throw NonPositiveVelocity("sine_sum field requires base > |amp|");
        VelocityField f;
        f.kind_ = VelocityKind::sine_sum;
        f.base_ = base;
        f.amp_ = amp;
        f.c_inf_ = base - std::abs(amp);
        return f;
    }

    using Scalar = std::function<double(const Vec<D>&)>;
    using Gradient = std::function<Vec<D>(const Vec<D>&)>;
    using Hessian = std::function<Mat<D>(const Vec<D>&)>;

    static VelocityField custom(Scalar c, double c_inf,
                                Gradient grad = nullptr, Hessian hess = nullptr) {
        if (c_inf <= 0.0) throw NonPositiveVelocity("custom field needs c_inf > 0");
        VelocityField f;
        f.kind_ = VelocityKind::custom;
        f.c_inf_ = c_inf;
        f.custom_c_ = std::move(c);
        f.custom_grad_ = std::move(grad);
        f.custom_hess_ = std::move(hess);
        return f;
    }

    VelocityKind kind() const { return kind_; }
    double c_inf() const { return c_inf_; }
    double base() const { return base_; }
    double amp() const { return amp_; }

    double operator()(const Vec<D>& x) const {
        double c;
        switch (kind_) {
            case VelocityKind::constant: c = base_; break;
            case VelocityKind::sine_sum: {
                double s = 0.0;
                for (int j = 0; j < D; ++j) s += x[j];
                c = base_ + amp_ * std::sin(s);
                break;
            }
            default: c = custom_c_(x);
        }
        if (c < c_inf_ * (1.0 - 1e-12) || c <= 0.0)
            throw NonPositiveVelocity("c(x) fell below the declared infimum");
        return c;
    }

    void eval(const Vec<D>& x, double& c, Vec<D>& grad, Mat<D>& hess) const {
        switch (kind_) {
            case VelocityKind::constant:
                c = base_;
                grad = zero_vec<D>();
                hess = zero_mat<D>();
                return;
            case VelocityKind::sine_sum: {
                double s = 0.0;
                for (int j = 0; j < D; ++j) s += x[j];
                const double sn = std::sin(s), cs = std::cos(s);
                c = base_ + amp_ * sn;
                for (int j = 0; j < D; ++j) grad[j] = amp_ * cs;
                for (int i = 0; i < D; ++i)
                    for (int j = 0; j < D; ++j) hess[i][j] = -amp_ * sn;
                return;
            }
            default: {
                c = (*this)(x);
                grad = custom_grad_ ? custom_grad_(x) : fd_grad(x);
                hess = custom_hess_ ? custom_hess_(x) : fd_hess(x);
                return;
            }
        }
    }

    /// Gradient only (no Hessian), for the first-order Hamiltonian terms.
    void eval_c_grad(const Vec<D>& x, double& c, Vec<D>& grad) const {
        switch (kind_) {
            case VelocityKind::constant:
                c = base_;
                grad = zero_vec<D>();
                return;
            case VelocityKind::sine_sum: {
                double s = 0.0;
                for (int j = 0; j < D; ++j) s += x[j];
                c = base_ + amp_ * std::sin(s);
                const double cs = std::cos(s);
                for (int j = 0; j < D; ++j) grad[j] = amp_ * cs;
                return;
            }
            default:
                c = (*this)(x);
                grad = custom_grad_ ? custom_grad_(x) : fd_grad(x);
                return;
        }
    }

private:
    static constexpr double fd_step = 1e-5;

    Vec<D> fd_grad(const Vec<D>& x) const {
        Vec<D> g{};
        Vec<D> xp = x, xm = x;
        for (int j = 0; j < D; ++j) {
            xp[j] = x[j] + fd_step;
            xm[j] = x[j] - fd_step;
            g[j] = (custom_c_(xp) - custom_c_(xm)) / (2.0 * fd_step);
            xp[j] = x[j];
            xm[j] = x[j];
        }
        return g;
    }

    Mat<D> fd_hess(const Vec<D>& x) const {
        Mat<D> h{};
        const double f0 = custom_c_(x);
        Vec<D> y = x;
        for (int i = 0; i < D; ++i) {
            y[i] = x[i] + fd_step;
            const double fp = custom_c_(y);
            y[i] = x[i] - fd_step;
            const double fm = custom_c_(y);
            y[i] = x[i];
            h[i][i] = (fp - 2.0 * f0 + fm) / (fd_step * fd_step);
            for (int j = i + 1; j < D; ++j) {
                y[i] = x[i] + fd_step; y[j] = x[j] + fd_step;
                const double fpp = custom_c_(y);
                y[j] = x[j] - fd_step;
                const double fpm = custom_c_(y);
                y[i] = x[i] - fd_step; y[j] = x[j] + fd_step;
                const double fmp = custom_c_(y);
                y[j] = x[j] - fd_step;
                const double fmm = custom_c_(y);
                y[i] = x[i]; y[j] = x[j];
                h[i][j] = h[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * fd_step * fd_step);
            }
        }
        return h;
    }

    VelocityKind kind_ = VelocityKind::constant;
    double base_ = 1.0;
    double amp_ = 0.0;
    double c_inf_ = 1.0;
    Scalar custom_c_;
    Gradient custom_grad_;
    Hessian custom_hess_;
};

/// Spec'd operation form: returns (c, grad, hess) as a tuple-like struct.
template <int D> struct VelocityEval {
    double c;
    Vec<D> grad;
    Mat<D> hess;
};

template <int D>
inline VelocityEval<D> eval_velocity(const VelocityField<D>& field, const Vec<D>& x) {
    VelocityEval<D> out;
    field.eval(x, out.c, out.grad, out.hess);
    return out;
}

} // namespace fgs
