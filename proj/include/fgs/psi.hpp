#pragma once

#include "fgs/core.hpp"
#include "fgs/initial_data.hpp"
#include "fgs/ray_dynamics.hpp"

namespace fgs {

enum class PsiProvenance { closed_form, quadrature };

/// Window transform of the initial data at one phase-space point, both branches.
/// For f0 = 0 data, psi_minus = -psi_plus exactly.
struct PsiValue {
    cplx plus{};
    cplx minus{};
    PsiProvenance provenance = PsiProvenance::closed_form;
};

/// Closed form of the Gaussian-data window transform:
///   psi_± = ±(i/2)/(c(q)|p|) 2^{d/2} pi^{d/4} k^{-d/4}
///           prod_j (sqrt(a_j)/(1+a_j))^{1/2}
///           exp(-k[(p~_j-p_j)^2 + a_j(q~_j-q_j)^2]/(2(1+a_j)))
///           exp(i k [(a_j q~_j + q_j)(p~_j-p_j)/(1+a_j) + p_j q_j - p~_j q~_j])
template <int D>
inline PsiValue psi_gaussian(const GaussianInitialData<D>& data, const VelocityField<D>& field,
                             const PhasePoint<D>& z0) {
    const double pn = norm<D>(z0.p);
    if (pn <= p_floor) throw MomentumUnderflow("psi_gaussian: |p| at the momentum floor");
    const double k = data.k;

    double amp = std::pow(2.0, 0.5 * D) * std::pow(pi, 0.25 * D) * std::pow(k, -0.25 * D);
    double decay = 0.0, phase = 0.0;
    for (int j = 0; j < D; ++j) {
        const double aj = data.widths[j];
        const double dq = data.center[j] - z0.q[j];
        const double dp = data.momentum[j] - z0.p[j];
        amp *= std::sqrt(std::sqrt(aj) / (1.0 + aj));
        decay += k * (dp * dp + aj * dq * dq) / (2.0 * (1.0 + aj));
        phase += k * (aj * data.center[j] + z0.q[j]) * dp / (1.0 + aj) +
                 k * (z0.p[j] * z0.q[j] - data.momentum[j] * data.center[j]);
    }
    const cplx pref = 0.5 * iu / (field(z0.q) * pn);
    const cplx val = pref * amp * std::exp(cplx(-decay, phase));
    return {val, -val, PsiProvenance::closed_form};
}

namespace detail {

/// G(alpha, beta) = int exp(-alpha y^2 + beta y) dy, Re(alpha) > 0.
inline cplx gauss_integral(const cplx& alpha, const cplx& beta) {
    return std::sqrt(pi / alpha) * std::exp(beta * beta / (4.0 * alpha));
}

} // namespace detail

/// Closed form of the WKB window transform for quadratic phases with a
/// Gaussian or (1D) y^2-weighted Gaussian amplitude: the complex quadratic
/// exponent factorizes per axis and each axis is a d=1 Gaussian integral.
/// Throws UnsupportedForm otherwise (use psi_quadrature).
template <int D>
inline PsiValue psi_wkb_closed(const WKBInitialData<D>& data, const VelocityField<D>& field,
                               const PhasePoint<D>& z0) {
    const double pn = norm<D>(z0.p);
    if (pn <= p_floor) throw MomentumUnderflow("psi_wkb_closed: |p| at the momentum floor");
    const auto* qp = std::get_if<QuadraticPhase<D>>(&data.phase);
    if (!qp) throw UnsupportedForm("psi_wkb_closed needs a quadratic phase");
    const double k = data.k;

    cplx integral;
    if (const auto* ga = std::get_if<GaussianAmplitude<D>>(&data.amplitude)) {
        integral = std::pow(pi, -0.25 * D);
        for (int j = 0; j < D; ++j) {
            const double aj = ga->widths[j], xj = ga->center[j];
            const double sj = qp->center[j], gj = qp->coeff[j];
            const cplx alpha = cplx(0.5 * (aj + k), -k * gj);
            const cplx beta = cplx(aj * xj + k * z0.q[j], -k * (2.0 * gj * sj + z0.p[j]));
            const cplx delta = cplx(-0.5 * aj * xj * xj - 0.5 * k * z0.q[j] * z0.q[j],
                                    k * (gj * sj * sj + z0.p[j] * z0.q[j]));
            integral *= std::pow(aj, 0.25) * detail::gauss_integral(alpha, beta) * std::exp(delta);
        }
    } else if (const auto* pa = std::get_if<PolyGaussianAmplitude>(&data.amplitude)) {
        static_assert(D >= 1);
        if constexpr (D != 1) {
            throw UnsupportedForm("polynomial-Gaussian amplitude is 1D only");
        } else {
            const double w = pa->width, m = pa->center;
            const double sj = qp->center[0], gj = qp->coeff[0];
            const cplx alpha = cplx(0.5 * (w + k), -k * gj);
            const cplx beta = cplx(w * m + k * z0.q[0], -k * (2.0 * gj * sj + z0.p[0]));
            const cplx delta = cplx(-0.5 * w * m * m - 0.5 * k * z0.q[0] * z0.q[0],
                                    k * (gj * sj * sj + z0.p[0] * z0.q[0]));
            const cplx mu = beta / (2.0 * alpha);
            // int (y-m)^2 e^{-alpha y^2 + beta y} dy = G(alpha,beta) [((mu-m))^2 + 1/(2 alpha)]
            integral = pa->norm_const() * detail::gauss_integral(alpha, beta) * std::exp(delta) *
                       ((mu - m) * (mu - m) + 1.0 / (2.0 * alpha));
        }
    } else {
        throw UnsupportedForm("psi_wkb_closed needs a Gaussian or polynomial-Gaussian amplitude");
    }
    integral *= std::exp(iu * (k * qp->offset));

    const cplx val = 0.5 * iu / (field(z0.q) * pn) * integral;
    return {val, -val, PsiProvenance::closed_form};
}

/// Oracle pathway: adaptive tensor-product trapezoid quadrature of the window
/// integral over [q_j - 8/sqrt(k), q_j + 8/sqrt(k)] per axis, with node
/// doubling until successive levels differ by < tol (relative). Supports
/// general (f0, f1) data; total node budget 2^20.
template <int D>
inline PsiValue psi_quadrature(const InitialData<D>& data, const VelocityField<D>& field,
                               const PhasePoint<D>& z0, double tol = 1e-9) {
    const double pn = norm<D>(z0.p);
    if (pn <= p_floor) throw MomentumUnderflow("psi_quadrature: |p| at the momentum floor");
    const double k = wave_number<D>(data);
    const double radius = 8.0 / std::sqrt(k);
    const double cq = field(z0.q);

    const bool has_f0 = std::holds_alternative<CustomInitialData<D>>(data) &&
                        static_cast<bool>(std::get<CustomInitialData<D>>(data).f0);

    auto level_value = [&](int n_axis, cplx& i0, cplx& i1) {
        // Tensor trapezoid with n_axis points per axis (endpoints included).
        std::array<int, D> idx{};
        std::int64_t total = 1;
        for (int j = 0; j < D; ++j) total *= n_axis;
        const double h = 2.0 * radius / (n_axis - 1);
        i0 = i1 = 0.0;
        for (std::int64_t lin = 0; lin < total; ++lin) {
            std::int64_t r = lin;
            double wq = 1.0;
            Vec<D> y{};
            for (int j = D - 1; j >= 0; --j) {
                idx[j] = static_cast<int>(r % n_axis);
                r /= n_axis;
            }
            double expo = 0.0, phs = 0.0;
            for (int j = 0; j < D; ++j) {
                y[j] = z0.q[j] - radius + idx[j] * h;
                wq *= (idx[j] == 0 || idx[j] == n_axis - 1) ? 0.5 * h : h;
                const double dy = y[j] - z0.q[j];
                expo += 0.5 * k * dy * dy;
                phs += k * z0.p[j] * dy;
            }
            const cplx window = std::exp(cplx(-expo, -phs));
            i1 += wq * eval_f1<D>(data, y) * window;
            if (has_f0) i0 += wq * eval_f0<D>(data, y) * window;
        }
    };

    cplx i0 = 0.0, i1 = 0.0, i0_prev = 0.0, i1_prev = 0.0;
    bool have_prev = false;
    constexpr std::int64_t budget = std::int64_t(1) << 20;
    for (int n_axis = 65;; n_axis = 2 * n_axis - 1) {
        std::int64_t total = 1;
        for (int j = 0; j < D; ++j) total *= n_axis;
        if (total > budget)
            throw NoConvergence("psi_quadrature node budget exhausted; use the closed form");
        level_value(n_axis, i0, i1);
        if (have_prev) {
            const double d1 = std::abs(i1 - i1_prev);
            const double d0 = std::abs(i0 - i0_prev);
            if (d1 <= tol * std::max(std::abs(i1), 1e-30) &&
                d0 <= tol * std::max(std::abs(i0), 1e-30))
                break;
        }
        i0_prev = i0;
        i1_prev = i1;
        have_prev = true;
    }

    const cplx branch_term = 0.5 * iu / (k * cq * pn) * i1;
    return {0.5 * i0 + branch_term, 0.5 * i0 - branch_term, PsiProvenance::quadrature};
}

/// Dispatch: closed form where the data admits one, quadrature otherwise.
template <int D>
inline PsiValue window_transform(const InitialData<D>& data, const VelocityField<D>& field,
                                 const PhasePoint<D>& z0, double quad_tol = 1e-9) {
    if (const auto* g = std::get_if<GaussianInitialData<D>>(&data))
        return psi_gaussian<D>(*g, field, z0);
    if (const auto* w = std::get_if<WKBInitialData<D>>(&data)) {
        try {
            return psi_wkb_closed<D>(*w, field, z0);
        } catch (const UnsupportedForm&) {
            // fall through to quadrature
        }
    }
    return psi_quadrature<D>(data, field, z0, quad_tol);
}

} // namespace fgs
