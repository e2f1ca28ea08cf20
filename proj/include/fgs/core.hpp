#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "fgs/errors.hpp"

namespace fgs {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cplx iu{0.0, 1.0};

/// Momentum floor below which the Hamiltonian c(Q)|P| is treated as singular.
inline constexpr double p_floor = 1e-8;

template <int D> using Vec = std::array<double, D>;
template <int D> using CVec = std::array<cplx, D>;
template <int D> using Mat = std::array<std::array<double, D>, D>;
template <int D> using CMat = std::array<std::array<cplx, D>, D>;

template <int D> constexpr Vec<D> zero_vec() { return Vec<D>{}; }

template <int D> constexpr Mat<D> zero_mat() { return Mat<D>{}; }

template <int D> constexpr Mat<D> identity() {
    Mat<D> m{};
    for (int i = 0; i < D; ++i) m[i][i] = 1.0;
    return m;
}

template <int D> inline double dot(const Vec<D>& a, const Vec<D>& b) {
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += a[i] * b[i];
    return s;
}

template <int D> inline double norm2(const Vec<D>& a) { return dot(a, a); }
template <int D> inline double norm(const Vec<D>& a) { return std::sqrt(norm2(a)); }

template <int D> inline Vec<D> operator+(Vec<D> a, const Vec<D>& b) {
    for (int i = 0; i < D; ++i) a[i] += b[i];
    return a;
}

template <int D> inline Vec<D> operator-(Vec<D> a, const Vec<D>& b) {
    for (int i = 0; i < D; ++i) a[i] -= b[i];
    return a;
}

template <int D> inline Vec<D> operator*(double s, Vec<D> a) {
    for (int i = 0; i < D; ++i) a[i] *= s;
    return a;
}

/// m * v
template <int D> inline Vec<D> matvec(const Mat<D>& m, const Vec<D>& v) {
    Vec<D> r{};
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) r[i] += m[i][j] * v[j];
    return r;
}

/// a * b
template <int D> inline Mat<D> matmul(const Mat<D>& a, const Mat<D>& b) {
    Mat<D> r{};
    for (int i = 0; i < D; ++i)
        for (int l = 0; l < D; ++l) {
            const double ail = a[i][l];
            for (int j = 0; j < D; ++j) r[i][j] += ail * b[l][j];
        }
    return r;
}

/// u v^T
template <int D> inline Mat<D> outer(const Vec<D>& u, const Vec<D>& v) {
    Mat<D> r{};
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) r[i][j] = u[i] * v[j];
    return r;
}

template <int D> inline cplx det(const CMat<D>& m) {
    static_assert(D >= 1 && D <= 3);
    if constexpr (D == 1) {
        return m[0][0];
    } else if constexpr (D == 2) {
        return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    } else {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
}

/// Closed-form inverse for d <= 3; caller checks det against its own floor.
template <int D> inline CMat<D> inverse(const CMat<D>& m, const cplx& d) {
    static_assert(D >= 1 && D <= 3);
    CMat<D> r{};
    if constexpr (D == 1) {
        r[0][0] = 1.0 / d;
    } else if constexpr (D == 2) {
        r[0][0] = m[1][1] / d;
        r[0][1] = -m[0][1] / d;
        r[1][0] = -m[1][0] / d;
        r[1][1] = m[0][0] / d;
    } else {
        r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
        r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
        r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
        r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
        r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
        r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
        r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
        r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
        r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
    }
    return r;
}

/// tr(A * B)
template <int D> inline cplx trace_prod(const CMat<D>& a, const CMat<D>& b) {
    cplx s = 0.0;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) s += a[i][j] * b[j][i];
    return s;
}

} // namespace fgs
