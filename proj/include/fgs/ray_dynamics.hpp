#pragma once

#include <string>
#include <vector>

#include "fgs/core.hpp"
#include "fgs/velocity.hpp"

namespace fgs {

/// The two characteristic families, with Hamiltonians H_± = ±c(Q)|P|.
enum class Branch : int { plus = +1, minus = -1 };

inline constexpr double branch_sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }
inline constexpr const char* branch_name(Branch b) { return b == Branch::plus ? "+" : "-"; }

template <int D> struct PhasePoint {
    Vec<D> q{}, p{};
};

/// J = d(Q,P)/d(q,p) in block form; row = component, column = derivative.
template <int D> struct PhaseJacobian {
    Mat<D> qq{}, qp{}, pq{}, pp{};

    static PhaseJacobian identity_jacobian() {
        PhaseJacobian j;
        j.qq = identity<D>();
        j.pp = identity<D>();
        return j;
    }
};

template <int D> struct TrajectoryState {
    double t = 0.0;
    Vec<D> Q{}, P{};
    cplx a{};
    PhaseJacobian<D> J;
    Branch branch = Branch::plus;

    static TrajectoryState initial(const PhasePoint<D>& z0, Branch b) {
        TrajectoryState s;
        s.Q = z0.q;
        s.P = z0.p;
        s.a = std::pow(2.0, 0.5 * D);
        s.J = PhaseJacobian<D>::identity_jacobian();
        s.branch = b;
        return s;
    }

    /// Z = d_z(Q + iP) with d_z = d_q - i d_p, assembled from the real Jacobian.
    CMat<D> Z() const {
        CMat<D> z{};
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j)
                z[i][j] = cplx(J.qq[i][j] + J.pp[i][j], J.pq[i][j] - J.qp[i][j]);
        return z;
    }

    cplx detZ() const { return det<D>(Z()); }
};

template <int D> struct HamiltonianEval {
    double H;
    Vec<D> dH_dP;
    Vec<D> dH_dQ;
};

/// H_± = ±c(Q)|P| and its phase-space gradient.
template <int D>
inline HamiltonianEval<D> hamiltonian(Branch branch, const VelocityField<D>& field,
                                      const Vec<D>& Q, const Vec<D>& P) {
    const double pn = norm<D>(P);
    if (pn <= p_floor)
        throw MomentumUnderflow("|P| = " + std::to_string(pn) + " at the momentum floor");
    double c;
    Vec<D> grad;
    field.eval_c_grad(Q, c, grad);
    const double sgn = branch_sign(branch);
    HamiltonianEval<D> h;
    h.H = sgn * c * pn;
    for (int j = 0; j < D; ++j) {
        h.dH_dP[j] = sgn * c * P[j] / pn;
        h.dH_dQ[j] = sgn * pn * grad[j];
    }
    return h;
}

template <int D> struct StateDeriv {
    Vec<D> dQ{}, dP{};
    cplx da{};
    PhaseJacobian<D> dJ;
};

/// Right-hand side of the FGA variable system:
///   dQ/dt = dH/dP,  dP/dt = -dH/dQ          (Hamiltonian flow of H_±)
///   dJ/dt = S J     with S the linearization of the ray equations
///   da/dt = a (dH/dP . dH/dQ)/H + (a/2) tr(Z^{-1} dZ/dt)
/// Note: the source text prints the momentum equation as dP/dt = ∓dH_±/dQ,
/// a leftover of the unsigned-H convention; taken literally with signed H_±
/// it destroys H conservation on the minus branch. See the ray tests.
template <int D>
inline StateDeriv<D> ode_rhs(const TrajectoryState<D>& state, const VelocityField<D>& field) {
    const double pn = norm<D>(state.P);
    if (pn <= p_floor)
        throw MomentumUnderflow("|P| = " + std::to_string(pn) + " at the momentum floor");

    double c;
    Vec<D> grad;
    Mat<D> hess;
    field.eval(state.Q, c, grad, hess);

    const double sgn = branch_sign(state.branch);
    Vec<D> ph;
    for (int j = 0; j < D; ++j) ph[j] = state.P[j] / pn;

    StateDeriv<D> d;
    for (int j = 0; j < D; ++j) {
        d.dQ[j] = sgn * c * ph[j];
        d.dP[j] = -sgn * pn * grad[j];
    }

    // S blocks: F = dQ/dt, G = dP/dt.
    Mat<D> Fq, Fp, Gq, Gp;
    const double cp = sgn * c / pn;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            Fq[i][j] = sgn * ph[i] * grad[j];
            Fp[i][j] = cp * ((i == j ? 1.0 : 0.0) - ph[i] * ph[j]);
            Gq[i][j] = -sgn * pn * hess[i][j];
            Gp[i][j] = -sgn * grad[i] * ph[j];
        }

    d.dJ.qq = matmul<D>(Fq, state.J.qq);
    d.dJ.qp = matmul<D>(Fq, state.J.qp);
    d.dJ.pq = matmul<D>(Gq, state.J.qq);
    d.dJ.pp = matmul<D>(Gq, state.J.qp);
    {
        const Mat<D> t1 = matmul<D>(Fp, state.J.pq);
        const Mat<D> t2 = matmul<D>(Fp, state.J.pp);
        const Mat<D> t3 = matmul<D>(Gp, state.J.pq);
        const Mat<D> t4 = matmul<D>(Gp, state.J.pp);
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) {
                d.dJ.qq[i][j] += t1[i][j];
                d.dJ.qp[i][j] += t2[i][j];
                d.dJ.pq[i][j] += t3[i][j];
                d.dJ.pp[i][j] += t4[i][j];
            }
    }

    CMat<D> Z = state.Z();
    CMat<D> dZ;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            dZ[i][j] = cplx(d.dJ.qq[i][j] + d.dJ.pp[i][j], d.dJ.pq[i][j] - d.dJ.qp[i][j]);

    const cplx dz = det<D>(Z);
    if (std::abs(dz) < 1e-12)
        throw SingularZ("|det Z| = " + std::to_string(std::abs(dz)));
    const CMat<D> Zi = inverse<D>(Z, dz);

    // (dH/dP . dH/dQ)/H reduces to sgn * (P^ . grad c).
    d.da = state.a * (sgn * dot<D>(ph, grad)) + 0.5 * state.a * trace_prod<D>(Zi, dZ);
    return d;
}

namespace detail {

template <int D>
inline TrajectoryState<D> state_axpy(const TrajectoryState<D>& s, double h, const StateDeriv<D>& d) {
    TrajectoryState<D> r = s;
    r.t = s.t + h;
    for (int j = 0; j < D; ++j) {
        r.Q[j] += h * d.dQ[j];
        r.P[j] += h * d.dP[j];
    }
    r.a += h * d.da;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            r.J.qq[i][j] += h * d.dJ.qq[i][j];
            r.J.qp[i][j] += h * d.dJ.qp[i][j];
            r.J.pq[i][j] += h * d.dJ.pq[i][j];
            r.J.pp[i][j] += h * d.dJ.pp[i][j];
        }
    return r;
}

} // namespace detail

/// One classic RK4 step of the joint (Q, P, a, J) system.
template <int D>
inline TrajectoryState<D> rk4_step(const TrajectoryState<D>& s, const VelocityField<D>& field,
                                   double h) {
    const StateDeriv<D> k1 = ode_rhs(s, field);
    const StateDeriv<D> k2 = ode_rhs(detail::state_axpy(s, 0.5 * h, k1), field);
    const StateDeriv<D> k3 = ode_rhs(detail::state_axpy(s, 0.5 * h, k2), field);
    const StateDeriv<D> k4 = ode_rhs(detail::state_axpy(s, h, k3), field);

    TrajectoryState<D> r = s;
    r.t = s.t + h;
    const double w = h / 6.0;
    for (int j = 0; j < D; ++j) {
        r.Q[j] += w * (k1.dQ[j] + 2.0 * k2.dQ[j] + 2.0 * k3.dQ[j] + k4.dQ[j]);
        r.P[j] += w * (k1.dP[j] + 2.0 * k2.dP[j] + 2.0 * k3.dP[j] + k4.dP[j]);
    }
    r.a += w * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            r.J.qq[i][j] += w * (k1.dJ.qq[i][j] + 2.0 * k2.dJ.qq[i][j] + 2.0 * k3.dJ.qq[i][j] + k4.dJ.qq[i][j]);
            r.J.qp[i][j] += w * (k1.dJ.qp[i][j] + 2.0 * k2.dJ.qp[i][j] + 2.0 * k3.dJ.qp[i][j] + k4.dJ.qp[i][j]);
            r.J.pq[i][j] += w * (k1.dJ.pq[i][j] + 2.0 * k2.dJ.pq[i][j] + 2.0 * k3.dJ.pq[i][j] + k4.dJ.pq[i][j]);
            r.J.pp[i][j] += w * (k1.dJ.pp[i][j] + 2.0 * k2.dJ.pp[i][j] + 2.0 * k3.dJ.pp[i][j] + k4.dJ.pp[i][j]);
        }
    return r;
}

/// RK4 evolution up to t_final, with a final partial step when t_final/dt is
/// not integral. Failures carry the time at which they occurred.
template <int D>
inline TrajectoryState<D> evolve(const PhasePoint<D>& z0, Branch branch,
                                 const VelocityField<D>& field, double t_final, double dt) {
    if (t_final < 0.0 || dt <= 0.0) throw ConfigError("evolve needs t_final >= 0 and dt > 0");
    TrajectoryState<D> s = TrajectoryState<D>::initial(z0, branch);
    try {
        while (s.t < t_final - 1e-14) {
            const double h = std::min(dt, t_final - s.t);
            s = rk4_step(s, field, h);
        }
    } catch (const MomentumUnderflow& e) {
        throw MomentumUnderflow(std::string(e.what()) + " (t = " + std::to_string(s.t) + ")");
    } catch (const SingularZ& e) {
        throw SingularZ(std::string(e.what()) + " (t = " + std::to_string(s.t) + ")");
    }
    s.t = t_final;
    return s;
}

/// Row of the `traj` CLI dump.
template <int D> struct TrajectorySample {
    double t;
    Vec<D> Q, P;
    cplx a;
    cplx detZ;
};

template <int D>
inline std::vector<TrajectorySample<D>> trace_trajectory(const PhasePoint<D>& z0, Branch branch,
                                                         const VelocityField<D>& field,
                                                         double t_final, double dt, int stride) {
    if (stride < 1) throw ConfigError("stride must be >= 1");
    std::vector<TrajectorySample<D>> rows;
    TrajectoryState<D> s = TrajectoryState<D>::initial(z0, branch);
    rows.push_back({s.t, s.Q, s.P, s.a, s.detZ()});
    std::int64_t step = 0;
    while (s.t < t_final - 1e-14) {
        const double h = std::min(dt, t_final - s.t);
        s = rk4_step(s, field, h);
        if (++step % stride == 0 || s.t >= t_final - 1e-14)
            rows.push_back({s.t, s.Q, s.P, s.a, s.detZ()});
    }
    return rows;
}

} // namespace fgs
