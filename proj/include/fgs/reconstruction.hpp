#pragma once

#include <span>
#include <vector>

#include "fgs/core.hpp"
#include "fgs/grid.hpp"
#include "fgs/initial_data.hpp"
#include "fgs/parallel.hpp"
#include "fgs/psi.hpp"
#include "fgs/ray_dynamics.hpp"
#include "fgs/sampling.hpp"
#include "fgs/wave_field.hpp"

namespace fgs {

inline constexpr double default_cutoff = 8.0;  // in units of 1/sqrt(k)

/// One evolved sample prepared for reconstruction: final FGA variables, their
/// time derivatives (from the ODE right-hand side), and the weight psi/pi.
template <int D> struct SourcePoint {
    Vec<D> Q{}, P{}, Qdot{}, Pdot{};
    cplx a{}, adot{};
    cplx psi_over_pi{};
};

template <int D> struct BranchEnsemble {
    Branch branch = Branch::plus;
    std::vector<SourcePoint<D>> pts;
};

/// Evolve a sampled batch along one branch and attach the window-transform
/// weights. Pure per sample; parallelized over the batch.
template <int D>
inline BranchEnsemble<D> make_ensemble(const InitialData<D>& data, const VelocityField<D>& field,
                                       const SampleBatch<D>& batch, Branch branch, double t_final,
                                       double dt) {
    BranchEnsemble<D> ens;
    ens.branch = branch;
    ens.pts.resize(batch.size());
    parallel_for(static_cast<std::int64_t>(batch.size()), [&](std::int64_t i) {
        const PhasePoint<D>& z0 = batch.points[i];
        const PsiValue psi = window_transform<D>(data, field, z0);
        const TrajectoryState<D> s = evolve<D>(z0, branch, field, t_final, dt);
        const StateDeriv<D> d = ode_rhs<D>(s, field);
        SourcePoint<D>& pt = ens.pts[i];
        pt.Q = s.Q;
        pt.P = s.P;
        pt.Qdot = d.dQ;
        pt.Pdot = d.dP;
        pt.a = s.a;
        pt.adot = d.da;
        pt.psi_over_pi = (branch == Branch::plus ? psi.plus : psi.minus) / batch.pi_values[i];
    });
    return ens;
}

template <int D> struct LambdaTerms {
    cplx lambda;
    cplx dlambda_dt;
    CVec<D> grad_lambda;
};

/// Lambda and its analytic time/space derivatives at one point x:
///   Lambda   = (k/2pi)^{3d/2} (a psi / pi) exp(ik Theta),
///   Theta    = P.(x-Q) + (i/2)|x-Q|^2,
///   dLambda  = Lambda [adot/a + ik(Pdot.(x-Q) - P.Qdot) + k (x-Q).Qdot],
///   gradLam  = Lambda [ik P - k (x-Q)].
template <int D>
inline LambdaTerms<D> lambda_terms(const TrajectoryState<D>& state, cplx psi_branch, double pi_val,
                                   double k, const Vec<D>& x, const VelocityField<D>& field) {
    if (!(pi_val > 0.0)) throw ConfigError("lambda_terms: pi(z0) must be positive");
    const StateDeriv<D> d = ode_rhs<D>(state, field);
    const double pref = std::pow(k / (2.0 * pi), 1.5 * D);
    double decay = 0.0, phase = 0.0;
    cplx lin = d.da / state.a;
    LambdaTerms<D> out;
    for (int j = 0; j < D; ++j) {
        const double dx = x[j] - state.Q[j];
        decay += 0.5 * k * dx * dx;
        phase += k * state.P[j] * dx;
        lin += cplx(k * dx * d.dQ[j], k * (d.dP[j] * dx - state.P[j] * d.dQ[j]));
    }
    out.lambda = pref * (state.a * psi_branch / pi_val) * std::exp(cplx(-decay, phase));
    out.dlambda_dt = out.lambda * lin;
    for (int j = 0; j < D; ++j)
        out.grad_lambda[j] = out.lambda * cplx(-k * (x[j] - state.Q[j]), k * state.P[j]);
    return out;
}

namespace detail {

/// Fixed slab height along axis 0 -- a function of the grid only, so the
/// decomposition (and hence the accumulation order) is independent of the
/// thread count.
inline int slab_rows(int n0) { return std::min(n0, std::max(64, (n0 + 31) / 32)); }

inline constexpr int accum_block = 2048;  // samples per partial-sum block

} // namespace detail

/// Assemble u, du/dt and grad u on the grid from the evolved ensembles:
///   u(x) = sum_branches (1/M) sum_j Lambda_branch(t, x, z0_j).
/// Each sample touches only grid points within cutoff/sqrt(k) per axis; the
/// Gaussian factor there is below e^{-cutoff^2/2} ~ 1e-14 of the peak.
///
/// Accumulation: the grid is cut into fixed slabs along axis 0 (parallel);
/// within a slab, samples are added in index order in blocks of 2048 whose
/// partial sums are then combined, bounding roundoff at large M. The result
/// is bit-identical for any thread count.
template <int D>
inline WaveField<D> reconstruct(double k, const Grid<D>& grid,
                                std::span<const BranchEnsemble<D>> ensembles,
                                double cutoff = default_cutoff) {
    for (int j = 0; j < D; ++j)
        if (grid.h[j] > 2.0 * pi / (default_ppw * k) * (1.0 + 1e-12))
            throw GridTooCoarse("reconstruction grid violates the PPW constraint for this k");

    WaveField<D> f;
    f.grid = grid;
    f.k = k;
    f.allocate();

    const double radius = cutoff / std::sqrt(k);
    const int rows = detail::slab_rows(grid.n[0]);
    const int nslabs = (grid.n[0] + rows - 1) / rows;

    std::int64_t row_size = 1;
    for (int j = 1; j < D; ++j) row_size *= grid.n[j];

    parallel_for(nslabs, [&](std::int64_t slab) {
        const int i0_lo = static_cast<int>(slab) * rows;
        const int i0_hi = std::min(grid.n[0] - 1, i0_lo + rows - 1);
        const std::int64_t slab_off = static_cast<std::int64_t>(i0_lo) * row_size;
        const std::int64_t slab_len = static_cast<std::int64_t>(i0_hi - i0_lo + 1) * row_size;

        std::vector<cplx> bu(slab_len), bdu(slab_len);
        std::array<std::vector<cplx>, D> bg;
        for (int j = 0; j < D; ++j) bg[j].assign(slab_len, cplx{});

        // per-axis scratch for the separable window factors
        std::array<std::vector<cplx>, D> wfac, lfac, gfac;
        for (int j = 0; j < D; ++j) {
            wfac[j].resize(grid.n[j]);
            lfac[j].resize(grid.n[j]);
            gfac[j].resize(grid.n[j]);
        }

        for (const BranchEnsemble<D>& ens : ensembles) {
            const double inv_m = 1.0 / static_cast<double>(ens.pts.size());
            const double pref = std::pow(k / (2.0 * pi), 1.5 * D) * inv_m;

            for (std::size_t blk = 0; blk < ens.pts.size(); blk += detail::accum_block) {
                const std::size_t blk_end = std::min(ens.pts.size(), blk + detail::accum_block);
                bool block_dirty = false;

                for (std::size_t s = blk; s < blk_end; ++s) {
                    const SourcePoint<D>& pt = ens.pts[s];

                    std::array<int, D> lo{}, hi{};
                    bool empty = false;
                    for (int j = 0; j < D; ++j) {
                        lo[j] = static_cast<int>(std::ceil((pt.Q[j] - radius - grid.lo[j]) / grid.h[j]));
                        hi[j] = static_cast<int>(std::floor((pt.Q[j] + radius - grid.lo[j]) / grid.h[j]));
                        lo[j] = std::max(lo[j], j == 0 ? i0_lo : 0);
                        hi[j] = std::min(hi[j], j == 0 ? i0_hi : grid.n[j] - 1);
                        if (lo[j] > hi[j]) { empty = true; break; }
                    }
                    if (empty) continue;
                    block_dirty = true;

                    // separable per-axis factors over the window
                    cplx s0 = pt.adot / pt.a;
                    for (int j = 0; j < D; ++j) {
                        s0 -= iu * (k * pt.P[j] * pt.Qdot[j]);
                        for (int i = lo[j]; i <= hi[j]; ++i) {
                            const double dx = grid.coord(j, i) - pt.Q[j];
                            wfac[j][i] = std::exp(cplx(-0.5 * k * dx * dx, k * pt.P[j] * dx));
                            lfac[j][i] = cplx(k * dx * pt.Qdot[j], k * pt.Pdot[j] * dx);
                            gfac[j][i] = cplx(-k * dx, k * pt.P[j]);
                        }
                    }
                    const cplx wbase = pref * pt.a * pt.psi_over_pi;

                    // odometer over leading axes, contiguous inner loop on the last
                    std::array<int, D> idx = lo;
                    for (;;) {
                        std::int64_t base;
                        if constexpr (D == 1) {
                            base = -i0_lo;
                        } else {
                            base = idx[0] - i0_lo;
                            for (int j = 1; j < D; ++j)
                                base = base * grid.n[j] + (j < D - 1 ? idx[j] : 0);
                        }
                        cplx outer = wbase;
                        cplx outer_lin = s0;
                        if constexpr (D > 1) {
                            for (int j = 0; j < D - 1; ++j) {
                                outer *= wfac[j][idx[j]];
                                outer_lin += lfac[j][idx[j]];
                            }
                        }
                        const int last = D - 1;
                        for (int i = lo[last]; i <= hi[last]; ++i) {
                            const std::int64_t at = base + i;
                            const cplx lam = outer * wfac[last][i];
                            bu[at] += lam;
                            bdu[at] += lam * (outer_lin + lfac[last][i]);
                            if constexpr (D > 1) {
                                for (int j = 0; j < D - 1; ++j) bg[j][at] += lam * gfac[j][idx[j]];
                            }
                            bg[last][at] += lam * gfac[last][i];
                        }
                        // advance odometer over axes 0..D-2
                        if constexpr (D == 1) break;
                        else {
                            int j = D - 2;
                            for (;;) {
                                if (++idx[j] <= hi[j]) break;
                                idx[j] = lo[j];
                                if (--j < 0) break;
                            }
                            if (j < 0) break;
                        }
                    }
                }

                if (block_dirty) {
                    for (std::int64_t i = 0; i < slab_len; ++i) {
                        f.u[slab_off + i] += bu[i];
                        f.du_dt[slab_off + i] += bdu[i];
                        bu[i] = cplx{};
                        bdu[i] = cplx{};
                    }
                    for (int j = 0; j < D; ++j)
                        for (std::int64_t i = 0; i < slab_len; ++i) {
                            f.grad[j][slab_off + i] += bg[j][i];
                            bg[j][i] = cplx{};
                        }
                }
            }
        }
    });
    return f;
}

/// Sampling -> evolution -> reconstruction for one batch pair. The plus and
/// minus batches are drawn independently (Algorithm 1 taken literally); the
/// minus seed is derived from the plus seed.
template <int D>
inline WaveField<D> fgs_field(const InitialData<D>& data, const VelocityField<D>& field,
                              const Grid<D>& grid, std::size_t M, std::uint64_t seed,
                              double t_final, double dt, double cutoff = default_cutoff) {
    const double k = wave_number<D>(data);
    const SampleBatch<D> bp = draw_batch<D>(data, M, seed);
    const SampleBatch<D> bm = draw_batch<D>(data, M, hash_combine(seed, 0x6d696e7573ULL));
    std::array<BranchEnsemble<D>, 2> ens{
        make_ensemble<D>(data, field, bp, Branch::plus, t_final, dt),
        make_ensemble<D>(data, field, bm, Branch::minus, t_final, dt),
    };
    WaveField<D> f = reconstruct<D>(k, grid, std::span<const BranchEnsemble<D>>(ens), cutoff);
    f.t = t_final;
    f.M = M;
    f.seed = seed;
    return f;
}

} // namespace fgs
