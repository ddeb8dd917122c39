#include "fsw/elliptic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "fsw/errors.hpp"
#include "fsw/operators.hpp"

namespace fsw {

namespace {

using Mat = Eigen::MatrixXd;
using LU = Eigen::PartialPivLU<Mat>;

constexpr double kMinRcond = 1e-14;

LU factor(const Mat& m, int j1, int j2, const char* what) {
    LU lu(m);
    const double rc = lu.rcond();
    if (!(rc > kMinRcond)) {
        std::ostringstream os;
        os << what << " system singular for mode (" << j1 << ", " << j2 << "), rcond = " << rc;
        throw SingularMode(os.str(), j1, j2);
    }
    return lu;
}

Spectrum zero_spectrum(const GridPtr& g, int layers) {
    return Spectrum{g, layers, std::vector<cplx>(g->splane() * layers)};
}

// Sum of |c|^2 over non-Nyquist modes of the selected layers, counting the
// conjugate half implicitly.
template <class RowPred>
double masked_sq(const Spectrum& s, RowPred use_row) {
    const Grid& g = *s.grid;
    double acc = 0.0;
    for (int l = 0; l < s.layers; ++l)
        for (int j2 = 0; j2 < g.n2(); ++j2)
            for (int j1 = 0; j1 < g.n1h(); ++j1) {
                if (g.nyquist(j1, j2)) continue;
                if (!use_row(l, j1 == 0 && j2 == 0)) continue;
                acc += g.hermitian_weight(j1) * std::norm(s.at(j1, j2, l));
            }
    return acc;
}

double top_sq(const Spectrum& s) {
    return masked_sq(s, [](int, bool) { return true; });
}

}  // namespace

// ---------------------------------------------------------------- Stokes

struct FlatStokesSolver::Impl {
    std::map<double, LU> lt;  // (v, u3, p[, eta]) block per |k|
    std::map<double, LU> tr;  // transverse / horizontal mode-0 block per |k|
    std::unique_ptr<LU> zero; // (u3, p) block of the zero mode
};

bool stokes_row_used(StokesVariant variant, int nz, int eq, int iz, bool mode0) {
    const int N = nz - 1;
    if (eq < 2) return iz > 0 && iz < N;
    if (eq == 2) return mode0 ? iz < N : (iz > 0 && iz < N);
    (void)variant;
    return !mode0 || iz > 0;
}

bool FlatStokesSolver::row_used(int eq, int iz, bool mode0) const {
    return stokes_row_used(variant_, grid_->nz(), eq, iz, mode0);
}

FlatStokesSolver::FlatStokesSolver(GridPtr g, StokesVariant variant, double shift,
                                   std::optional<SurfaceCoupling> coupling)
    : grid_(std::move(g)), variant_(variant), shift_(shift), coupling_(coupling), impl_(std::make_unique<Impl>()) {
    if (coupling_ && variant_ != StokesVariant::FreeStress)
        throw ValidationError("coupling", "surface coupling needs the free-stress variant");
    const Grid& gr = *grid_;
    const int n = gr.nz(), N = n - 1;
    const auto& D = gr.D();
    const auto& D2 = gr.D2();
    const bool free = variant_ == StokesVariant::FreeStress;
    const int extra = coupling_ ? 1 : 0;

    for (int j2 = 0; j2 < gr.n2(); ++j2)
        for (int j1 = 0; j1 < gr.n1h(); ++j1) {
            if (gr.nyquist(j1, j2)) continue;
            const double k = std::hypot(gr.k1(j1), gr.k2(j2));
            const double kk = k * k + shift_;

            if (!impl_->tr.count(k)) {
                Mat T = Mat::Zero(n, n);
                T(0, 0) = 1.0;
                for (int i = 1; i < N; ++i) {
                    for (int j = 0; j < n; ++j) T(i, j) = -D2[i * n + j];
                    T(i, i) += kk;
                }
                if (free)
                    for (int j = 0; j < n; ++j) T(N, j) = -D[N * n + j];
                else
                    T(N, N) = 1.0;
                impl_->tr.emplace(k, factor(T, j1, j2, "transverse"));
            }
            if (j1 == 0 && j2 == 0) {
                // unknowns: u3 [0, n), p [n, 2n). Continuity fixes u3 from
                // the bottom up; a Dirichlet top value would be redundant
                // (it follows from the flux balance) and, with interior
                // continuity rows, admits the null vector T_N - 1.
                Mat Z = Mat::Zero(2 * n, 2 * n);
                Z(0, 0) = 1.0;
                for (int i = 1; i <= N; ++i)
                    for (int j = 0; j < n; ++j) Z(i, j) = D[i * n + j];
                for (int i = 0; i < N; ++i) {
                    for (int j = 0; j < n; ++j) {
                        Z(n + i, j) = -D2[i * n + j];
                        Z(n + i, n + j) = D[i * n + j];
                    }
                    Z(n + i, i) += shift_;
                }
                if (free) {
                    Z(n + N, n + N) = 1.0;
                    for (int j = 0; j < n; ++j) Z(n + N, j) -= 2.0 * D[N * n + j];
                } else {
                    Z(n + N, n + N) = 1.0;  // surface-mean pressure gauge
                }
                impl_->zero = std::make_unique<LU>(factor(Z, 0, 0, "zero-mode"));
                continue;
            }
            if (impl_->lt.count(k)) continue;
            // unknowns: v = i u_L [0,n), u3 [n,2n), p [2n,3n), eta [3n]
            const int V = 0, U = n, P = 2 * n, E = 3 * n;
            Mat L = Mat::Zero(3 * n + extra, 3 * n + extra);
            L(V, V) = 1.0;
            L(U, U) = 1.0;
            for (int i = 1; i < N; ++i) {
                for (int j = 0; j < n; ++j) {
                    L(V + i, V + j) = -D2[i * n + j];
                    L(U + i, U + j) = -D2[i * n + j];
                    L(U + i, P + j) = D[i * n + j];
                }
                L(V + i, V + i) += kk;
                L(U + i, U + i) += kk;
                L(V + i, P + i) = -k;
            }
            for (int i = 0; i < n; ++i) {
                L(P + i, V + i) = k;
                for (int j = 0; j < n; ++j) L(P + i, U + j) = D[i * n + j];
            }
            if (free) {
                for (int j = 0; j < n; ++j) L(V + N, V + j) = -D[N * n + j];
                L(V + N, U + N) = k;
                for (int j = 0; j < n; ++j) L(U + N, U + j) = -2.0 * D[N * n + j];
                L(U + N, P + N) = 1.0;
            } else {
                L(V + N, V + N) = 1.0;
                L(U + N, U + N) = 1.0;
            }
            if (coupling_) {
                const auto& c = *coupling_;
                L(U + N, E) = -(1.0 + c.sigma * k * k);
                L(E, E) = 1.0 / c.dt + c.kappa * k * k;
                L(E, U + N) = -1.0;
            }
            impl_->lt.emplace(k, factor(L, j1, j2, "Stokes"));
        }
}

FlatStokesSolver::~FlatStokesSolver() = default;
FlatStokesSolver::FlatStokesSolver(FlatStokesSolver&&) noexcept = default;

void FlatStokesSolver::solve_modes(const StokesModes& in, StokesModesSolution& out, const Spectrum* eta_rhs,
                                   Spectrum* eta_out) const {
    const GridPtr& gp = grid_;
    const Grid& g = *gp;
    const int n = g.nz(), N = n - 1;
    const bool free = variant_ == StokesVariant::FreeStress;
    const bool coupled = coupling_.has_value() && eta_rhs && eta_out;
    if (coupling_ && !(eta_rhs && eta_out)) throw ValidationError("coupling", "coupled solver needs surface rows");
    for (int c = 0; c < 3; ++c) out.u[c] = zero_spectrum(gp, n);
    out.p = zero_spectrum(gp, n);
    if (coupled) *eta_out = zero_spectrum(gp, 1);

    if (!free) {
        double hbar = 0.0, scale = 1.0;
        for (int i = 0; i < n; ++i) {
            hbar += g.weights()[i] * in.h.at(0, 0, i).real();
            scale = std::max(scale, std::abs(in.h.at(0, 0, i).real()) * g.b());
        }
        const double phi3 = in.top[2].at(0, 0).real();
        scale = std::max(scale, std::abs(phi3));
        if (std::abs(hbar - phi3) > 1e-8 * scale) {
            std::ostringstream os;
            os << "Dirichlet data violate the flux balance: mean(int h) = " << hbar << ", mean(phi3) = " << phi3;
            throw CompatibilityViolated(os.str());
        }
    }

    Mat rt(n, 2);
    for (int j2 = 0; j2 < g.n2(); ++j2)
        for (int j1 = 0; j1 < g.n1h(); ++j1) {
            const double k1 = g.k1(j1), k2 = g.k2(j2);
            const double k = std::hypot(k1, k2);
            if (g.nyquist(j1, j2)) {
                if (coupled) {
                    const auto& cp = *coupling_;
                    eta_out->at(j1, j2) = eta_rhs->at(j1, j2) / (1.0 / cp.dt + cp.kappa * k * k);
                }
                continue;
            }
            const LU& T = impl_->tr.at(k);
            if (j1 == 0 && j2 == 0) {
                for (int c = 0; c < 2; ++c) {
                    for (int i = 0; i < n; ++i) {
                        cplx v = (i == 0) ? cplx(0) : (i == N ? in.top[c].at(0, 0) : in.f[c].at(0, 0, i));
                        rt(i, 0) = v.real();
                        rt(i, 1) = v.imag();
                    }
                    Mat x = T.solve(rt);
                    for (int i = 0; i < n; ++i) out.u[c].at(0, 0, i) = cplx(x(i, 0), x(i, 1));
                }
                cplx top3 = in.top[2].at(0, 0);
                if (coupled) {
                    // zero mode of the surface carries no flux
                    cplx e = eta_rhs->at(0, 0) * coupling_->dt;
                    eta_out->at(0, 0) = e;
                    top3 += e;
                }
                Mat rz(2 * n, 2);
                for (int i = 0; i < n; ++i) {
                    cplx cu = (i == 0) ? cplx(0) : in.h.at(0, 0, i);
                    cplx cp = (i == N) ? (free ? top3 : cplx(0)) : in.f[2].at(0, 0, i);
                    rz(i, 0) = cu.real();
                    rz(i, 1) = cu.imag();
                    rz(n + i, 0) = cp.real();
                    rz(n + i, 1) = cp.imag();
                }
                Mat x = impl_->zero->solve(rz);
                for (int i = 0; i < n; ++i) {
                    out.u[2].at(0, 0, i) = cplx(x(i, 0), x(i, 1));
                    out.p.at(0, 0, i) = cplx(x(n + i, 0), x(n + i, 1));
                }
                continue;
            }
            const double c1 = k1 / k, c2 = k2 / k;
            const LU& L = impl_->lt.at(k);
            const int sz = 3 * n + (coupled ? 1 : 0);
            Mat r = Mat::Zero(sz, 2);
            const cplx I(0, 1);
            for (int i = 0; i < n; ++i) {
                cplx fl = c1 * in.f[0].at(j1, j2, i) + c2 * in.f[1].at(j1, j2, i);
                cplx ft = -c2 * in.f[0].at(j1, j2, i) + c1 * in.f[1].at(j1, j2, i);
                cplx vrow = 0, urow = 0, trow = 0;
                if (i > 0 && i < N) {
                    vrow = I * fl;
                    urow = in.f[2].at(j1, j2, i);
                    trow = ft;
                } else if (i == N) {
                    cplx tl = c1 * in.top[0].at(j1, j2) + c2 * in.top[1].at(j1, j2);
                    vrow = I * tl;
                    urow = in.top[2].at(j1, j2);
                    trow = -c2 * in.top[0].at(j1, j2) + c1 * in.top[1].at(j1, j2);
                }
                r(i, 0) = vrow.real();
                r(i, 1) = vrow.imag();
                r(n + i, 0) = urow.real();
                r(n + i, 1) = urow.imag();
                r(2 * n + i, 0) = in.h.at(j1, j2, i).real();
                r(2 * n + i, 1) = in.h.at(j1, j2, i).imag();
                rt(i, 0) = trow.real();
                rt(i, 1) = trow.imag();
            }
            if (coupled) {
                r(3 * n, 0) = eta_rhs->at(j1, j2).real();
                r(3 * n, 1) = eta_rhs->at(j1, j2).imag();
            }
            Mat x = L.solve(r);
            Mat xt = T.solve(rt);
            for (int i = 0; i < n; ++i) {
                // u_L = -i v
                cplx ul(x(i, 1), -x(i, 0));
                cplx ut(xt(i, 0), xt(i, 1));
                out.u[0].at(j1, j2, i) = c1 * ul - c2 * ut;
                out.u[1].at(j1, j2, i) = c2 * ul + c1 * ut;
                out.u[2].at(j1, j2, i) = cplx(x(n + i, 0), x(n + i, 1));
                out.p.at(j1, j2, i) = cplx(x(2 * n + i, 0), x(2 * n + i, 1));
            }
            if (coupled) eta_out->at(j1, j2) = cplx(x(3 * n, 0), x(3 * n, 1));
        }
}

StokesModes to_modes(const StokesRhs& rhs) {
    StokesModes m;
    for (int c = 0; c < 3; ++c) {
        m.f[c] = fft(rhs.f.component(c));
        m.top[c] = fft(rhs.bc_top[c]);
    }
    m.h = fft(rhs.h);
    return m;
}

StokesSolution from_modes(const StokesModesSolution& s) {
    return {VolumeField::stack(ifft_volume(s.u[0]), ifft_volume(s.u[1]), ifft_volume(s.u[2])), ifft_volume(s.p)};
}

StokesSolution FlatStokesSolver::solve(const StokesRhs& rhs) const {
    require_same(grid_, rhs.f.grid());
    if (rhs.variant != variant_) throw ValidationError("variant", "solver built for the other boundary variant");
    StokesModes m = to_modes(rhs);
    StokesModesSolution s;
    solve_modes(m, s);
    return from_modes(s);
}

StokesSolution FlatStokesSolver::solve_coupled(const StokesRhs& rhs, const SurfaceField& eta_rhs,
                                               SurfaceField& eta_out) const {
    StokesModes m = to_modes(rhs);
    StokesModesSolution s;
    Spectrum er = fft(eta_rhs), eo;
    solve_modes(m, s, &er, &eo);
    eta_out = ifft_surface(eo);
    return from_modes(s);
}

StokesSolution solve_flat_stokes(const StokesRhs& rhs) {
    FlatStokesSolver solver(rhs.f.grid(), rhs.variant);
    return solver.solve(rhs);
}

double flat_stokes_residual(const StokesRhs& rhs, const StokesSolution& sol, double shift) {
    const GridPtr& g = rhs.f.grid();
    const VolumeField lapu = lap(sol.u);
    const VolumeField gp = grad(sol.p);
    VolumeField rm = rhs.f;
    rm += lapu;
    rm -= gp;
    rm.axpy(-shift, sol.u);
    VolumeField rd = rhs.h - div(sol.u);
    SurfaceVector rt;
    if (rhs.variant == StokesVariant::FreeStress) {
        StressField S = symgrad(sol.u);
        SurfaceVector e3{SurfaceField(g), SurfaceField(g), SurfaceField::constant(g, 1.0)};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) S.S[i][j] *= -1.0;
        for (int i = 0; i < 3; ++i) S.S[i][i] += sol.p;
        SurfaceVector t = traction_top(S, e3);
        for (int i = 0; i < 3; ++i) rt[i] = rhs.bc_top[i] - t[i];
    } else {
        for (int i = 0; i < 3; ++i) rt[i] = rhs.bc_top[i] - sol.u.top(i);
    }
    double num = 0.0, den = 0.0;
    for (int c = 0; c < 3; ++c) {
        auto pred = [&](int l, bool m0) { return stokes_row_used(rhs.variant, g->nz(), c, l, m0); };
        num += masked_sq(fft(rm.component(c)), pred);
        den += masked_sq(fft(rhs.f.component(c)), pred) + masked_sq(fft(lapu.component(c)), pred) +
               masked_sq(fft(gp.component(c)), pred);
        num += top_sq(fft(rt[c])) + top_sq(fft(sol.u.bottom(c)));
        den += top_sq(fft(rhs.bc_top[c]));
    }
    auto dpred = [&](int l, bool m0) { return stokes_row_used(rhs.variant, g->nz(), 3, l, m0); };
    num += masked_sq(fft(rd), dpred);
    den += masked_sq(fft(rhs.h), dpred);
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

// ---------------------------------------------------------------- Poisson

struct FlatPoissonSolver::Impl {
    std::map<double, LU> lu;
};

FlatPoissonSolver::FlatPoissonSolver(GridPtr g) : grid_(std::move(g)), impl_(std::make_unique<Impl>()) {
    const Grid& gr = *grid_;
    const int n = gr.nz(), N = n - 1;
    for (int j2 = 0; j2 < gr.n2(); ++j2)
        for (int j1 = 0; j1 < gr.n1h(); ++j1) {
            if (gr.nyquist(j1, j2)) continue;
            const double k = std::hypot(gr.k1(j1), gr.k2(j2));
            if (impl_->lu.count(k)) continue;
            Mat A = Mat::Zero(n, n);
            for (int j = 0; j < n; ++j) A(0, j) = -gr.D()[j];
            for (int i = 1; i < N; ++i) {
                for (int j = 0; j < n; ++j) A(i, j) = gr.D2()[i * n + j];
                A(i, i) -= k * k;
            }
            A(N, N) = 1.0;
            impl_->lu.emplace(k, factor(A, j1, j2, "Poisson"));
        }
}

FlatPoissonSolver::~FlatPoissonSolver() = default;
FlatPoissonSolver::FlatPoissonSolver(FlatPoissonSolver&&) noexcept = default;

Spectrum FlatPoissonSolver::solve_modes(const Spectrum& f, const Spectrum& top, const Spectrum& bot) const {
    const Grid& g = *grid_;
    const int n = g.nz(), N = n - 1;
    Spectrum out = zero_spectrum(grid_, n);
    Mat r(n, 2);
    for (int j2 = 0; j2 < g.n2(); ++j2)
        for (int j1 = 0; j1 < g.n1h(); ++j1) {
            if (g.nyquist(j1, j2)) continue;
            const double k = std::hypot(g.k1(j1), g.k2(j2));
            for (int i = 0; i < n; ++i) {
                cplx v = i == 0 ? bot.at(j1, j2) : (i == N ? top.at(j1, j2) : f.at(j1, j2, i));
                r(i, 0) = v.real();
                r(i, 1) = v.imag();
            }
            Mat x = impl_->lu.at(k).solve(r);
            for (int i = 0; i < n; ++i) out.at(j1, j2, i) = cplx(x(i, 0), x(i, 1));
        }
    return out;
}

// ---------------------------------------------------------------- A-Stokes

VolumeField div_stress_A(const VolumeField& p, const VolumeField& u, const GeometryState& G) {
    StressField S = stress_A(p, u, G);
    VolumeField out(u.grid(), 3);
    for (int i = 0; i < 3; ++i)
        out.set_component(i, div_A(VolumeField::stack(S.S[i][0], S.S[i][1], S.S[i][2]), G));
    return out;
}

namespace {

struct AStokesResidual {
    VolumeField r1, r2;
    SurfaceVector r3;
    SurfaceVector bottom;
};

AStokesResidual a_stokes_defect(const VolumeField& F1, const VolumeField& F2, const SurfaceVector& F3,
                                const GeometryState& G, const VolumeField& u, const VolumeField& p) {
    AStokesResidual r;
    r.r1 = F1 - div_stress_A(p, u, G);
    r.r2 = F2 - div_A(u, G);
    SurfaceVector t = traction_top(stress_A(p, u, G), G.N);
    for (int i = 0; i < 3; ++i) {
        r.r3[i] = F3[i] - t[i];
        r.bottom[i] = u.bottom(i);
    }
    return r;
}

double a_stokes_sq(const VolumeField& r1, const VolumeField& r2,
                   const SurfaceVector& r3, const SurfaceVector* bottom) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
        s += masked_sq(fft(r1.component(c)), [&](int l, bool m0) { return stokes_row_used(StokesVariant::FreeStress, r1.grid()->nz(), c, l, m0); });
        s += top_sq(fft(r3[c]));
        if (bottom) s += top_sq(fft((*bottom)[c]));
    }
    s += masked_sq(fft(r2), [&](int l, bool m0) { return stokes_row_used(StokesVariant::FreeStress, r1.grid()->nz(), 3, l, m0); });
    return s;
}

}  // namespace

double A_stokes_residual(const VolumeField& F1, const VolumeField& F2, const SurfaceVector& F3,
                         const GeometryState& G, const VolumeField& u, const VolumeField& p) {
    const double fn = a_stokes_sq(F1, F2, F3, nullptr);
    AStokesResidual r = a_stokes_defect(F1, F2, F3, G, u, p);
    const double rn = a_stokes_sq(r.r1, r.r2, r.r3, &r.bottom);
    return fn > 0 ? std::sqrt(rn / fn) : std::sqrt(rn);
}

AStokesResult solve_A_stokes(const VolumeField& F1, const VolumeField& F2, const SurfaceVector& F3,
                             const GeometryState& G, double tol, int max_iter, const FlatStokesSolver* flat) {
    const GridPtr& g = G.grid;
    require_same(g, F1.grid());
    std::unique_ptr<FlatStokesSolver> own;
    if (!flat || flat->shift() != 0.0 || flat->variant() != StokesVariant::FreeStress) {
        own = std::make_unique<FlatStokesSolver>(g, StokesVariant::FreeStress);
        flat = own.get();
    }
    AStokesResult res{VolumeField(g, 3), VolumeField(g), {}};
    const double fn = std::sqrt(a_stokes_sq(F1, F2, F3, nullptr));
    if (fn == 0.0) return res;

    double first = -1.0;
    for (int it = 0;; ++it) {
        AStokesResidual r = it == 0 ? AStokesResidual{F1, F2, F3, {}} : a_stokes_defect(F1, F2, F3, G, res.u, res.p);
        const double rel = std::sqrt(a_stokes_sq(r.r1, r.r2, r.r3, nullptr)) / fn;
        res.info.residual = rel;
        res.info.iterations = it;
        if (rel <= tol) return res;
        if (first < 0) first = rel;
        if (!std::isfinite(rel) || rel > 1e6 * first || it >= max_iter) {
            std::ostringstream os;
            os << "A-Stokes iteration did not converge after " << it << " iterations (relative residual " << rel
               << ")";
            throw NoConvergence(os.str(), it);
        }
        // flat correction: -Lap d + grad dp = r1 + grad r2, div d = r2
        StokesRhs c{r.r1 + grad(r.r2), r.r2, r.r3, StokesVariant::FreeStress};
        StokesSolution d = flat->solve(c);
        res.u += d.u;
        res.p += d.p;
    }
}

// ---------------------------------------------------------------- A-Poisson

namespace {

struct PoissonDefect {
    VolumeField interior;
    SurfaceField top, bottom;
};

PoissonDefect poisson_defect(const VolumeField& f1, const SurfaceField& f2, const SurfaceField& f3,
                             const GeometryState& G, const VolumeField& p) {
    VolumeField gp = grad_A(p, G);
    PoissonDefect d;
    d.interior = f1 - div_A(gp, G);
    d.top = f2 - p.top();
    // grad_A p . nu with nu = -e3
    d.bottom = f3 + gp.bottom(2);
    return d;
}

double poisson_sq(const VolumeField& interior, const SurfaceField& top, const SurfaceField& bottom) {
    const int N = interior.grid()->nz() - 1;
    return masked_sq(fft(interior), [&](int l, bool) { return l > 0 && l < N; }) + top_sq(fft(top)) +
           top_sq(fft(bottom));
}

void effective_poisson(const PoissonRhs& rhs, const GeometryState& G, VolumeField& f1, SurfaceField& f3) {
    if (!rhs.divergence_form) {
        f1 = rhs.f1;
        f3 = rhs.f3;
        return;
    }
    f1 = rhs.g0 - div_A(rhs.Gvec, G);
    // (grad_A p + Gvec) . nu = f3  =>  grad_A p . nu = f3 + Gvec_3
    f3 = rhs.f3 + rhs.Gvec.bottom(2);
}

}  // namespace

double A_poisson_residual(const PoissonRhs& rhs, const GeometryState& G, const VolumeField& p) {
    VolumeField f1;
    SurfaceField f3;
    effective_poisson(rhs, G, f1, f3);
    PoissonDefect d = poisson_defect(f1, rhs.f2, f3, G, p);
    const double fn = poisson_sq(f1, rhs.f2, f3);
    const double rn = poisson_sq(d.interior, d.top, d.bottom);
    return fn > 0 ? std::sqrt(rn / fn) : std::sqrt(rn);
}

APoissonResult solve_A_poisson(const PoissonRhs& rhs, const GeometryState& G, double tol, int max_iter) {
    const GridPtr& g = G.grid;
    VolumeField f1;
    SurfaceField f3;
    effective_poisson(rhs, G, f1, f3);
    require_same(g, f1.grid());
    FlatPoissonSolver flat(g);
    APoissonResult res{VolumeField(g), {}};
    const double fn = std::sqrt(poisson_sq(f1, rhs.f2, f3));
    if (fn == 0.0) return res;
    double first = -1.0;
    for (int it = 0;; ++it) {
        PoissonDefect d = it == 0 ? PoissonDefect{f1, rhs.f2, f3} : poisson_defect(f1, rhs.f2, f3, G, res.p);
        const double rel = std::sqrt(poisson_sq(d.interior, d.top, d.bottom)) / fn;
        res.info.residual = rel;
        res.info.iterations = it;
        if (rel <= tol) return res;
        if (first < 0) first = rel;
        if (!std::isfinite(rel) || rel > 1e6 * first || it >= max_iter) {
            std::ostringstream os;
            os << "A-Poisson iteration did not converge after " << it << " iterations (relative residual " << rel
               << ")";
            throw NoConvergence(os.str(), it);
        }
        res.p += ifft_volume(flat.solve_modes(fft(d.interior), fft(d.top), fft(d.bottom)));
    }
}

}  // namespace fsw
