#include "fsw/operators.hpp"

#include <cmath>

#include "fsw/errors.hpp"
#include "fsw/kernels.hpp"

namespace fsw {

namespace {

const kernels::Table& Kt() { return kernels::active(); }

void check_vector(const VolumeField& X) {
    if (X.arity() != 3) throw GridMismatch("vector field expected");
}

void check_scalar(const VolumeField& f) {
    if (f.arity() != 1) throw GridMismatch("scalar field expected");
}

// Coefficient products with the geometry are formed pointwise on the
// collocation grid. Only the last column of Acal differs from the identity.
VolumeField grad_from(const std::array<VolumeField, 3>& d, const GeometryState* G) {
    const GridPtr& g = d[0].grid();
    VolumeField out(g, 3);
    const std::size_t n = g->points();
    std::copy(d[0].data(), d[0].data() + n, out.comp(0));
    std::copy(d[1].data(), d[1].data() + n, out.comp(1));
    if (!G || G->flat) {
        std::copy(d[2].data(), d[2].data() + n, out.comp(2));
        return out;
    }
    Kt().mul_add(G->Acal[0][2].data(), d[2].data(), out.comp(0), n);
    Kt().mul_add(G->Acal[1][2].data(), d[2].data(), out.comp(1), n);
    Kt().mul(G->Acal[2][2].data(), d[2].data(), out.comp(2), n);
    return out;
}

VolumeField div_from(const VolumeField& X, const GeometryState* G) {
    check_vector(X);
    const GridPtr& g = X.grid();
    Spectrum s1 = fft(X.component(0));
    Spectrum s2 = fft(X.component(1));
    spectral_d1(s1);
    spectral_d2(s2);
    for (std::size_t i = 0; i < s1.c.size(); ++i) s1.c[i] += s2.c[i];
    VolumeField out = ifft_volume(s1);
    const VolumeField dz = d3(X);
    const std::size_t n = g->points();
    if (!G || G->flat) {
        Kt().axpy(1.0, dz.comp(2), out.data(), n);
        return out;
    }
    Kt().mul_add(G->Acal[0][2].data(), dz.comp(0), out.data(), n);
    Kt().mul_add(G->Acal[1][2].data(), dz.comp(1), out.data(), n);
    Kt().mul_add(G->Acal[2][2].data(), dz.comp(2), out.data(), n);
    return out;
}

StressField symgrad_from(const VolumeField& u, const GeometryState* G) {
    check_vector(u);
    std::array<VolumeField, 3> T;
    for (int i = 0; i < 3; ++i) T[i] = grad_from(gradient(u.component(i)), G);
    StressField S;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            VolumeField e(u.grid());
            // d^A_i u_j + d^A_j u_i
            const double* a = T[j].comp(i);
            const double* b = T[i].comp(j);
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = a[k] + b[k];
            S.S[i][j] = std::move(e);
        }
    return S;
}

}  // namespace

VolumeField grad_A(const VolumeField& f, const GeometryState& G) {
    check_scalar(f);
    require_same(f.grid(), G.grid);
    return grad_from(gradient(f), &G);
}

VolumeField div_A(const VolumeField& X, const GeometryState& G) {
    require_same(X.grid(), G.grid);
    return div_from(X, &G);
}

VolumeField lap_A(const VolumeField& f, const GeometryState& G) {
    require_same(f.grid(), G.grid);
    if (f.arity() == 1) return div_A(grad_A(f, G), G);
    VolumeField out(f.grid(), 3);
    for (int c = 0; c < 3; ++c) out.set_component(c, div_A(grad_A(f.component(c), G), G));
    return out;
}

StressField symgrad_A(const VolumeField& u, const GeometryState& G) {
    require_same(u.grid(), G.grid);
    return symgrad_from(u, &G);
}

StressField stress_A(const VolumeField& p, const VolumeField& u, const GeometryState& G) {
    check_scalar(p);
    StressField S = symgrad_A(u, G);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            S.S[i][j] *= -1.0;
            if (i == j) S.S[i][j] += p;
        }
    return S;
}

VolumeField grad(const VolumeField& f) {
    check_scalar(f);
    return grad_from(gradient(f), nullptr);
}

VolumeField div(const VolumeField& X) { return div_from(X, nullptr); }

VolumeField lap(const VolumeField& f) {
    if (f.arity() == 1) return div(grad(f));
    VolumeField out(f.grid(), 3);
    for (int c = 0; c < 3; ++c) out.set_component(c, div(grad(f.component(c))));
    return out;
}

StressField symgrad(const VolumeField& u) { return symgrad_from(u, nullptr); }

Tensor jacobian_A(const VolumeField& u, const GeometryState& G) {
    check_vector(u);
    Tensor T;
    for (int i = 0; i < 3; ++i) {
        VolumeField gi = grad_A(u.component(i), G);
        for (int j = 0; j < 3; ++j) T[i][j] = gi.component(j);
    }
    return T;
}

VolumeField advect_A(const VolumeField& u, const VolumeField& v, const GeometryState& G) {
    check_vector(u);
    require_same(u.grid(), v.grid());
    VolumeField out(v.grid(), v.arity());
    const std::size_t n = v.grid()->points();
    for (int c = 0; c < v.arity(); ++c) {
        VolumeField gc = grad_A(v.component(c), G);
        for (int j = 0; j < 3; ++j) Kt().mul_add(u.comp(j), gc.comp(j), out.comp(c), n);
    }
    return out;
}

SurfaceVector traction_top(const StressField& S, const SurfaceVector& n) {
    SurfaceVector out;
    for (int i = 0; i < 3; ++i) {
        SurfaceField acc(n[0].grid());
        for (int j = 0; j < 3; ++j) {
            SurfaceField t = S.S[i][j].top();
            Kt().mul_add(t.data(), n[j].data(), acc.data(), acc.size());
        }
        out[i] = std::move(acc);
    }
    return out;
}

VolumeField apply(const Tensor& T, const VolumeField& v) {
    check_vector(v);
    VolumeField out(v.grid(), 3);
    const std::size_t n = v.grid()->points();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Kt().mul_add(T[i][j].data(), v.comp(j), out.comp(i), n);
    return out;
}

double check_div_identity(const VolumeField& v, const GeometryState& G) {
    check_vector(v);
    VolumeField lhs = mul(G.J, div_A(v, G));
    VolumeField rhs = div(apply(G.Minv, v));
    lhs -= rhs;
    return max_abs(lhs);
}

double frobenius_sq_integral(const StressField& S, const VolumeField* weight) {
    const GridPtr& g = S.S[0][0].grid();
    VolumeField acc(g);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Kt().mul_add(S.S[i][j].data(), S.S[i][j].data(), acc.data(), acc.size());
    if (weight) acc = mul(acc, *weight);
    return integrate(acc);
}

}  // namespace fsw
