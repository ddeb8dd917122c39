#include "fsw/initial_data.hpp"

#include "fsw/elliptic.hpp"
#include "fsw/errors.hpp"
#include "fsw/operators.hpp"

namespace fsw {

namespace {

SurfaceField dot(const SurfaceVector& a, const SurfaceVector& b) {
    SurfaceField s = mul(a[0], b[0]);
    s += mul(a[1], b[1]);
    s += mul(a[2], b[2]);
    return s;
}

// v . N / |N|^2
SurfaceField normal_coefficient(const SurfaceVector& v, const SurfaceVector& N) {
    SurfaceField c = dot(v, N);
    const SurfaceField nn = dot(N, N);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] /= nn[i];
    return c;
}

SurfaceVector strain_normal(const VolumeField& u, const GeometryState& G) {
    return traction_top(symgrad_A(u, G), G.N);
}

GeometryState geometry_with_rate(const VolumeField& u0, const SurfaceField& eta0) {
    const GeometryState G0 = build_geometry(eta0);
    const SurfaceField eta_t = kinematic_flux(u0, G0);
    return build_geometry(eta0, &eta_t);
}

FluidState state_on(const VolumeField& u0, const VolumeField& p0, const SurfaceField& eta0,
                    const GeometryState& G) {
    FluidState s;
    s.u = u0;
    s.p = p0;
    s.eta = eta0;
    s.geometry = std::make_shared<const GeometryState>(G);
    return s;
}

}  // namespace

SurfaceVector project_tangent(const SurfaceVector& v, const SurfaceField& eta0) {
    const SurfaceVector N = normal(eta0);
    const SurfaceField c = normal_coefficient(v, N);
    SurfaceVector out = v;
    for (int i = 0; i < 3; ++i) out[i] -= mul(c, N[i]);
    return out;
}

VolumeField project_divA_free(const VolumeField& u, const GeometryState& G, double tol) {
    if (u.arity() != 3) throw GridMismatch("velocity must be a vector field");
    const GridPtr& g = u.grid();
    PoissonRhs rhs;
    rhs.f1 = VolumeField(g);
    rhs.f2 = SurfaceField(g);
    rhs.f3 = SurfaceField(g);
    rhs.divergence_form = true;
    rhs.g0 = VolumeField(g);
    rhs.Gvec = -1.0 * u;
    APoissonResult phi = solve_A_poisson(rhs, G, tol);
    return u - grad_A(phi.p, G);
}

VolumeField initial_pressure(const VolumeField& u0, const SurfaceField& eta0, double sigma) {
    const GridPtr& g = u0.grid();
    const GeometryState G = geometry_with_rate(u0, eta0);
    const FluidState s = state_on(u0, VolumeField(g), eta0, G);
    PoissonRhs rhs;
    rhs.f1 = VolumeField(g);
    rhs.divergence_form = true;
    rhs.g0 = -1.0 * div_A(apply(G.R, u0), G);
    rhs.Gvec = -1.0 * forcing_F(s, sigma, G.eta_t).F1;
    // (F3 + D_A u0 N) . N / |N|^2 with F3 = (eta - sigma H) N
    rhs.f2 = normal_coefficient(strain_normal(u0, G), G.N);
    rhs.f2 += eta0;
    rhs.f2.axpy(-sigma, G.H);
    // Lap_A u0 . nu with nu = -e3
    rhs.f3 = lap_A(u0, G).bottom(2);
    rhs.f3 *= -1.0;
    return solve_A_poisson(rhs, G).p;
}

VolumeField initial_accel(const VolumeField& u0, const VolumeField& p0, const SurfaceField& eta0) {
    const GeometryState G = geometry_with_rate(u0, eta0);
    const FluidState s = state_on(u0, p0, eta0, G);
    VolumeField a = lap_A(u0, G);
    a -= grad_A(p0, G);
    a += forcing_F(s, 0.0, G.eta_t).F1;
    a -= apply(G.R, u0);
    return a;
}

VolumeField initial_du_dt(const VolumeField& u0, const VolumeField& p0, const SurfaceField& eta0) {
    const GeometryState G = geometry_with_rate(u0, eta0);
    VolumeField a = initial_accel(u0, p0, eta0);
    a += apply(G.R, u0);
    return a;
}

CompatibilityReport check_compatibility(const VolumeField& u0, const SurfaceField& eta0, double sigma) {
    const GeometryState G = build_geometry(eta0);
    CompatibilityReport r;
    r.div_residual = max_abs(div_A(u0, G));
    for (int c = 0; c < 3; ++c) r.bottom_residual = std::max(r.bottom_residual, max_abs(u0.bottom(c)));
    SurfaceVector t = strain_normal(u0, G);
    for (int i = 0; i < 3; ++i) {
        SurfaceField f3 = mul(eta0, G.N[i]);
        f3.axpy(-sigma, mul(G.H, G.N[i]));
        t[i] += f3;
    }
    t = project_tangent(t, eta0);
    for (int i = 0; i < 3; ++i) r.tangential_residual = std::max(r.tangential_residual, max_abs(t[i]));
    return r;
}

VolumeField repair(const VolumeField& u0, const SurfaceField& eta0) {
    if (u0.arity() != 3) throw GridMismatch("velocity must be a vector field");
    const GridPtr& g = u0.grid();
    const GeometryState G = build_geometry(eta0);
    const VolumeField F1 = div_stress_A(VolumeField(g), u0, G);
    const SurfaceField c = normal_coefficient(strain_normal(u0, G), G.N);
    SurfaceVector F3;
    for (int i = 0; i < 3; ++i) F3[i] = -1.0 * mul(c, G.N[i]);
    return solve_A_stokes(F1, VolumeField(g), F3, G).u;
}

PreparedData prepare(const VolumeField& u0, const SurfaceField& eta0, double sigma) {
    PreparedData d;
    d.before = check_compatibility(u0, eta0, sigma);
    VolumeField u = repair(u0, eta0);
    d.after = check_compatibility(u, eta0, sigma);
    VolumeField p = initial_pressure(u, eta0, sigma);
    d.accel = initial_accel(u, p, eta0);
    d.du_dt = initial_du_dt(u, p, eta0);
    d.state = make_state(std::move(u), std::move(p), eta0);
    return d;
}

}  // namespace fsw
