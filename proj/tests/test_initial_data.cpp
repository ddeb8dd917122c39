#include <gtest/gtest.h>

#include <cmath>

#include "fsw/elliptic.hpp"
#include "fsw/initial_data.hpp"
#include "fsw/operators.hpp"
#include "support.hpp"

using namespace fsw;

namespace {

GridPtr ref_grid() {
    static GridPtr g = Grid::create(GridSpec{});
    return g;
}

SurfaceField ref_eta(const GridPtr& g) {
    return SurfaceField::from_function(g, [](double x1, double x2) { return 0.01 * (std::cos(x1) + 0.5 * std::cos(x2)); });
}

// Violates all three conditions: not divergence free, nonzero on the
// bottom, and shear on the surface.
VolumeField incompatible_u(const GridPtr& g) {
    return VolumeField::from_function3(g, [](double x1, double x2, double z) {
        return std::array<double, 3>{0.05 * std::sin(x2) * (1 + 0.5 * z), 0.03 * std::cos(x1), 0.02 * std::cos(x1 + x2) * (z + 1)};
    });
}

double max_abs(const SurfaceVector& v) {
    return std::max({fsw::max_abs(v[0]), fsw::max_abs(v[1]), fsw::max_abs(v[2])});
}

}  // namespace

TEST(ProjectTangent, NormalIsAnnihilated) {
    auto g = ref_grid();
    gen::Rng r(81);
    SurfaceField eta = gen::random_surface(g, r, 0.1);
    EXPECT_LE(max_abs(project_tangent(normal(eta), eta)), 1e-15);
}

TEST(ProjectTangent, TangentIsKept) {
    auto g = ref_grid();
    gen::Rng r(82);
    SurfaceField eta = gen::random_surface(g, r, 0.1);
    const SurfaceVector N = normal(eta);
    // (1, 0, d1 eta) is tangent to the graph
    SurfaceVector t{SurfaceField::constant(g, 1.0), SurfaceField(g), -1.0 * N[0]};
    SurfaceVector p = project_tangent(t, eta);
    for (int i = 0; i < 3; ++i) EXPECT_LE(fsw::max_abs(p[i] - t[i]), 1e-15);
}

TEST(ProjectTangent, Idempotent) {
    auto g = ref_grid();
    gen::Rng r(83);
    for (int trial = 0; trial < 10; ++trial) {
        SurfaceField eta = gen::random_surface(g, r, 0.1);
        SurfaceVector v{gen::random_surface(g, r, 1), gen::random_surface(g, r, 1), gen::random_surface(g, r, 1)};
        SurfaceVector a = project_tangent(v, eta), b = project_tangent(a, eta);
        for (int i = 0; i < 3; ++i) EXPECT_LE(fsw::max_abs(a[i] - b[i]), 1e-12);
    }
}

// At 16^2 the horizontal truncation of the metric products leaves ~1e-5.
TEST(ProjectDivFree, RandomFieldBecomesDivergenceFree) {
    GridSpec spec;
    spec.n1 = spec.n2 = 32;
    auto g = Grid::create(spec);
    gen::Rng r(84);
    for (int trial = 0; trial < 3; ++trial) {
        GeometryState G = build_geometry(gen::random_surface(g, r, 0.02));
        VolumeField u = gen::random_velocity(g, r, 0.1);
        VolumeField w = project_divA_free(u, G);
        EXPECT_LE(fsw::max_abs(div_A(w, G)), 1e-8);
        EXPECT_LE(fsw::max_abs(project_divA_free(w, G) - w), 1e-10);
    }
}

TEST(ProjectDivFree, GradientIsRemoved) {
    auto g = ref_grid();
    gen::Rng r(85);
    GeometryState G = build_geometry(gen::random_surface(g, r, 0.02));
    VolumeField phi = VolumeField::from_function(g, [](double x1, double x2, double z) { return std::cos(x1 + x2) * z * std::exp(z); });
    VolumeField u = grad_A(phi, G);
    EXPECT_LE(fsw::max_abs(project_divA_free(u, G)), 1e-9 * fsw::max_abs(u));
}

TEST(InitialPressure, ZeroData) {
    auto g = ref_grid();
    EXPECT_EQ(fsw::max_abs(initial_pressure(VolumeField(g, 3), SurfaceField(g), 0.0)), 0.0);
}

// With u0 = 0 the Dirichlet data reduce to eta0 - sigma H0 and every other
// term vanishes.
TEST(InitialPressure, RestingFluidMatchesDirectSolve) {
    auto g = ref_grid();
    const double sigma = 0.2;
    SurfaceField eta0 = ref_eta(g);
    VolumeField p = initial_pressure(VolumeField(g, 3), eta0, sigma);
    GeometryState G = build_geometry(eta0);
    PoissonRhs rhs{VolumeField(g), eta0 - sigma * G.H, SurfaceField(g)};
    VolumeField q = solve_A_poisson(rhs, G).p;
    EXPECT_LE(fsw::max_abs(p - q), 1e-10 * fsw::max_abs(q));
}

TEST(InitialPressure, ResidualOfDefiningProblem) {
    auto g = ref_grid();
    const double sigma = 0.1;
    SurfaceField eta0 = ref_eta(g);
    VolumeField u0 = repair(incompatible_u(g), eta0);
    VolumeField p0 = initial_pressure(u0, eta0, sigma);

    // rebuild the data from public pieces
    const SurfaceField eta_t = kinematic_flux(u0, build_geometry(eta0));
    GeometryState G = build_geometry(eta0, &eta_t);
    FluidState s;
    s.u = u0;
    s.p = p0;
    s.eta = eta0;
    s.geometry = std::make_shared<const GeometryState>(G);
    PoissonRhs rhs;
    rhs.divergence_form = true;
    rhs.f1 = VolumeField(g);
    rhs.g0 = -1.0 * div_A(fsw::apply(G.R, u0), G);
    rhs.Gvec = -1.0 * forcing_F(s, sigma, eta_t).F1;
    SurfaceVector sn = traction_top(symgrad_A(u0, G), G.N);
    SurfaceField nn = mul(G.N[0], G.N[0]) + mul(G.N[1], G.N[1]) + mul(G.N[2], G.N[2]);
    SurfaceField c = mul(sn[0], G.N[0]) + mul(sn[1], G.N[1]) + mul(sn[2], G.N[2]);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] /= nn[i];
    rhs.f2 = c + eta0 - sigma * G.H;
    rhs.f3 = -1.0 * lap_A(u0, G).bottom(2);
    EXPECT_LE(A_poisson_residual(rhs, G, p0), 1e-8);
}

TEST(InitialAccel, ZeroData) {
    auto g = ref_grid();
    EXPECT_EQ(fsw::max_abs(initial_accel(VolumeField(g, 3), VolumeField(g), SurfaceField(g))), 0.0);
}

TEST(InitialAccel, LiesInDivergenceFreeSpace) {
    auto g = ref_grid();
    PreparedData d = prepare(VolumeField(g, 3), ref_eta(g), 0.1);
    EXPECT_GT(fsw::max_abs(d.accel), 1e-3);
    EXPECT_LE(fsw::max_abs(div_A(d.accel, *d.state.geometry)), 1e-9 * fsw::max_abs(d.accel));
}

// Resting fluid under a displaced surface: the first step's difference
// quotient approximates d_t u(0).
TEST(InitialAccel, MatchesFirstStepDifference) {
    auto g = ref_grid();
    PreparedData d = prepare(VolumeField(g, 3), ref_eta(g), 0.1);
    SchemeConfig c;
    c.sigma = 0.1;
    c.dt = 1e-4;
    FluidState s1 = step(d.state, c);
    VolumeField fd = s1.u - d.state.u;
    fd *= 1.0 / c.dt;
    EXPECT_LE(norm_l2(fd - d.du_dt), 0.25 * norm_l2(d.du_dt));
    // with u0 = 0 the frame term vanishes
    EXPECT_LE(fsw::max_abs(d.du_dt - d.accel), 1e-15);
}

TEST(Compatibility, ZeroDataPasses) {
    auto g = ref_grid();
    CompatibilityReport r = check_compatibility(VolumeField(g, 3), SurfaceField(g), 0.0);
    EXPECT_EQ(r.div_residual, 0.0);
    EXPECT_EQ(r.bottom_residual, 0.0);
    EXPECT_EQ(r.tangential_residual, 0.0);
    EXPECT_TRUE(r.pass());
}

TEST(Compatibility, BottomTraceReported) {
    auto g = ref_grid();
    // divergence free and shear free, but slipping on the bottom
    VolumeField u = VolumeField::from_function3(g, [](double, double, double) { return std::array<double, 3>{0.3, 0.0, 0.0}; });
    CompatibilityReport r = check_compatibility(u, SurfaceField(g), 0.0);
    EXPECT_DOUBLE_EQ(r.bottom_residual, 0.3);
    EXPECT_FALSE(r.pass());
}

TEST(Compatibility, ResidualsNonnegative) {
    auto g = ref_grid();
    gen::Rng r(86);
    for (int trial = 0; trial < 5; ++trial) {
        CompatibilityReport c = check_compatibility(gen::random_velocity(g, r, 0.1), gen::random_surface(g, r, 0.02), 0.1);
        EXPECT_GE(c.div_residual, 0.0);
        EXPECT_GE(c.bottom_residual, 0.0);
        EXPECT_GE(c.tangential_residual, 0.0);
    }
}

TEST(Repair, IncompatibleFixtureIsFixed) {
    auto g = ref_grid();
    for (double sigma : {0.0, 0.1}) {
        PreparedData d = prepare(incompatible_u(g), ref_eta(g), sigma);
        EXPECT_FALSE(d.before.pass());
        EXPECT_TRUE(d.after.pass()) << d.after.div_residual << " " << d.after.bottom_residual << " "
                                    << d.after.tangential_residual;
    }
}

TEST(Repair, Idempotent) {
    auto g = ref_grid();
    SurfaceField eta0 = ref_eta(g);
    VolumeField u = repair(incompatible_u(g), eta0);
    EXPECT_LE(fsw::max_abs(repair(u, eta0) - u), 1e-10);
}

TEST(Repair, ZeroStaysZero) {
    auto g = ref_grid();
    EXPECT_EQ(fsw::max_abs(repair(VolumeField(g, 3), ref_eta(g))), 0.0);
}
