#include <gtest/gtest.h>

#include <cmath>

#include "fsw/dynamics.hpp"
#include "fsw/errors.hpp"
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

// Smooth state with u = 0 on the bottom, used by the oracle comparisons.
struct Data {
    static double eta(double x1, double x2) { return 0.02 * std::cos(x1) + 0.01 * std::sin(x1 + x2); }
    static std::array<double, 3> u(double x1, double x2, double z) {
        const double w = z * (z + 1);
        return {0.3 * w * std::sin(x2), 0.2 * w * std::cos(x1), 0.4 * w * w * std::cos(x1 + x2)};
    }
    static double p(double x1, double x2, double z) { return 0.5 * std::cos(x1) * std::exp(z) + 0.1 * std::sin(x2); }
};

FluidState data_state(const GridPtr& g) {
    return make_state(VolumeField::from_function3(g, Data::u), VolumeField::from_function(g, Data::p),
                      SurfaceField::from_function(g, Data::eta));
}

// The top forcing assembled from the full operators:
// (pI - D u) e3 - S_A(p,u) N + eta N - sigma H N - (eta - sigma Lap eta) e3
SurfaceVector g3_oracle(const FluidState& s, double sigma) {
    const GeometryState& G = *s.geometry;
    SurfaceVector tA = traction_top(stress_A(s.p, s.u, G), G.N);
    StressField D = symgrad(s.u);
    SurfaceField leta = lap(s.eta);
    SurfaceVector out;
    for (int i = 0; i < 3; ++i) {
        SurfaceField v = D.S[i][2].top();
        v *= -1.0;
        if (i == 2) v += s.p.top();
        v -= tA[i];
        v += mul(s.eta, G.N[i]);
        v.axpy(-sigma, mul(G.H, G.N[i]));
        if (i == 2) {
            v -= s.eta;
            v.axpy(sigma, leta);
        }
        out[i] = v;
    }
    return out;
}

}  // namespace

TEST(Scheme, Validation) {
    SchemeConfig c;
    EXPECT_NO_THROW(validate(c));
    c.dt = 0;
    EXPECT_THROW(validate(c), ValidationError);
    c = {};
    c.sigma = -1;
    EXPECT_THROW(validate(c), ValidationError);
    c = {};
    c.kappa = -1e-3;
    EXPECT_THROW(validate(c), ValidationError);
    c = {};
    c.compensator_tau = 0;
    EXPECT_THROW(validate(c), ValidationError);
}

TEST(Scheme, StepCount) {
    SchemeConfig c;
    c.dt = 2e-3;
    c.end_time = 5.0;
    EXPECT_EQ(step_count(c), 2500);
    c.end_time = 0.0;
    EXPECT_EQ(step_count(c), 0);
}

TEST(Forcing, ZeroStateGivesZero) {
    auto g = ref_grid();
    FluidState s = zero_state(g);
    ForcingG G = forcing_G(s, 0.3, SurfaceField(g));
    EXPECT_EQ(max_abs(G.G1), 0.0);
    EXPECT_EQ(max_abs(G.G2), 0.0);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(max_abs(G.G3[i]), 0.0);
    EXPECT_EQ(max_abs(G.G4), 0.0);
}

// At the identity geometry every (Acal - I), (K - 1) and d_i eta factor vanishes.
TEST(Forcing, FlatSurfaceWithMotion) {
    auto g = ref_grid();
    gen::Rng r(71);
    VolumeField u = gen::random_velocity(g, r, 0.5);
    FluidState s = make_state(u, gen::random_scalar(g, r, 0.5), SurfaceField(g));
    const SurfaceField eta_t = surface_velocity(s, 0.0, nullptr);
    EXPECT_LE(max_abs(eta_t - u.top(2)), 1e-15);
    ForcingG G = forcing_G(s, 0.5, eta_t);
    EXPECT_EQ(max_abs(G.G2), 0.0);
    for (int i = 0; i < 3; ++i) EXPECT_LE(max_abs(G.G3[i]), 1e-15);
    EXPECT_EQ(max_abs(G.G4), 0.0);

    // G1 = F1 = dealias(d_t eta_bar b~ d3 u - u . grad u)
    const VolumeField coef = mul(poisson_extend(u.top(2)), btilde(g));
    const VolumeField dz = d3(u);
    VolumeField e(g, 3);
    for (int c = 0; c < 3; ++c) {
        VolumeField t = mul(coef, dz.component(c));
        const VolumeField gc = grad(u.component(c));
        for (int j = 0; j < 3; ++j) t -= mul(u.component(j), gc.component(j));
        e.set_component(c, dealias(t));
    }
    EXPECT_LE(max_abs(G.G1 - e), 1e-13);
    ForcingF F = forcing_F(s, 0.5, eta_t);
    EXPECT_LE(max_abs(F.F1 - e), 1e-13);
    for (int i = 0; i < 3; ++i) EXPECT_LE(max_abs(F.F3[i]), 1e-15);
}

TEST(Forcing, RestingFluid) {
    auto g = ref_grid();
    gen::Rng r(72);
    const double sigma = 0.4;
    SurfaceField eta = gen::random_surface(g, r, 0.05);
    FluidState s = make_state(VolumeField(g, 3), VolumeField(g), eta);
    ForcingF F = forcing_F(s, sigma, SurfaceField(g));
    EXPECT_EQ(max_abs(F.F1), 0.0);
    EXPECT_EQ(max_abs(F.F4), 0.0);
    const GeometryState& G = *s.geometry;
    for (int i = 0; i < 3; ++i) {
        SurfaceField e = mul(eta, G.N[i]);
        e.axpy(-sigma, mul(G.H, G.N[i]));
        EXPECT_LE(max_abs(F.F3[i] - dealias(e)), 1e-15);
    }
}

// Fine-grid oracle: the top forcing against the operator composition on a
// 64 x 64 grid, sampled at the coarse nodes.
TEST(Forcing, G3MatchesFineGridOracle) {
    const double sigma = 0.3;
    auto gc = Grid::create(GridSpec{16, 16, 33});
    auto gf = Grid::create(GridSpec{64, 64, 33});
    FluidState c = data_state(gc), f = data_state(gf);
    ForcingG Gc = forcing_G(c, sigma, surface_velocity(c, 0.0, nullptr));
    SurfaceVector O = g3_oracle(f, sigma);
    for (int i = 0; i < 3; ++i) {
        double e = 0, m = 0;
        for (int a = 0; a < 16; ++a)
            for (int b = 0; b < 16; ++b) {
                e = std::max(e, std::abs(Gc.G3[i](a, b) - O[i](4 * a, 4 * b)));
                m = std::max(m, std::abs(O[i](4 * a, 4 * b)));
            }
        EXPECT_LE(e, 1e-6 * m) << "component " << i;
    }
}

TEST(Forcing, F1MatchesFineGridOracle) {
    auto gc = Grid::create(GridSpec{16, 16, 33});
    auto gf = Grid::create(GridSpec{64, 64, 33});
    FluidState c = data_state(gc), f = data_state(gf);
    ForcingF Fc = forcing_F(c, 0.0, surface_velocity(c, 0.0, nullptr));
    // undealiased products on the fine grid
    const GeometryState& G = *f.geometry;
    const VolumeField coef = mul(poisson_extend(surface_velocity(f, 0.0, nullptr)), btilde(gf), G.K);
    const VolumeField dz = d3(f.u), adv = advect_A(f.u, f.u, G);
    for (int comp = 0; comp < 3; ++comp) {
        const VolumeField o = mul(coef, dz.component(comp)) - adv.component(comp);
        double e = 0, m = 0;
        for (int iz = 0; iz < 33; ++iz)
            for (int a = 0; a < 16; ++a)
                for (int b = 0; b < 16; ++b) {
                    e = std::max(e, std::abs(Fc.F1(a, b, iz, comp) - o(4 * a, 4 * b, iz)));
                    m = std::max(m, std::abs(o(4 * a, 4 * b, iz)));
                }
        EXPECT_LE(e, 1e-6 * m) << "component " << comp;
    }
}

TEST(Forcing, KinematicFlux) {
    auto g = ref_grid();
    FluidState s = data_state(g);
    const GeometryState& G = *s.geometry;
    SurfaceField e = s.u.top(2);
    e += mul(s.u.top(0), G.N[0]);
    e += mul(s.u.top(1), G.N[1]);
    EXPECT_LE(max_abs(kinematic_flux(s.u, G) - e), 1e-6 * max_abs(e));
}

TEST(Compensator, Cases) {
    auto g = ref_grid();
    Compensator z(SurfaceField(g), 1.0);
    EXPECT_EQ(max_abs(z(0.0)), 0.0);
    EXPECT_FALSE(Compensator().active());

    // single mode m = 2: Psi(0) = |k|^2 eta0
    SurfaceField eta0 = SurfaceField::from_function(g, [](double x1, double) { return 0.01 * std::cos(2 * x1); });
    Compensator psi(eta0, 0.5);
    EXPECT_LE(max_abs(psi(0.0) - 4.0 * eta0), 1e-15);
    double prev = max_abs(psi(0.0));
    for (double t : {0.1, 0.5, 1.0, 5.0, 50.0}) {
        const double m = max_abs(psi(t));
        EXPECT_LT(m, prev);
        prev = m;
    }
    EXPECT_LE(prev, 1e-40);
    EXPECT_THROW(Compensator(eta0, 0.0), ValidationError);
}

TEST(Compensator, CancelsKappaTermAtStart) {
    auto g = ref_grid();
    gen::Rng r(73);
    SurfaceField eta0 = gen::random_surface(g, r, 0.02);
    Compensator psi(eta0, 1.0);
    SurfaceField sum = lap(eta0) + psi(0.0);
    EXPECT_LE(max_abs(sum), 1e-15);

    FluidState s = make_state(gen::random_velocity(g, r, 0.01), VolumeField(g), eta0);
    SchemeConfig a, b;
    a.kappa = 1e-2;
    b.kappa = 0.0;
    EXPECT_LE(max_abs(surface_rhs(s, a, psi) - surface_rhs(s, b, Compensator())), 1e-12);
}

TEST(Step, EquilibriumIsFixed) {
    auto g = ref_grid();
    for (StepMode mode : {StepMode::Split, StepMode::Coupled})
        for (double sigma : {0.0, 1.0})
            for (double kappa : {0.0, 0.1})
                for (double dt : {1e-3, 1e-2}) {
                    SchemeConfig c;
                    c.mode = mode;
                    c.sigma = sigma;
                    c.kappa = kappa;
                    c.dt = dt;
                    FluidState s = zero_state(g);
                    Stepper st(g, c, Compensator(SurfaceField(g), 1.0));
                    for (int k = 0; k < 3; ++k) s = st.step(s);
                    EXPECT_LE(max_abs(s.u), 1e-13);
                    EXPECT_LE(max_abs(s.p), 1e-13);
                    EXPECT_LE(max_abs(s.eta), 1e-13);
                }
}

TEST(Step, EndTimeZeroReturnsInitial) {
    auto g = ref_grid();
    FluidState s = make_state(VolumeField(g, 3), VolumeField(g), ref_eta(g));
    SchemeConfig c;
    c.end_time = 0.0;
    long seen = -1;
    SimulationSummary sum = simulate(s, c, {Observer{1, [&](const FluidState&, long k) { seen = k; }}});
    EXPECT_EQ(sum.steps, 0);
    EXPECT_EQ(seen, 0);
    EXPECT_EQ(max_abs(sum.final_state.eta - s.eta), 0.0);
    EXPECT_EQ(sum.final_state.t, 0.0);
}

TEST(Step, ObserverSchedule) {
    auto g = ref_grid();
    SchemeConfig c;
    c.dt = 1e-2;
    c.end_time = 0.075;  // 8 steps
    std::vector<long> seen;
    std::vector<double> times;
    simulate(zero_state(g), c, {Observer{3, [&](const FluidState& s, long k) {
                                    seen.push_back(k);
                                    times.push_back(s.t);
                                }}});
    EXPECT_EQ(seen, (std::vector<long>{0, 3, 6, 8}));
    EXPECT_DOUBLE_EQ(times.back(), 0.08);
}

TEST(Step, DegenerateMapStopsRun) {
    auto g = ref_grid();
    FluidState s = make_state(VolumeField(g, 3), VolumeField(g),
                              SurfaceField::from_function(g, [](double x1, double) { return 0.04 * std::cos(x1); }));
    SchemeConfig c;
    c.end_time = 0.01;
    c.j_floor = 0.95;  // min J of the initial map is 0.92
    SimulationSummary sum = simulate(s, c, {});
    EXPECT_TRUE(sum.aborted);
    EXPECT_EQ(sum.steps, 0);
    EXPECT_EQ(max_abs(sum.final_state.eta - s.eta), 0.0);
}

TEST(Step, RejectionStopsRun) {
    auto g = ref_grid();
    FluidState s = make_state(VolumeField(g, 3), VolumeField(g), ref_eta(g));
    SchemeConfig c;
    c.end_time = 0.01;
    c.div_iterations = 0;
    c.div_tol = 1e-300;
    SimulationSummary sum = simulate(s, c, {});
    EXPECT_TRUE(sum.aborted);
    EXPECT_EQ(sum.rejections, 1);
    EXPECT_FALSE(sum.failure.empty());
}

TEST(Step, AdmissibleAfterStep) {
    auto g = ref_grid();
    FluidState s = make_state(VolumeField(g, 3), VolumeField(g), ref_eta(g));
    for (StepMode mode : {StepMode::Split, StepMode::Coupled}) {
        SchemeConfig c;
        c.sigma = 0.1;
        c.mode = mode;
        FluidState n = step(step(s, c), c);
        EXPECT_LE(max_abs(div_A(n.u, *n.geometry)), c.div_tol);
        for (int i = 0; i < 3; ++i) EXPECT_EQ(max_abs(n.u.bottom(i)), 0.0);
        EXPECT_EQ(max_abs(n.geometry->eta - n.eta), 0.0);
    }
}

// Products of a mode with itself land on the Nyquist mode when 2k = n1/2.
TEST(Step, HalfNyquistModeIsAccepted) {
    auto g = Grid::create(GridSpec{32, 4, 17});
    SurfaceField eta = SurfaceField::from_function(g, [](double x1, double) { return 0.001 * std::cos(8 * x1); });
    SchemeConfig c;
    c.dt = 1e-3;
    c.end_time = 0.005;
    SimulationSummary sum = simulate(make_state(VolumeField(g, 3), VolumeField(g), eta), c, {});
    EXPECT_FALSE(sum.aborted) << sum.failure;
    EXPECT_EQ(sum.steps, 5);
}

TEST(Step, Deterministic) {
    auto g = ref_grid();
    FluidState s = make_state(VolumeField(g, 3), VolumeField(g), ref_eta(g));
    SchemeConfig c;
    c.sigma = 0.1;
    c.end_time = 0.02;
    SimulationSummary a = simulate(s, c, {}), b = simulate(s, c, {});
    EXPECT_EQ(max_abs(a.final_state.u - b.final_state.u), 0.0);
    EXPECT_EQ(max_abs(a.final_state.eta - b.final_state.eta), 0.0);
}

// Mass and amplitude along the first unit of the reference run.
TEST(Step, ReferenceRunMassAndDecay) {
    auto g = ref_grid();
    FluidState s = make_state(VolumeField(g, 3), VolumeField(g), ref_eta(g));
    SchemeConfig c;
    c.sigma = 0.1;
    c.end_time = 1.0;
    double worst_mass = 0;
    std::vector<double> amp;
    simulate(s, c, {Observer{1, [&](const FluidState& st, long k) {
                         worst_mass = std::max(worst_mass, std::abs(mean(st.eta)));
                         if (k % 50 == 0) amp.push_back(max_abs(st.eta));
                     }}});
    EXPECT_LE(worst_mass, 1e-10);
    ASSERT_GE(amp.size(), 10u);
    for (std::size_t i = 2; i < amp.size(); ++i) EXPECT_LT(amp[i], amp[i - 1]) << i;
}

TEST(Step, SelfConvergenceFirstOrder) {
    auto g = ref_grid();
    SurfaceField eta0 = SurfaceField::from_function(g, [](double x1, double) { return 0.01 * std::cos(x1); });
    for (StepMode mode : {StepMode::Split, StepMode::Coupled}) {
        SurfaceField e[3];
        const double dts[3] = {8e-3, 4e-3, 2e-3};
        for (int k = 0; k < 3; ++k) {
            SchemeConfig c;
            c.sigma = 0.1;
            c.dt = dts[k];
            c.end_time = 0.4;
            c.mode = mode;
            e[k] = simulate(make_state(VolumeField(g, 3), VolumeField(g), eta0), c, {}).final_state.eta;
        }
        const double ratio = max_abs(e[0] - e[1]) / max_abs(e[1] - e[2]);
        EXPECT_NEAR(ratio, 2.0, 0.4) << (mode == StepMode::Split ? "split" : "coupled");
    }
}
