#include <gtest/gtest.h>

#include <cmath>

#include "fsw/errors.hpp"
#include "fsw/harness.hpp"
#include "support.hpp"

using namespace fsw;

namespace {

GridPtr small_grid() {
    static GridPtr g = Grid::create(GridSpec{16, 16, 9});
    return g;
}

ExperimentConfig short_config() {
    ExperimentConfig c;
    c.grid = small_grid()->spec();
    c.scheme.dt = 0.01;
    c.scheme.end_time = 0.1;
    c.scheme.sigma = 0.1;
    c.diag_stride = 5;
    c.compare_stride = 2;
    c.threads = 1;
    return c;
}

const SweepRun& run_at(const SweepResult& r, double v) {
    for (const auto& x : r.runs)
        if (x.value == v) return x;
    throw std::runtime_error("value not in sweep");
}

}  // namespace

TEST(Fit, ExactLine) {
    LinearFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    EXPECT_NEAR(f.slope, 2.0, 1e-15);
    EXPECT_NEAR(f.intercept, 1.0, 1e-15);
    EXPECT_NEAR(f.r2, 1.0, 1e-15);
}

TEST(Fit, DegenerateInputs) {
    EXPECT_EQ(fit_line({1}, {2}).slope, 0.0);
    EXPECT_EQ(fit_line({1, 1}, {2, 3}).r2, 0.0);
}

TEST(Fit, NoisyLineHasLowerR2) {
    gen::Rng r(101);
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(i);
        y.push_back(0.5 * i + gen::uniform(r, -5, 5));
    }
    LinearFit f = fit_line(x, y);
    EXPECT_GT(f.r2, 0.0);
    EXPECT_LT(f.r2, 1.0);
}

TEST(Fit, OrderOfPowerLaw) {
    gen::Rng r(102);
    for (int trial = 0; trial < 10; ++trial) {
        const double p = gen::uniform(r, 0.5, 3), c = gen::uniform(r, 0.1, 10);
        std::vector<double> v{1.0, 0.1, 0.01, 0.001, 0.0}, m;
        for (double x : v) m.push_back(c * std::pow(x, p));
        EXPECT_NEAR(fitted_order(v, m), p, 1e-12);
    }
}

TEST(Fit, OrderUsesSmallestValues) {
    // power 1 below 0.1, flat above
    std::vector<double> v{10, 1, 0.1, 0.01, 0.001}, m{1, 1, 0.1, 0.01, 0.001};
    EXPECT_NEAR(fitted_order(v, m), 1.0, 1e-12);
}

TEST(Fit, OrderUndefinedWithoutPoints) {
    EXPECT_TRUE(std::isnan(fitted_order({0.0, 1.0}, {0.0, 1.0})));
    EXPECT_TRUE(std::isnan(fitted_order({}, {})));
}

TEST(Fit, Nonincreasing) {
    EXPECT_TRUE(nonincreasing({1, 0.1, 0.01}, {3, 2, 1}));
    EXPECT_TRUE(nonincreasing({0.01, 1, 0.1}, {1, 3, 2}));
    EXPECT_FALSE(nonincreasing({1, 0.1, 0.01}, {1, 2, 3}));
    // within slack
    EXPECT_TRUE(nonincreasing({1, 0.1}, {1.0, 1.04}));
    EXPECT_FALSE(nonincreasing({1, 0.1}, {1.0, 1.06}));
}

TEST(Sweep, ZeroValuesGiveZeroDistance) {
    auto g = small_grid();
    SweepResult r = run_sigma_sweep(short_config(), reference_data(g), {0.0, 0.0});
    ASSERT_EQ(r.runs.size(), 2u);
    EXPECT_TRUE(r.complete);
    for (const auto& x : r.runs) EXPECT_EQ(x.metric, 0.0);
    EXPECT_EQ(r.runs[0].summary.steps, 10);
}

TEST(Sweep, BaselineAddedWhenMissing) {
    auto g = small_grid();
    SweepResult r = run_sigma_sweep(short_config(), reference_data(g), {0.1});
    ASSERT_EQ(r.runs.size(), 1u);
    EXPECT_GT(r.runs[0].metric, 0.0);
    EXPECT_FALSE(r.runs[0].reports.empty());
    EXPECT_EQ(r.parameter, "sigma");
}

TEST(Sweep, PermutationAndThreadsDoNotMatter) {
    auto g = small_grid();
    ExperimentConfig c = short_config();
    SweepResult a = run_sigma_sweep(c, reference_data(g), {0.1, 0.01, 0.0});
    c.threads = 2;
    SweepResult b = run_sigma_sweep(c, reference_data(g), {0.0, 0.01, 0.1});
    for (double v : {0.1, 0.01, 0.0}) EXPECT_EQ(run_at(a, v).metric, run_at(b, v).metric);
    EXPECT_EQ(a.order, b.order);
}

TEST(Sweep, DistanceShrinksWithSigma) {
    auto g = small_grid();
    SweepResult r = run_sigma_sweep(short_config(), reference_data(g), {0.1, 0.01, 0.001});
    EXPECT_TRUE(r.monotone);
    EXPECT_GT(run_at(r, 0.1).metric, run_at(r, 0.001).metric);
    EXPECT_TRUE(std::isfinite(r.order));
}

TEST(Sweep, NegativeValueRejected) {
    auto g = small_grid();
    EXPECT_THROW(run_sigma_sweep(short_config(), reference_data(g), {0.1, -0.1}), ValidationError);
}

TEST(Sweep, KappaNeedsPositiveSigma) {
    auto g = small_grid();
    ExperimentConfig c = short_config();
    c.scheme.sigma = 0.0;
    EXPECT_THROW(run_kappa_sweep(c, reference_data(g), {0.1}), ValidationError);
}

TEST(Sweep, KappaZeroIsBaseline) {
    auto g = small_grid();
    SweepResult r = run_kappa_sweep(short_config(), reference_data(g), {0.0});
    ASSERT_EQ(r.runs.size(), 1u);
    EXPECT_EQ(r.runs[0].metric, 0.0);
    EXPECT_EQ(r.parameter, "kappa");
}

TEST(Sweep, DegenerateInitialSurfaceThrows) {
    auto g = small_grid();
    ExperimentConfig c = short_config();
    c.scheme.j_floor = 0.95;
    InitialData d = reference_data(g);
    d.eta0 = SurfaceField::from_function(g, [](double x1, double) { return 0.1 * std::cos(x1); });
    EXPECT_THROW(run_sigma_sweep(c, d, {0.1, 0.0}), DegenerateMap);
}

TEST(Decay, EquilibriumIsDegenerate) {
    auto g = small_grid();
    ExperimentConfig c = short_config();
    DecayReport r = run_decay(c, InitialData{VolumeField(g, 3), SurfaceField(g)}, DecayWindow{0.0, 0.1});
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.summary.steps, 10);
}

TEST(Decay, WindowChecks) {
    auto g = small_grid();
    ExperimentConfig c = short_config();
    EXPECT_THROW(run_decay(c, reference_data(g), DecayWindow{1.0, 1.0}), ValidationError);
    // only the report at t = 0.1 falls in the window
    EXPECT_THROW(run_decay(c, reference_data(g), DecayWindow{0.08, 0.5}), FitUnreliable);
}

TEST(Decay, ShortRunDecays) {
    auto g = small_grid();
    ExperimentConfig c = short_config();
    c.scheme.end_time = 0.5;
    c.diag_stride = 5;
    DecayReport r = run_decay(c, reference_data(g), DecayWindow{0.1, 0.5});
    EXPECT_FALSE(r.degenerate);
    EXPECT_TRUE(r.monotone);
    EXPECT_GT(r.rate, 0.0);
    EXPECT_EQ(r.best_model, "exponential");
    EXPECT_FALSE(r.has_algebraic);
}

// nz = 9 is too coarse for the A-Stokes iteration to reach 1e-10.
TEST(Audit, IncompatibleFixture) {
    auto g = Grid::create(GridSpec{16, 16, 17});
    VolumeField u = VolumeField::from_function3(g, [](double x1, double x2, double z) {
        return std::array<double, 3>{0.05 * std::sin(x2) * (1 + 0.5 * z), 0.03 * std::cos(x1), 0.02 * std::cos(x1 + x2) * (z + 1)};
    });
    AuditReport a = audit_data(u, reference_data(g).eta0, 0.1);
    EXPECT_FALSE(a.before.pass());
    EXPECT_TRUE(a.after.pass());
    EXPECT_GT(a.repair_change, 0.0);
    EXPECT_LE(a.idempotence, 1e-10);
    EXPECT_GT(a.p0_norm, 0.0);
    EXPECT_GT(a.accel_norm, 0.0);
    EXPECT_NEAR(a.eta0_norm, surface_norm(reference_data(g).eta0, 1.5), 0.0);
}

TEST(Audit, CompatibleDataUnchanged) {
    auto g = small_grid();
    AuditReport a = audit_data(VolumeField(g, 3), reference_data(g).eta0, 0.1);
    EXPECT_TRUE(a.before.pass());
    EXPECT_EQ(a.repair_change, 0.0);
    EXPECT_EQ(a.u0_norm, 0.0);
}
