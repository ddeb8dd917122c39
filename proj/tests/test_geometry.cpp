#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fsw/errors.hpp"
#include "fsw/geometry.hpp"
#include "support.hpp"

using namespace fsw;

namespace {

GridPtr ref_grid() {
    static GridPtr g = Grid::create(GridSpec{});
    return g;
}

double max_pointwise_product_error(const Tensor& A, const Tensor& B) {
    const std::size_t n = A[0][0].size();
    double e = 0;
    for (std::size_t p = 0; p < n; ++p)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += A[i][k][p] * B[k][j][p];
                e = std::max(e, std::abs(s - (i == j ? 1.0 : 0.0)));
            }
    return e;
}

}  // namespace

TEST(PoissonExtend, Zero) {
    auto g = ref_grid();
    EXPECT_EQ(max_abs(poisson_extend(SurfaceField(g))), 0.0);
}

TEST(PoissonExtend, SingleModeClosedForm) {
    auto g = ref_grid();
    const double k = 2 * M_PI / g->l1();
    SurfaceField eta = SurfaceField::from_function(g, [&](double x1, double) { return std::cos(k * x1); });
    VolumeField e = VolumeField::from_function(g, [&](double x1, double, double x3) { return std::cos(k * x1) * std::exp(k * x3); });
    EXPECT_LE(max_abs(poisson_extend(eta) - e), 1e-10);
}

TEST(PoissonExtend, ConstantAtEveryDepth) {
    auto g = ref_grid();
    VolumeField e = poisson_extend(SurfaceField::constant(g, 0.3));
    EXPECT_LE(max_abs(e - VolumeField::constant(g, 0.3)), 1e-15);
}

TEST(PoissonExtend, TraceIsEta) {
    auto g = ref_grid();
    gen::Rng r(31);
    for (int i = 0; i < 10; ++i) {
        SurfaceField eta = gen::random_surface(g, r, 0.1);
        EXPECT_LE(max_abs(poisson_extend(eta).top() - eta), 1e-14);
    }
}

TEST(PoissonExtend, HarmonicityImprovesWithNz) {
    double prev = 0;
    for (int nz : {17, 33, 65}) {
        auto g = Grid::create(GridSpec{16, 16, nz});
        SurfaceField eta = SurfaceField::from_function(g, [](double x1, double) { return 0.1 * std::cos(x1); });
        const double r = harmonicity_residual(poisson_extend(eta));
        if (prev > 0) EXPECT_GE(prev / r, 4.0) << "nz " << nz;
        prev = r;
    }
}

TEST(Geometry, FlatIsIdentity) {
    auto g = ref_grid();
    GeometryState G = build_geometry(SurfaceField(g));
    EXPECT_TRUE(G.flat);
    EXPECT_EQ(max_abs(G.A), 0.0);
    EXPECT_EQ(max_abs(G.B), 0.0);
    EXPECT_LE(max_abs(G.J - VolumeField::constant(g, 1.0)), 1e-15);
    EXPECT_LE(max_abs(G.K - VolumeField::constant(g, 1.0)), 1e-15);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_LE(max_abs(G.Acal[i][j] - VolumeField::constant(g, i == j ? 1.0 : 0.0)), 1e-15);
    EXPECT_EQ(max_abs(G.N[0]), 0.0);
    EXPECT_EQ(max_abs(G.N[1]), 0.0);
    EXPECT_EQ(max_abs(G.N[2] - SurfaceField::constant(g, 1.0)), 0.0);
    EXPECT_EQ(max_abs(G.H), 0.0);
}

TEST(Geometry, ConstantElevation) {
    auto g = ref_grid();
    const double c = 0.2;
    GeometryState G = build_geometry(SurfaceField::constant(g, c));
    EXPECT_LE(max_abs(G.A), 1e-14);
    EXPECT_LE(max_abs(G.B), 1e-14);
    EXPECT_LE(max_abs(G.J - VolumeField::constant(g, 1 + c)), 1e-12);
    EXPECT_LE(max_abs(G.K - VolumeField::constant(g, 1 / (1 + c))), 1e-12);
}

TEST(Geometry, DegenerateMapRejected) {
    auto g = ref_grid();
    EXPECT_THROW(build_geometry(SurfaceField::constant(g, -0.95)), DegenerateMap);
    try {
        build_geometry(SurfaceField::constant(g, -0.95));
    } catch (const DegenerateMap& e) {
        EXPECT_NEAR(e.min_j, 0.05, 1e-10);
    }
}

// Random surfaces: pointwise identities and the dense inverse-transpose oracle.
TEST(Geometry, IdentitiesOnRandomSurfaces) {
    auto g = ref_grid();
    gen::Rng r(32);
    const VolumeField bt = btilde(g);
    for (int trial = 0; trial < 8; ++trial) {
        SurfaceField eta = gen::random_surface(g, r, gen::uniform(r, 0.01, 0.2));
        GeometryState G = build_geometry(eta);
        EXPECT_LE(max_abs(mul(G.J, G.K) - VolumeField::constant(g, 1.0)), 1e-12);
        EXPECT_LE(max_pointwise_product_error(G.Minv, G.M), 1e-12);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) EXPECT_LE(max_abs(G.Minv[i][j] - mul(G.J, G.Acal[j][i])), 1e-13);

        // grad Phi from an independent differentiation of eta_bar * btilde
        const VolumeField phi3 = mul(poisson_extend(eta), bt);
        const VolumeField a = d1(phi3), b = d2(phi3), c = d3(phi3);
        double err = 0;
        for (std::size_t p = 0; p < g->points(); ++p) {
            Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
            F(2, 0) = a[p];
            F(2, 1) = b[p];
            F(2, 2) = 1.0 + c[p];
            const Eigen::Matrix3d Ainv = F.inverse().transpose();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(Ainv(i, j) - G.Acal[i][j][p]));
        }
        EXPECT_LE(err, 1e-10);
    }
}

TEST(Geometry, RateTensorVanishesWithoutMotion) {
    auto g = ref_grid();
    gen::Rng r(33);
    SurfaceField eta = gen::random_surface(g, r, 0.05);
    SurfaceField zero(g);
    GeometryState G = build_geometry(eta, &zero);
    ASSERT_TRUE(G.has_rate);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_LE(max_abs(G.R[i][j]), 1e-14);
}

// R = dM/dt M^{-1}, against a centred difference of M along eta + t eta_t.
TEST(Geometry, RateTensorMatchesFiniteDifference) {
    auto g = ref_grid();
    gen::Rng r(34);
    SurfaceField eta = gen::random_surface(g, r, 0.05);
    SurfaceField eta_t = gen::random_surface(g, r, 0.1);
    GeometryState G = build_geometry(eta, &eta_t);
    const double h = 1e-5;
    GeometryState Gp = build_geometry(eta + h * eta_t), Gm = build_geometry(eta + (-h) * eta_t);
    double err = 0, scale = 0;
    for (std::size_t p = 0; p < g->points(); ++p)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += (Gp.M[i][k][p] - Gm.M[i][k][p]) / (2 * h) * G.Minv[k][j][p];
                err = std::max(err, std::abs(s - G.R[i][j][p]));
                scale = std::max(scale, std::abs(s));
            }
    EXPECT_LE(err, 1e-7 * std::max(1.0, scale));
}

TEST(Normal, Cases) {
    auto g = ref_grid();
    SurfaceVector n0 = normal(SurfaceField(g));
    EXPECT_EQ(max_abs(n0[0]) + max_abs(n0[1]), 0.0);
    EXPECT_EQ(max_abs(n0[2] - SurfaceField::constant(g, 1.0)), 0.0);
    SurfaceVector nc = normal(SurfaceField::constant(g, 0.4));
    EXPECT_LE(max_abs(nc[0]) + max_abs(nc[1]), 1e-15);

    const double k = 2 * M_PI / g->l1();
    SurfaceVector n = normal(SurfaceField::from_function(g, [&](double x1, double) { return std::sin(k * x1); }));
    SurfaceField e = SurfaceField::from_function(g, [&](double x1, double) { return -k * std::cos(k * x1); });
    EXPECT_LE(max_abs(n[0] - e), 1e-13);
    EXPECT_LE(max_abs(n[1]), 1e-13);
}

TEST(MeanCurvature, ZeroAndConstant) {
    auto g = ref_grid();
    EXPECT_EQ(max_abs(mean_curvature(SurfaceField(g))), 0.0);
    EXPECT_LE(max_abs(mean_curvature(SurfaceField::constant(g, 0.3))), 1e-15);
}

TEST(MeanCurvature, OneDimensionalClosedForm) {
    // fine enough in x1 that the 2/3 truncation of the fluxes is invisible
    auto g = Grid::create(GridSpec{64, 4, 5});
    for (double eps : {0.05, 0.2, 0.5}) {
        SurfaceField eta = SurfaceField::from_function(g, [&](double x1, double) { return eps * std::sin(x1); });
        SurfaceField e = SurfaceField::from_function(g, [&](double x1, double) {
            const double d = eps * std::cos(x1), dd = -eps * std::sin(x1);
            return dd / std::pow(1 + d * d, 1.5);
        });
        EXPECT_LE(max_abs(mean_curvature(eta) - e), 1e-11) << eps;
    }
}

TEST(MeanCurvature, SmallAmplitudeLimit) {
    auto g = ref_grid();
    gen::Rng r(35);
    SurfaceField shape = gen::random_surface(g, r, 1.0);
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        SurfaceField eta = eps * shape;
        const double q = max_abs(mean_curvature(eta) - lap(eta)) / (eps * eps);
        EXPECT_LE(q, 1.0) << eps;
    }
}

TEST(Geometry, Deterministic) {
    auto g = ref_grid();
    gen::Rng r(36);
    SurfaceField eta = gen::random_surface(g, r, 0.05);
    GeometryState a = build_geometry(eta), b = build_geometry(eta);
    EXPECT_EQ(max_abs(a.J - b.J), 0.0);
    EXPECT_EQ(max_abs(a.Acal[2][0] - b.Acal[2][0]), 0.0);
}
