#include "fsw/geometry.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "fsw/errors.hpp"

namespace fsw {

VolumeField btilde(const GridPtr& g) {
    VolumeField r = VolumeField::depth_coordinate(g);
    const double b = g->b();
    for (double& v : r.values()) v = 1.0 + v / b;
    return r;
}

VolumeField poisson_extend(const SurfaceField& eta) {
    const GridPtr& g = eta.grid();
    const Spectrum s = fft(eta);
    Spectrum v{g, g->nz(), std::vector<cplx>(g->splane() * g->nz())};
    for (int iz = 0; iz < g->nz(); ++iz) {
        const double z = g->x3()[iz];
        for (int j2 = 0; j2 < g->n2(); ++j2)
            for (int j1 = 0; j1 < g->n1h(); ++j1) {
                const double k = std::hypot(g->k1(j1), g->k2(j2));
                v.at(j1, j2, iz) = s.at(j1, j2) * std::exp(k * z);
            }
    }
    return ifft_volume(v);
}

double harmonicity_residual(const VolumeField& eta_bar) {
    const GridPtr& g = eta_bar.grid();
    const int nz = g->nz();
    if (nz < 5) return 0.0;
    Spectrum s = fft(eta_bar);
    spectral_lap(s);
    const VolumeField lh = ifft_volume(s);
    const auto& z = g->x3();
    const std::size_t plane = g->plane();
    double r = 0.0;
    for (int iz = 2; iz + 2 < nz; ++iz) {
        // sum_j w_j (z_j - z0)^m / m! = [m == 2]
        Eigen::Matrix<double, 5, 5> V;
        Eigen::Matrix<double, 5, 1> e = Eigen::Matrix<double, 5, 1>::Zero();
        e(2) = 1.0;
        for (int j = 0; j < 5; ++j) {
            const double h = z[iz - 2 + j] - z[iz];
            double t = 1.0;
            for (int m = 0; m < 5; ++m) {
                V(m, j) = t;
                t *= h / double(m + 1);
            }
        }
        const Eigen::Matrix<double, 5, 1> w = V.fullPivLu().solve(e);
        for (std::size_t p = 0; p < plane; ++p) {
            double v = lh[iz * plane + p];
            for (int j = 0; j < 5; ++j) v += w(j) * eta_bar[(iz - 2 + j) * plane + p];
            r = std::max(r, std::abs(v));
        }
    }
    return r;
}

SurfaceVector normal(const SurfaceField& eta) {
    SurfaceField n1 = d1(eta);
    SurfaceField n2 = d2(eta);
    n1 *= -1.0;
    n2 *= -1.0;
    return {n1, n2, SurfaceField::constant(eta.grid(), 1.0)};
}

SurfaceField mean_curvature(const SurfaceField& eta) {
    const SurfaceField g1 = d1(eta);
    const SurfaceField g2 = d2(eta);
    SurfaceField q1(eta.grid()), q2(eta.grid());
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double inv = 1.0 / std::sqrt(1.0 + g1[i] * g1[i] + g2[i] * g2[i]);
        q1[i] = g1[i] * inv;
        q2[i] = g2[i] * inv;
    }
    Spectrum s1 = fft(q1), s2 = fft(q2);
    spectral_dealias(s1);
    spectral_dealias(s2);
    spectral_d1(s1);
    spectral_d2(s2);
    for (std::size_t i = 0; i < s1.c.size(); ++i) s1.c[i] += s2.c[i];
    return ifft_surface(s1);
}

namespace {

Tensor zero_tensor(const GridPtr& g) {
    Tensor t;
    for (auto& row : t)
        for (auto& e : row) e = VolumeField(g);
    return t;
}

}  // namespace

GeometryState build_geometry(const SurfaceField& eta, const SurfaceField* eta_t, double j_floor) {
    const GridPtr& g = eta.grid();
    GeometryState G;
    G.grid = g;
    G.b = g->b();
    G.eta = eta;
    G.flat = max_abs(eta) == 0.0;

    const VolumeField bt = btilde(g);
    G.eta_bar = poisson_extend(eta);
    auto grad = gradient(G.eta_bar);
    G.A = mul(grad[0], bt);
    G.B = mul(grad[1], bt);
    G.J = VolumeField(g);
    G.K = VolumeField(g);
    const double inv_b = 1.0 / G.b;
    double minj = 1e300;
    for (std::size_t i = 0; i < G.J.size(); ++i) {
        const double j = 1.0 + G.eta_bar[i] * inv_b + grad[2][i] * bt[i];
        G.J[i] = j;
        G.K[i] = 1.0 / j;
        minj = std::min(minj, j);
    }
    G.min_J = minj;
    if (!(minj > j_floor)) {
        std::ostringstream os;
        os << "flattening map degenerate: min J = " << minj << " <= " << j_floor;
        throw DegenerateMap(os.str(), minj);
    }
    G.AK = mul(G.A, G.K);
    G.BK = mul(G.B, G.K);

    const VolumeField one = VolumeField::constant(g, 1.0);
    const VolumeField zero(g);
    VolumeField mAK = G.AK, mBK = G.BK;
    mAK *= -1.0;
    mBK *= -1.0;
    G.Acal = {{{one, zero, mAK}, {zero, one, mBK}, {zero, zero, G.K}}};
    G.M = {{{G.K, zero, zero}, {zero, G.K, zero}, {G.AK, G.BK, one}}};
    G.Minv = zero_tensor(g);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) G.Minv[i][j] = mul(G.J, G.Acal[j][i]);

    G.N = normal(eta);
    G.H = mean_curvature(eta);

    if (eta_t) {
        require_same(g, eta_t->grid());
        G.has_rate = true;
        G.eta_t = *eta_t;
        G.eta_bar_t = poisson_extend(*eta_t);
        auto gt = gradient(G.eta_bar_t);
        VolumeField At = mul(gt[0], bt), Bt = mul(gt[1], bt);
        VolumeField Jt(g);
        for (std::size_t i = 0; i < Jt.size(); ++i) Jt[i] = G.eta_bar_t[i] * inv_b + gt[2][i] * bt[i];
        G.R = zero_tensor(g);
        VolumeField& r11 = G.R[0][0];
        VolumeField& r31 = G.R[2][0];
        VolumeField& r32 = G.R[2][1];
        for (std::size_t i = 0; i < Jt.size(); ++i) {
            const double k = G.K[i];
            const double jt = Jt[i];
            r11[i] = -jt * k;
            // (AK)_t J = A_t - A J_t K
            r31[i] = (At[i] * k - G.A[i] * jt * k * k) * G.J[i];
            r32[i] = (Bt[i] * k - G.B[i] * jt * k * k) * G.J[i];
        }
        G.R[1][1] = r11;
    }
    return G;
}

}  // namespace fsw
