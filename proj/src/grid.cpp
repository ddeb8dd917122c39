#include "fsw/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "fsw/errors.hpp"

namespace fsw {

namespace {

// The FFTW planner is not reentrant; execution with the new-array API is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::vector<double> cgl_nodes(int n_points) {
    const int n = n_points - 1;
    std::vector<double> x(n_points);
    if (n == 0) {
        x[0] = 0.0;
        return x;
    }
    for (int j = 0; j <= n; ++j) x[j] = -std::cos(std::numbers::pi * j / n);
    // exact symmetry about 0
    for (int j = 0; j <= n / 2; ++j) {
        double a = 0.5 * (x[n - j] - x[j]);
        x[j] = -a;
        x[n - j] = a;
    }
    if (n % 2 == 0) x[n / 2] = 0.0;
    return x;
}

std::vector<double> cgl_diff_matrix(const std::vector<double>& x) {
    const int m = static_cast<int>(x.size());
    const int n = m - 1;
    std::vector<double> d(std::size_t(m) * m, 0.0);
    std::vector<double> c(m);
    for (int j = 0; j < m; ++j) c[j] = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
    for (int i = 0; i < m; ++i) {
        double diag = 0.0;
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            double v = (c[i] / c[j]) / (x[i] - x[j]);
            d[i * m + j] = v;
            diag -= v;
        }
        d[i * m + i] = diag;
    }
    return d;
}

std::vector<double> clenshaw_curtis_weights(int n_points) {
    const int n = n_points - 1;
    std::vector<double> w(n_points, 0.0);
    if (n == 0) {
        w[0] = 2.0;
        return w;
    }
    const double pi = std::numbers::pi;
    std::vector<double> v(n_points, 1.0);
    if (n % 2 == 0) {
        w[0] = w[n] = 1.0 / (double(n) * n - 1.0);
        for (int i = 1; i < n; ++i) {
            double th = pi * i / n;
            for (int k = 1; k < n / 2; ++k) v[i] -= 2.0 * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
            v[i] -= std::cos(n * th) / (double(n) * n - 1.0);
        }
    } else {
        w[0] = w[n] = 1.0 / (double(n) * n);
        for (int i = 1; i < n; ++i) {
            double th = pi * i / n;
            for (int k = 1; k <= (n - 1) / 2; ++k) v[i] -= 2.0 * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
        }
    }
    for (int i = 1; i < n; ++i) w[i] = 2.0 * v[i] / n;
    return w;
}

struct Grid::Plans {
    fftw_plan fwd1 = nullptr, inv1 = nullptr, fwdz = nullptr, invz = nullptr;
};

Grid::Grid(const GridSpec& s) : spec_(s), two_pi_(2.0 * std::numbers::pi), plans_(std::make_unique<Plans>()) {
    if (s.n1 < 2 || s.n2 < 2 || s.nz < 3) throw ValidationError("grid", "need n1, n2 >= 2 and nz >= 3");
    if (!(s.l1 > 0) || !(s.l2 > 0) || !(s.b > 0)) throw ValidationError("grid", "lengths must be positive");

    const auto xi = cgl_nodes(s.nz);
    x3_.resize(s.nz);
    for (int j = 0; j < s.nz; ++j) x3_[j] = 0.5 * s.b * (xi[j] - 1.0);
    x3_.front() = -s.b;
    x3_.back() = 0.0;

    d1_ = cgl_diff_matrix(xi);
    for (double& v : d1_) v *= 2.0 / s.b;
    const int m = s.nz;
    d2_.assign(std::size_t(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            double a = d1_[i * m + k];
            for (int j = 0; j < m; ++j) d2_[i * m + j] += a * d1_[k * m + j];
        }
    w_ = clenshaw_curtis_weights(m);
    for (double& v : w_) v *= 0.5 * s.b;

    int dims[2] = {s.n2, s.n1};
    const int rdist = static_cast<int>(plane());
    const int cdist = static_cast<int>(splane());
    double* rbuf = fftw_alloc_real(points());
    fftw_complex* cbuf = fftw_alloc_complex(splane() * s.nz);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plans_->fwd1 = fftw_plan_many_dft_r2c(2, dims, 1, rbuf, nullptr, 1, rdist, cbuf, nullptr, 1, cdist, flags);
        plans_->inv1 = fftw_plan_many_dft_c2r(2, dims, 1, cbuf, nullptr, 1, cdist, rbuf, nullptr, 1, rdist, flags);
        plans_->fwdz = fftw_plan_many_dft_r2c(2, dims, s.nz, rbuf, nullptr, 1, rdist, cbuf, nullptr, 1, cdist, flags);
        plans_->invz = fftw_plan_many_dft_c2r(2, dims, s.nz, cbuf, nullptr, 1, cdist, rbuf, nullptr, 1, rdist, flags);
    }
    fftw_free(rbuf);
    fftw_free(cbuf);
}

Grid::~Grid() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (fftw_plan p : {plans_->fwd1, plans_->inv1, plans_->fwdz, plans_->invz})
        if (p) fftw_destroy_plan(p);
}

std::shared_ptr<const Grid> Grid::create(const GridSpec& s) { return std::shared_ptr<const Grid>(new Grid(s)); }

bool Grid::nyquist(int j1, int j2) const {
    return (spec_.n1 % 2 == 0 && j1 == spec_.n1 / 2) || (spec_.n2 % 2 == 0 && j2 == spec_.n2 / 2);
}

bool Grid::resolved(int j1, int j2) const {
    return 3 * j1 < spec_.n1 && 3 * std::abs(mode2(j2)) < spec_.n2;
}

double Grid::hermitian_weight(int j1) const {
    if (j1 == 0) return 1.0;
    if (spec_.n1 % 2 == 0 && j1 == spec_.n1 / 2) return 1.0;
    return 2.0;
}

void Grid::forward(const double* in, cplx* out, int layers) const {
    auto* o = reinterpret_cast<fftw_complex*>(out);
    const double scale = 1.0 / double(plane());
    auto* i = const_cast<double*>(in);
    if (layers == 1) {
        fftw_execute_dft_r2c(plans_->fwd1, i, o);
    } else if (layers == spec_.nz) {
        fftw_execute_dft_r2c(plans_->fwdz, i, o);
    } else {
        for (int l = 0; l < layers; ++l) fftw_execute_dft_r2c(plans_->fwd1, i + l * plane(), o + l * splane());
    }
    const std::size_t n = splane() * layers;
    for (std::size_t k = 0; k < n; ++k) out[k] *= scale;
}

void Grid::inverse(const cplx* in, double* out, int layers) const {
    // c2r overwrites its input
    std::vector<cplx> tmp(in, in + splane() * layers);
    auto* t = reinterpret_cast<fftw_complex*>(tmp.data());
    if (layers == 1) {
        fftw_execute_dft_c2r(plans_->inv1, t, out);
    } else if (layers == spec_.nz) {
        fftw_execute_dft_c2r(plans_->invz, t, out);
    } else {
        for (int l = 0; l < layers; ++l) fftw_execute_dft_c2r(plans_->inv1, t + l * splane(), out + l * plane());
    }
}

void require_same(const GridPtr& a, const GridPtr& b) {
    if (!a || !b) throw GridMismatch("field without grid");
    if (a == b) return;
    if (!(a->spec() == b->spec())) throw GridMismatch("fields live on different grids");
}

}  // namespace fsw
