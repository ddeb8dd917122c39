#include "fsw/fields.hpp"

#include <cmath>

#include "fsw/errors.hpp"
#include "fsw/kernels.hpp"

namespace fsw {

namespace {

const kernels::Table& K() { return kernels::active(); }

void check_scalar(const VolumeField& f) {
    if (f.arity() != 1) throw GridMismatch("scalar field expected");
}

}  // namespace

// ---- SurfaceField ----

SurfaceField::SurfaceField(GridPtr g) : grid_(std::move(g)), v_(grid_->plane(), 0.0) {}

SurfaceField::SurfaceField(GridPtr g, std::vector<double> values) : grid_(std::move(g)), v_(std::move(values)) {
    if (v_.size() != grid_->plane()) throw GridMismatch("surface value count does not match grid");
}

SurfaceField SurfaceField::from_function(GridPtr g, const std::function<double(double, double)>& f) {
    SurfaceField s(g);
    for (int i2 = 0; i2 < g->n2(); ++i2)
        for (int i1 = 0; i1 < g->n1(); ++i1) s(i1, i2) = f(g->x1(i1), g->x2(i2));
    return s;
}

SurfaceField SurfaceField::constant(GridPtr g, double c) {
    SurfaceField s(g);
    for (double& v : s.v_) v = c;
    return s;
}

SurfaceField SurfaceField::from_modes(const Spectrum& s) { return ifft_surface(s); }

Spectrum SurfaceField::modes() const { return fft(*this); }

SurfaceField& SurfaceField::operator+=(const SurfaceField& o) {
    require_same(grid_, o.grid_);
    K().axpy(1.0, o.data(), data(), size());
    return *this;
}

SurfaceField& SurfaceField::operator-=(const SurfaceField& o) {
    require_same(grid_, o.grid_);
    K().axpy(-1.0, o.data(), data(), size());
    return *this;
}

SurfaceField& SurfaceField::operator*=(double a) {
    K().scale(a, data(), size());
    return *this;
}

SurfaceField& SurfaceField::axpy(double a, const SurfaceField& x) {
    require_same(grid_, x.grid_);
    K().axpy(a, x.data(), data(), size());
    return *this;
}

SurfaceField operator+(SurfaceField a, const SurfaceField& b) { return a += b; }
SurfaceField operator-(SurfaceField a, const SurfaceField& b) { return a -= b; }
SurfaceField operator*(double a, SurfaceField b) { return b *= a; }

SurfaceField mul(const SurfaceField& a, const SurfaceField& b) {
    require_same(a.grid(), b.grid());
    SurfaceField r(a.grid());
    K().mul(a.data(), b.data(), r.data(), r.size());
    return r;
}

// ---- VolumeField ----

VolumeField::VolumeField(GridPtr g, int arity) : grid_(std::move(g)), arity_(arity) {
    if (arity != 1 && arity != 3) throw GridMismatch("arity must be 1 or 3");
    v_.assign(grid_->points() * arity, 0.0);
}

VolumeField VolumeField::from_function(GridPtr g, const std::function<double(double, double, double)>& f) {
    VolumeField r(g, 1);
    const auto& z = g->x3();
    for (int iz = 0; iz < g->nz(); ++iz)
        for (int i2 = 0; i2 < g->n2(); ++i2)
            for (int i1 = 0; i1 < g->n1(); ++i1) r(i1, i2, iz) = f(g->x1(i1), g->x2(i2), z[iz]);
    return r;
}

VolumeField VolumeField::from_function3(GridPtr g,
                                        const std::function<std::array<double, 3>(double, double, double)>& f) {
    VolumeField r(g, 3);
    const auto& z = g->x3();
    for (int iz = 0; iz < g->nz(); ++iz)
        for (int i2 = 0; i2 < g->n2(); ++i2)
            for (int i1 = 0; i1 < g->n1(); ++i1) {
                auto v = f(g->x1(i1), g->x2(i2), z[iz]);
                for (int c = 0; c < 3; ++c) r(i1, i2, iz, c) = v[c];
            }
    return r;
}

VolumeField VolumeField::constant(GridPtr g, double c) {
    VolumeField r(g, 1);
    for (double& v : r.v_) v = c;
    return r;
}

VolumeField VolumeField::stack(const VolumeField& a, const VolumeField& b, const VolumeField& c) {
    require_same(a.grid(), b.grid());
    require_same(a.grid(), c.grid());
    VolumeField r(a.grid(), 3);
    r.set_component(0, a);
    r.set_component(1, b);
    r.set_component(2, c);
    return r;
}

VolumeField VolumeField::depth_coordinate(GridPtr g) {
    VolumeField r(g, 1);
    const std::size_t P = g->plane();
    for (int iz = 0; iz < g->nz(); ++iz)
        for (std::size_t p = 0; p < P; ++p) r.v_[iz * P + p] = g->x3()[iz];
    return r;
}

VolumeField VolumeField::component(int c) const {
    VolumeField r(grid_, 1);
    std::copy(comp(c), comp(c) + comp_size(), r.data());
    return r;
}

void VolumeField::set_component(int c, const VolumeField& s) {
    require_same(grid_, s.grid());
    check_scalar(s);
    std::copy(s.data(), s.data() + comp_size(), comp(c));
}

SurfaceField VolumeField::layer(int iz, int c) const {
    SurfaceField s(grid_);
    const std::size_t P = grid_->plane();
    std::copy(comp(c) + iz * P, comp(c) + (iz + 1) * P, s.data());
    return s;
}

void VolumeField::set_layer(int iz, const SurfaceField& s, int c) {
    require_same(grid_, s.grid());
    const std::size_t P = grid_->plane();
    std::copy(s.data(), s.data() + P, comp(c) + iz * P);
}

VolumeField& VolumeField::operator+=(const VolumeField& o) {
    require_same(grid_, o.grid_);
    if (arity_ != o.arity_) throw GridMismatch("arity mismatch");
    K().axpy(1.0, o.data(), data(), size());
    return *this;
}

VolumeField& VolumeField::operator-=(const VolumeField& o) {
    require_same(grid_, o.grid_);
    if (arity_ != o.arity_) throw GridMismatch("arity mismatch");
    K().axpy(-1.0, o.data(), data(), size());
    return *this;
}

VolumeField& VolumeField::operator*=(double a) {
    K().scale(a, data(), size());
    return *this;
}

VolumeField& VolumeField::axpy(double a, const VolumeField& x) {
    require_same(grid_, x.grid_);
    if (arity_ != x.arity_) throw GridMismatch("arity mismatch");
    K().axpy(a, x.data(), data(), size());
    return *this;
}

VolumeField operator+(VolumeField a, const VolumeField& b) { return a += b; }
VolumeField operator-(VolumeField a, const VolumeField& b) { return a -= b; }
VolumeField operator*(double a, VolumeField b) { return b *= a; }

VolumeField mul(const VolumeField& a, const VolumeField& b) {
    require_same(a.grid(), b.grid());
    check_scalar(a);
    check_scalar(b);
    VolumeField r(a.grid());
    K().mul(a.data(), b.data(), r.data(), r.size());
    return r;
}

VolumeField mul(const VolumeField& a, const VolumeField& b, const VolumeField& c) {
    VolumeField r = mul(a, b);
    require_same(a.grid(), c.grid());
    K().mul(r.data(), c.data(), r.data(), r.size());
    return r;
}

VolumeField extrude(const SurfaceField& s) {
    VolumeField r(s.grid(), 1);
    for (int iz = 0; iz < s.grid()->nz(); ++iz) r.set_layer(iz, s);
    return r;
}

// ---- spectral ----

Spectrum fft(const SurfaceField& f) {
    Spectrum s{f.grid(), 1, std::vector<cplx>(f.grid()->splane())};
    f.grid()->forward(f.data(), s.c.data(), 1);
    return s;
}

Spectrum fft(const VolumeField& f) {
    check_scalar(f);
    const int nz = f.grid()->nz();
    Spectrum s{f.grid(), nz, std::vector<cplx>(f.grid()->splane() * nz)};
    f.grid()->forward(f.data(), s.c.data(), nz);
    return s;
}

SurfaceField ifft_surface(const Spectrum& s) {
    SurfaceField f(s.grid);
    s.grid->inverse(s.c.data(), f.data(), 1);
    return f;
}

VolumeField ifft_volume(const Spectrum& s) {
    VolumeField f(s.grid, 1);
    s.grid->inverse(s.c.data(), f.data(), s.layers);
    return f;
}

namespace {

template <class Fn>
void for_modes(Spectrum& s, Fn fn) {
    const Grid& g = *s.grid;
    for (int l = 0; l < s.layers; ++l)
        for (int j2 = 0; j2 < g.n2(); ++j2)
            for (int j1 = 0; j1 < g.n1h(); ++j1) fn(s.at(j1, j2, l), j1, j2);
}

}  // namespace

void spectral_d1(Spectrum& s) {
    const Grid& g = *s.grid;
    for_modes(s, [&](cplx& c, int j1, int j2) { c = g.nyquist(j1, j2) ? cplx(0) : cplx(0, g.k1(j1)) * c; });
}

void spectral_d2(Spectrum& s) {
    const Grid& g = *s.grid;
    for_modes(s, [&](cplx& c, int j1, int j2) { c = g.nyquist(j1, j2) ? cplx(0) : cplx(0, g.k2(j2)) * c; });
}

void spectral_lap(Spectrum& s) {
    const Grid& g = *s.grid;
    for_modes(s, [&](cplx& c, int j1, int j2) {
        double k1 = g.k1(j1), k2 = g.k2(j2);
        c *= -(k1 * k1 + k2 * k2);
    });
}

void spectral_dealias(Spectrum& s) {
    const Grid& g = *s.grid;
    for_modes(s, [&](cplx& c, int j1, int j2) {
        if (!g.resolved(j1, j2)) c = 0;
    });
}

SurfaceField d1(const SurfaceField& f) {
    Spectrum s = fft(f);
    spectral_d1(s);
    return ifft_surface(s);
}

SurfaceField d2(const SurfaceField& f) {
    Spectrum s = fft(f);
    spectral_d2(s);
    return ifft_surface(s);
}

SurfaceField lap(const SurfaceField& f) {
    Spectrum s = fft(f);
    spectral_lap(s);
    return ifft_surface(s);
}

SurfaceField dealias(const SurfaceField& f) {
    Spectrum s = fft(f);
    spectral_dealias(s);
    return ifft_surface(s);
}

VolumeField d1(const VolumeField& f) {
    Spectrum s = fft(f);
    spectral_d1(s);
    return ifft_volume(s);
}

VolumeField d2(const VolumeField& f) {
    Spectrum s = fft(f);
    spectral_d2(s);
    return ifft_volume(s);
}

VolumeField d3(const VolumeField& f) {
    const Grid& g = *f.grid();
    VolumeField r(f.grid(), f.arity());
    for (int c = 0; c < f.arity(); ++c) K().mat_apply(g.D().data(), g.nz(), f.comp(c), r.comp(c), g.plane());
    return r;
}

VolumeField d33(const VolumeField& f) {
    const Grid& g = *f.grid();
    VolumeField r(f.grid(), f.arity());
    for (int c = 0; c < f.arity(); ++c) K().mat_apply(g.D2().data(), g.nz(), f.comp(c), r.comp(c), g.plane());
    return r;
}

VolumeField dealias(const VolumeField& f) {
    if (f.arity() == 1) {
        Spectrum s = fft(f);
        spectral_dealias(s);
        return ifft_volume(s);
    }
    VolumeField r(f.grid(), f.arity());
    for (int c = 0; c < f.arity(); ++c) r.set_component(c, dealias(f.component(c)));
    return r;
}

std::array<VolumeField, 3> gradient(const VolumeField& f) {
    Spectrum s = fft(f);
    Spectrum s2 = s;
    spectral_d1(s);
    spectral_d2(s2);
    return {ifft_volume(s), ifft_volume(s2), d3(f)};
}

// ---- quadrature ----

double integrate(const SurfaceField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid()->cell_area();
}

double integrate(const VolumeField& f) {
    check_scalar(f);
    const Grid& g = *f.grid();
    const std::size_t P = g.plane();
    double s = 0.0;
    for (int iz = 0; iz < g.nz(); ++iz) {
        double layer = 0.0;
        const double* p = f.data() + iz * P;
        for (std::size_t i = 0; i < P; ++i) layer += p[i];
        s += g.weights()[iz] * layer;
    }
    return s * g.cell_area();
}

double norm_l2(const SurfaceField& f) {
    return std::sqrt(K().dot(f.data(), f.data(), f.size()) * f.grid()->cell_area());
}

double norm_l2(const VolumeField& f) {
    const Grid& g = *f.grid();
    const std::size_t P = g.plane();
    double s = 0.0;
    for (int c = 0; c < f.arity(); ++c)
        for (int iz = 0; iz < g.nz(); ++iz) {
            const double* p = f.comp(c) + iz * P;
            s += g.weights()[iz] * K().dot(p, p, P);
        }
    return std::sqrt(s * g.cell_area());
}

double max_abs(const SurfaceField& f) { return K().max_abs(f.data(), f.size()); }
double max_abs(const VolumeField& f) { return K().max_abs(f.data(), f.size()); }

double mean(const SurfaceField& f) { return integrate(f) / (f.grid()->l1() * f.grid()->l2()); }

}  // namespace fsw
