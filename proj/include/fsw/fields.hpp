#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "fsw/grid.hpp"

namespace fsw {

// Half-spectrum coefficients of one or more horizontal layers.
struct Spectrum {
    GridPtr grid;
    int layers = 0;
    std::vector<cplx> c;

    cplx& at(int j1, int j2, int layer = 0) { return c[idx(j1, j2, layer)]; }
    const cplx& at(int j1, int j2, int layer = 0) const { return c[idx(j1, j2, layer)]; }
    std::size_t idx(int j1, int j2, int layer) const {
        return std::size_t(j1) + std::size_t(grid->n1h()) * (std::size_t(j2) + std::size_t(grid->n2()) * layer);
    }
};

class SurfaceField {
public:
    SurfaceField() = default;
    explicit SurfaceField(GridPtr g);
    SurfaceField(GridPtr g, std::vector<double> values);

    static SurfaceField from_function(GridPtr g, const std::function<double(double, double)>& f);
    static SurfaceField constant(GridPtr g, double c);
    static SurfaceField from_modes(const Spectrum& s);

    Spectrum modes() const;

    const GridPtr& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }
    double& operator()(int i1, int i2) { return v_[i1 + std::size_t(grid_->n1()) * i2]; }
    double operator()(int i1, int i2) const { return v_[i1 + std::size_t(grid_->n1()) * i2]; }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }

    SurfaceField& operator+=(const SurfaceField& o);
    SurfaceField& operator-=(const SurfaceField& o);
    SurfaceField& operator*=(double a);
    SurfaceField& axpy(double a, const SurfaceField& x);

private:
    GridPtr grid_;
    std::vector<double> v_;
};

SurfaceField operator+(SurfaceField a, const SurfaceField& b);
SurfaceField operator-(SurfaceField a, const SurfaceField& b);
SurfaceField operator*(double a, SurfaceField b);
// Pointwise product, not dealiased.
SurfaceField mul(const SurfaceField& a, const SurfaceField& b);

using SurfaceVector = std::array<SurfaceField, 3>;

// Scalar (arity 1) or vector (arity 3) field on the slab. Components are
// stored one after another, each in the physical layout of Grid.
class VolumeField {
public:
    VolumeField() = default;
    explicit VolumeField(GridPtr g, int arity = 1);

    static VolumeField from_function(GridPtr g, const std::function<double(double, double, double)>& f);
    static VolumeField from_function3(GridPtr g,
                                      const std::function<std::array<double, 3>(double, double, double)>& f);
    static VolumeField constant(GridPtr g, double c);
    static VolumeField stack(const VolumeField& a, const VolumeField& b, const VolumeField& c);
    // x3 as a field
    static VolumeField depth_coordinate(GridPtr g);

    const GridPtr& grid() const { return grid_; }
    int arity() const { return arity_; }
    std::size_t size() const { return v_.size(); }
    std::size_t comp_size() const { return grid_ ? grid_->points() : 0; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* comp(int c) { return v_.data() + c * comp_size(); }
    const double* comp(int c) const { return v_.data() + c * comp_size(); }
    VolumeField component(int c) const;
    void set_component(int c, const VolumeField& s);
    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }

    double& operator()(int i1, int i2, int iz, int c = 0) { return v_[index(i1, i2, iz, c)]; }
    double operator()(int i1, int i2, int iz, int c = 0) const { return v_[index(i1, i2, iz, c)]; }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    std::size_t index(int i1, int i2, int iz, int c = 0) const {
        return std::size_t(i1) + std::size_t(grid_->n1()) * (std::size_t(i2) + std::size_t(grid_->n2()) * iz) +
               std::size_t(c) * comp_size();
    }

    // Horizontal slice at vertical index iz of component c.
    SurfaceField layer(int iz, int c = 0) const;
    SurfaceField top(int c = 0) const { return layer(grid_->nz() - 1, c); }
    SurfaceField bottom(int c = 0) const { return layer(0, c); }
    void set_layer(int iz, const SurfaceField& s, int c = 0);

    VolumeField& operator+=(const VolumeField& o);
    VolumeField& operator-=(const VolumeField& o);
    VolumeField& operator*=(double a);
    VolumeField& axpy(double a, const VolumeField& x);

private:
    GridPtr grid_;
    int arity_ = 1;
    std::vector<double> v_;
};

VolumeField operator+(VolumeField a, const VolumeField& b);
VolumeField operator-(VolumeField a, const VolumeField& b);
VolumeField operator*(double a, VolumeField b);
// Pointwise products of scalar fields, not dealiased.
VolumeField mul(const VolumeField& a, const VolumeField& b);
VolumeField mul(const VolumeField& a, const VolumeField& b, const VolumeField& c);
// Broadcast a surface field along x3.
VolumeField extrude(const SurfaceField& s);

using Tensor = std::array<std::array<VolumeField, 3>, 3>;

// Spectral machinery.
Spectrum fft(const SurfaceField& f);
Spectrum fft(const VolumeField& scalar);
SurfaceField ifft_surface(const Spectrum& s);
VolumeField ifft_volume(const Spectrum& s);

// Horizontal derivatives: multiply by i*k (Nyquist entries set to zero).
void spectral_d1(Spectrum& s);
void spectral_d2(Spectrum& s);
void spectral_lap(Spectrum& s);
void spectral_dealias(Spectrum& s);

SurfaceField d1(const SurfaceField& f);
SurfaceField d2(const SurfaceField& f);
SurfaceField lap(const SurfaceField& f);
SurfaceField dealias(const SurfaceField& f);

VolumeField d1(const VolumeField& scalar);
VolumeField d2(const VolumeField& scalar);
// Vertical derivative by collocation (any arity).
VolumeField d3(const VolumeField& f);
VolumeField d33(const VolumeField& f);
VolumeField dealias(const VolumeField& f);

// Gradient of a scalar with one forward transform.
std::array<VolumeField, 3> gradient(const VolumeField& scalar);

// Quadrature.
double integrate(const SurfaceField& f);
double integrate(const VolumeField& scalar);
double norm_l2(const SurfaceField& f);
double norm_l2(const VolumeField& f);  // all components
double max_abs(const SurfaceField& f);
double max_abs(const VolumeField& f);
double mean(const SurfaceField& f);

}  // namespace fsw
