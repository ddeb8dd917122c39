#pragma once

#include "fsw/fields.hpp"

namespace fsw {

constexpr double kDefaultJFloor = 0.1;

// Tensors derived from the surface elevation through the flattening map
// Phi(x) = (x1, x2, x3 + eta_bar(x) * (1 + x3/b)).
struct GeometryState {
    GridPtr grid;
    double b = 1.0;
    bool flat = true;  // eta identically zero

    SurfaceField eta;
    VolumeField eta_bar;
    VolumeField A, B, J, K;
    VolumeField AK, BK;  // A*K, B*K
    Tensor Acal;         // (grad Phi)^{-T}
    Tensor M;            // K grad Phi
    Tensor Minv;         // J Acal^T
    SurfaceVector N;     // (-d1 eta, -d2 eta, 1)
    SurfaceField H;      // div(grad eta / sqrt(1 + |grad eta|^2))

    // Present when the surface velocity was supplied.
    bool has_rate = false;
    SurfaceField eta_t;
    VolumeField eta_bar_t;
    Tensor R;  // dM/dt M^{-1}

    double min_J = 1.0;
};

// Harmonic extension: horizontal mode k scaled by exp(|k| x3).
VolumeField poisson_extend(const SurfaceField& eta);

// max |Lap eta_bar| over nodes 2..nz-3, horizontal part spectral, vertical
// part from a five-point fourth-order stencil on the collocation nodes. The
// collocation Laplacian itself vanishes to rounding for the extension.
double harmonicity_residual(const VolumeField& eta_bar);

SurfaceField mean_curvature(const SurfaceField& eta);
SurfaceVector normal(const SurfaceField& eta);

// Throws DegenerateMap if min J <= j_floor.
GeometryState build_geometry(const SurfaceField& eta, const SurfaceField* eta_t = nullptr,
                             double j_floor = kDefaultJFloor);

// b~ = 1 + x3/b as a field.
VolumeField btilde(const GridPtr& g);

}  // namespace fsw
