#pragma once

#include "fsw/dynamics.hpp"

namespace fsw {

struct CompatibilityReport {
    double div_residual = 0.0;         // max |div_A0 u0|
    double bottom_residual = 0.0;      // max |u0| on the bottom
    double tangential_residual = 0.0;  // max |Pi0(F3(0) + D_A0 u0 N0)|
    double div_tol = 1e-8;
    double bottom_tol = 1e-10;
    double tangential_tol = 1e-8;

    bool pass() const {
        return div_residual <= div_tol && bottom_residual <= bottom_tol && tangential_residual <= tangential_tol;
    }
};

// v - (v . N0) N0 / |N0|^2
SurfaceVector project_tangent(const SurfaceVector& v, const SurfaceField& eta0);

// u - grad_A phi with div_A(grad_A phi - u) = 0, phi = 0 on the top and
// (grad_A phi - u) . nu = 0 on the bottom.
VolumeField project_divA_free(const VolumeField& u, const GeometryState& G, double tol = 1e-10);

VolumeField initial_pressure(const VolumeField& u0, const SurfaceField& eta0, double sigma);

// D_t u(0) = Lap_A0 u0 - grad_A0 p0 + F1(0) - R0 u0
VolumeField initial_accel(const VolumeField& u0, const VolumeField& p0, const SurfaceField& eta0);

// d_t u(0) = D_t u(0) + R0 u0
VolumeField initial_du_dt(const VolumeField& u0, const VolumeField& p0, const SurfaceField& eta0);

CompatibilityReport check_compatibility(const VolumeField& u0, const SurfaceField& eta0, double sigma);

// Closest compatible velocity: the A-Stokes solution with body force
// div_A S_A(0, u0), zero divergence, the normal part of -D_A u0 N0 as
// traction and u = 0 on the bottom. Leaves compatible data fixed.
VolumeField repair(const VolumeField& u0, const SurfaceField& eta0);

struct PreparedData {
    CompatibilityReport before;
    CompatibilityReport after;
    FluidState state;  // repaired u0, p0, eta0 at t = 0
    VolumeField accel;
    VolumeField du_dt;
};

PreparedData prepare(const VolumeField& u0, const SurfaceField& eta0, double sigma);

}  // namespace fsw
