#pragma once

#include "fsw/geometry.hpp"

namespace fsw {

// Symmetric 3x3 tensor of scalar fields.
struct StressField {
    Tensor S;
};

// (grad_A f)_i = Acal_ij d_j f, returned as a 3-vector field.
VolumeField grad_A(const VolumeField& f, const GeometryState& G);
// div_A X = Acal_ij d_j X_i
VolumeField div_A(const VolumeField& X, const GeometryState& G);
// div_A grad_A, applied per component for vector input.
VolumeField lap_A(const VolumeField& f, const GeometryState& G);
// (D_A u)_ij = Acal_ik d_k u_j + Acal_jk d_k u_i
StressField symgrad_A(const VolumeField& u, const GeometryState& G);
// p I - D_A u
StressField stress_A(const VolumeField& p, const VolumeField& u, const GeometryState& G);

// Flat counterparts (identity geometry).
VolumeField grad(const VolumeField& f);
VolumeField div(const VolumeField& X);
VolumeField lap(const VolumeField& f);
StressField symgrad(const VolumeField& u);

// T[i][j] = (grad_A u_i)_j
Tensor jacobian_A(const VolumeField& u, const GeometryState& G);
// (u . grad_A) v per component of v; not dealiased.
VolumeField advect_A(const VolumeField& u, const VolumeField& v, const GeometryState& G);

// Row i of S contracted with the surface vector n at the top layer.
SurfaceVector traction_top(const StressField& S, const SurfaceVector& n);

// max |J div_A v - div(Minv v)| over the grid.
double check_div_identity(const VolumeField& v, const GeometryState& G);

// Tensor-vector product (T v)_i = T_ij v_j, pointwise.
VolumeField apply(const Tensor& T, const VolumeField& v);

double frobenius_sq_integral(const StressField& S, const VolumeField* weight = nullptr);

}  // namespace fsw
