#pragma once

#include <map>
#include <memory>
#include <optional>

#include "fsw/geometry.hpp"

namespace fsw {

enum class StokesVariant { FreeStress, Dirichlet };

// -Delta u + grad p + shift*u = f, div u = h, u = 0 at the bottom, and at the
// top either (pI - D u) e3 = bc_top (free stress) or u = bc_top (Dirichlet).
struct StokesRhs {
    VolumeField f;  // vector
    VolumeField h;  // scalar
    SurfaceVector bc_top;
    StokesVariant variant = StokesVariant::FreeStress;
};

struct StokesSolution {
    VolumeField u;
    VolumeField p;
};

// Spectral right side / solution, one Spectrum per component.
struct StokesModes {
    std::array<Spectrum, 3> f;
    Spectrum h;
    std::array<Spectrum, 3> top;
};
struct StokesModesSolution {
    std::array<Spectrum, 3> u;
    Spectrum p;
};

// Implicit surface rows for the jointly assembled time step:
//   (1/dt + kappa k^2) eta - u3(top) = eta_rhs
//   the normal stress row gains -(1 + sigma k^2) eta.
struct SurfaceCoupling {
    double dt = 1.0;
    double sigma = 0.0;
    double kappa = 0.0;
};

// Dense per-mode solver. Factorizations are built once per distinct |k|^2
// at construction and shared read-only afterwards.
class FlatStokesSolver {
public:
    FlatStokesSolver(GridPtr g, StokesVariant variant, double shift = 0.0,
                     std::optional<SurfaceCoupling> coupling = std::nullopt);
    ~FlatStokesSolver();
    FlatStokesSolver(FlatStokesSolver&&) noexcept;

    StokesSolution solve(const StokesRhs& rhs) const;
    // For the coupled form; eta_rhs is the kinematic right side.
    StokesSolution solve_coupled(const StokesRhs& rhs, const SurfaceField& eta_rhs, SurfaceField& eta_out) const;
    void solve_modes(const StokesModes& in, StokesModesSolution& out, const Spectrum* eta_rhs = nullptr,
                     Spectrum* eta_out = nullptr) const;

    const GridPtr& grid() const { return grid_; }
    StokesVariant variant() const { return variant_; }
    double shift() const { return shift_; }

    // True when row iz of the given equation participates for this mode.
    // eq: 0,1,2 momentum components, 3 continuity.
    bool row_used(int eq, int iz, bool mode0) const;

private:
    struct Impl;
    GridPtr grid_;
    StokesVariant variant_;
    double shift_;
    std::optional<SurfaceCoupling> coupling_;
    std::unique_ptr<Impl> impl_;
};

bool stokes_row_used(StokesVariant variant, int nz, int eq, int iz, bool mode0);

StokesModes to_modes(const StokesRhs& rhs);
StokesSolution from_modes(const StokesModesSolution& s);

StokesSolution solve_flat_stokes(const StokesRhs& rhs);

// Discrete residual of the flat problem relative to the data, on the rows the
// collocation system imposes (Nyquist modes excluded).
double flat_stokes_residual(const StokesRhs& rhs, const StokesSolution& sol, double shift = 0.0);

// Scalar problem: interior f1, Dirichlet f2 at the top, Neumann flux
// grad p . nu = f3 at the bottom (nu = -e3). With the divergence form
// set, the interior equation reads div_A(grad_A p + Gvec) = g0 and the
// bottom flux applies to grad_A p + Gvec.
struct PoissonRhs {
    VolumeField f1;
    SurfaceField f2;
    SurfaceField f3;
    bool divergence_form = false;
    VolumeField g0;
    VolumeField Gvec;
};

class FlatPoissonSolver {
public:
    explicit FlatPoissonSolver(GridPtr g);
    ~FlatPoissonSolver();
    FlatPoissonSolver(FlatPoissonSolver&&) noexcept;
    // interior (D^2 - k^2) p = f, p(top) = top, -D p(bottom) = bot
    Spectrum solve_modes(const Spectrum& f, const Spectrum& top, const Spectrum& bot) const;

private:
    struct Impl;
    GridPtr grid_;
    std::unique_ptr<Impl> impl_;
};

struct IterativeResult {
    int iterations = 0;
    double residual = 0.0;  // relative, masked
};

struct AStokesResult {
    VolumeField u;
    VolumeField p;
    IterativeResult info;
};

// div_A S_A(p,u) = F1, div_A u = F2, S_A(p,u) N = F3 on the top, u = 0 at
// the bottom, by defect correction around the flat free-stress solver.
AStokesResult solve_A_stokes(const VolumeField& F1, const VolumeField& F2, const SurfaceVector& F3,
                             const GeometryState& G, double tol = 1e-10, int max_iter = 50,
                             const FlatStokesSolver* flat = nullptr);

// Masked relative residual of the A-Stokes system.
double A_stokes_residual(const VolumeField& F1, const VolumeField& F2, const SurfaceVector& F3,
                         const GeometryState& G, const VolumeField& u, const VolumeField& p);

struct APoissonResult {
    VolumeField p;
    IterativeResult info;
};

APoissonResult solve_A_poisson(const PoissonRhs& rhs, const GeometryState& G, double tol = 1e-10,
                               int max_iter = 50);

double A_poisson_residual(const PoissonRhs& rhs, const GeometryState& G, const VolumeField& p);

// div_A S_A(p, u) row by row.
VolumeField div_stress_A(const VolumeField& p, const VolumeField& u, const GeometryState& G);

}  // namespace fsw
