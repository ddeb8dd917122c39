#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fsw/elliptic.hpp"
#include "fsw/geometry.hpp"

namespace fsw {

enum class StepMode { Split, Coupled };

struct SchemeConfig {
    double dt = 2e-3;
    double sigma = 0.0;
    double kappa = 0.0;
    StepMode mode = StepMode::Split;
    double compensator_tau = 1.0;
    double end_time = 5.0;
    // Drop G1..G4 and solve on the flat slab (linearized problem).
    bool linear = false;
    double div_tol = 1e-6;
    // Extra flat solves per step driving div_A u+ to zero.
    int div_iterations = 4;
    double j_floor = kDefaultJFloor;
};

void validate(const SchemeConfig& cfg);

struct FluidState {
    VolumeField u;  // vector
    VolumeField p;
    SurfaceField eta;
    double t = 0.0;
    std::shared_ptr<const GeometryState> geometry;
};

FluidState make_state(VolumeField u, VolumeField p, SurfaceField eta, double t = 0.0,
                      double j_floor = kDefaultJFloor);
FluidState zero_state(const GridPtr& g);

// Psi(x, t) = -Lap eta0(x) exp(-t / tau)
class Compensator {
public:
    Compensator() = default;
    Compensator(const SurfaceField& eta0, double tau);
    SurfaceField operator()(double t) const;
    bool active() const { return active_; }

private:
    SurfaceField lap_eta0_;
    double tau_ = 1.0;
    bool active_ = false;
};

struct ForcingF {
    VolumeField F1;
    SurfaceVector F3;
    SurfaceField F4;
};

struct ForcingG {
    VolumeField G1;
    VolumeField G2;
    SurfaceVector G3;
    SurfaceField G4;
};

// u . N on the top, dealiased.
SurfaceField kinematic_flux(const VolumeField& u, const GeometryState& G);

// d_t eta = u . N + kappa (Lap eta + Psi)
SurfaceField surface_velocity(const FluidState& s, double kappa, const SurfaceField* psi);

ForcingF forcing_F(const FluidState& s, double sigma, const SurfaceField& eta_t);
ForcingG forcing_G(const FluidState& s, double sigma, const SurfaceField& eta_t);
// G2 of a velocity against an arbitrary geometry.
VolumeField forcing_G2(const VolumeField& u, const GeometryState& G);

// Explicit right side of the surface equation at the state's time:
// kappa Lap eta + kappa Psi(t) + u . N.
SurfaceField surface_rhs(const FluidState& s, const SchemeConfig& cfg, const Compensator& psi);

class Stepper {
public:
    Stepper(GridPtr g, const SchemeConfig& cfg, const Compensator& psi);
    ~Stepper();
    FluidState step(const FluidState& s) const;
    const SchemeConfig& config() const { return cfg_; }

private:
    FluidState step_split(const FluidState& s) const;
    FluidState step_coupled(const FluidState& s) const;
    void correct_divergence(VolumeField& u, VolumeField& p, const GeometryState& G) const;

    GridPtr grid_;
    SchemeConfig cfg_;
    Compensator psi_;
    std::unique_ptr<FlatStokesSolver> split_;
    std::unique_ptr<FlatStokesSolver> coupled_;
};

// Single step without a cached solver.
FluidState step(const FluidState& s, const SchemeConfig& cfg, const Compensator& psi = {});

struct Observer {
    int stride = 1;
    std::function<void(const FluidState&, long step)> fn;
};

struct SimulationSummary {
    FluidState final_state;
    double wall_seconds = 0.0;
    long steps = 0;
    long rejections = 0;
    bool aborted = false;
    std::string failure;
};

long step_count(const SchemeConfig& cfg);

// Observers see step 0, every stride-th step and the last step. On
// DegenerateMap or StepRejected the run stops and final_state holds the last
// good state.
SimulationSummary simulate(const FluidState& initial, const SchemeConfig& cfg, const std::vector<Observer>& observers,
                           const Compensator& psi = {});

}  // namespace fsw
