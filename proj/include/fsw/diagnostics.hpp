#pragma once

#include <optional>
#include <vector>

#include "fsw/dynamics.hpp"

namespace fsw {

// Truncation of the energy functionals: time derivatives up to jmax,
// Sobolev orders clamped to volume_clamp (integer, on the slab) and
// surface_clamp (fractional, on the surface).
struct Truncation {
    int n = 1;
    int jmax = 1;
    double s_F = 4.5;
    int volume_clamp = 4;
    double surface_clamp = 5.0;
};

struct EnergyReport {
    double t = 0.0;
    double E = 0.0;
    double D = 0.0;
    double F2N = 0.0;
    double Kcal = 0.0;
    double mass = 0.0;
    double balance_residual = 0.0;
    int n = 1;
    int jmax = 1;
    double s_F = 4.5;
};

// (sum_n (1 + |k_n|^2)^s |f_n|^2 L1 L2)^(1/2)
double surface_norm(const SurfaceField& f, double s);

// (sum_{|alpha| <= k} ||d^alpha f||^2)^(1/2) over all components.
double volume_norm(const VolumeField& f, int k, bool allow_high_order = false);

struct TimeDerivatives {
    VolumeField u_t;
    SurfaceField eta_t;
    std::optional<VolumeField> p_t;
};

// eta_t from the kinematic condition (plus the kappa terms when given),
// u_t from the momentum equation, p_t by backward difference against the
// previous snapshot when one is supplied.
TimeDerivatives recover_time_derivatives(const FluidState& s, double sigma, const FluidState* previous = nullptr,
                                         double kappa = 0.0, const SurfaceField* psi = nullptr);

double energy(const FluidState& s, double sigma, const Truncation& tr = {}, const TimeDerivatives* dts = nullptr);
double dissipation(const FluidState& s, double sigma, const Truncation& tr = {},
                   const TimeDerivatives* dts = nullptr);
// ||eta||^2 at order s_F
double surface_functional(const SurfaceField& eta, double s_F);
// ||grad u||_inf^2 + ||grad^2 u||_inf^2 + ||grad_* u||^2_{H^2(Sigma)}
double gradient_functional(const VolumeField& u);

struct BalanceOptions {
    double sigma = 0.0;
    double kappa = 0.0;
    // flat geometry, u3 in place of u . N and no curvature remainder
    bool linear = false;
    const Compensator* psi = nullptr;
};

// 1/2 int J|u|^2 + 1/2 int eta^2 + sigma/2 int |grad eta|^2
double balance_energy(const FluidState& s, double sigma, bool linear = false);

// Per-interval defect of
//   d/dt E_b + 1/2 int J |D_A u|^2 = sigma int (H - Lap eta) u.N + kappa int (eta - sigma Lap eta)(Lap eta + Psi)
// with dissipation and work at the newer snapshot.
std::vector<double> balance_defects(const std::vector<FluidState>& history, const BalanceOptions& opt);
// Mean |defect| over the window.
double balance_residual(const std::vector<FluidState>& history, const BalanceOptions& opt);

// Streaming form of balance_defects: keeps only the previous snapshot.
class BalanceTracker {
public:
    explicit BalanceTracker(BalanceOptions opt) : opt_(opt) {}
    // Returns the defect of the interval ending at s (0 for the first push).
    double push(const FluidState& s);
    double mean_abs() const { return count_ ? sum_abs_ / double(count_) : 0.0; }
    long intervals() const { return count_; }
    double last() const { return last_; }

private:
    BalanceOptions opt_;
    std::optional<FluidState> prev_;
    double e_prev_ = 0.0;
    double sum_abs_ = 0.0;
    double last_ = 0.0;
    long count_ = 0;
};

EnergyReport make_report(const FluidState& s, double sigma, const Truncation& tr = {}, double balance = 0.0,
                         const FluidState* previous = nullptr);

}  // namespace fsw
