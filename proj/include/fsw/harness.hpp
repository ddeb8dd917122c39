#pragma once

#include <string>
#include <vector>

#include "fsw/diagnostics.hpp"
#include "fsw/initial_data.hpp"

namespace fsw {

struct ExperimentConfig {
    GridSpec grid;
    SchemeConfig scheme;
    Truncation truncation;
    int diag_stride = 50;     // steps between energy reports
    int compare_stride = 10;  // steps between trajectory comparisons
    int threads = 0;          // 0: hardware concurrency
};

struct InitialData {
    VolumeField u0;
    SurfaceField eta0;
};

// eta0 = 0.01 (cos x1 + 0.5 cos x2), u0 = 0
InitialData reference_data(const GridPtr& g);

struct SweepRun {
    double value = 0.0;
    double metric = 0.0;  // distance to the baseline run
    SimulationSummary summary;
    std::vector<EnergyReport> reports;
};

struct SweepResult {
    std::string parameter;
    std::vector<SweepRun> runs;  // in the order requested
    // Log-log slope of metric against the three smallest nonzero values;
    // NaN when fewer than two usable points.
    double order = 0.0;
    // metric nonincreasing as the parameter decreases (5% slack)
    bool monotone = true;
    bool complete = true;
    std::string failure;
};

// d = sup_t ||eta - eta_0||_{H^2} + sup_t ||u - u_0||_{L^2} against the
// zero-parameter run, which is added when the list lacks it.
SweepResult run_sigma_sweep(const ExperimentConfig& cfg, const InitialData& data, const std::vector<double>& sigmas);
SweepResult run_kappa_sweep(const ExperimentConfig& cfg, const InitialData& data, const std::vector<double>& kappas);

double fitted_order(const std::vector<double>& values, const std::vector<double>& metrics);
bool nonincreasing(const std::vector<double>& values, const std::vector<double>& metrics, double slack = 0.05);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct DecayWindow {
    double t0 = 1.0;
    double t1 = 5.0;
};

struct DecayReport {
    std::vector<EnergyReport> series;
    bool degenerate = false;  // E vanishes identically
    double rate = 0.0;        // C2 in E ~ exp(-C2 t)
    double r2_exp = 0.0;
    bool has_algebraic = false;
    double exponent = 0.0;    // E ~ (1 + t)^(-exponent)
    double r2_alg = 0.0;
    std::string best_model;   // "exponential" or "algebraic"
    bool monotone = true;     // E nonincreasing over the window
    SimulationSummary summary;
};

// Throws FitUnreliable when no model reaches R^2 >= 0.9.
DecayReport run_decay(const ExperimentConfig& cfg, const InitialData& data, const DecayWindow& window);

struct AuditReport {
    CompatibilityReport before;
    CompatibilityReport after;
    double u0_norm = 0.0;        // L2
    double repaired_norm = 0.0;  // L2
    double repair_change = 0.0;  // max |repaired - u0|
    double idempotence = 0.0;    // max |repair(repaired) - repaired|
    double p0_norm = 0.0;        // H1
    double accel_norm = 0.0;     // L2
    double du_dt_norm = 0.0;     // L2
    double eta0_norm = 0.0;      // H^{3/2}
};

AuditReport audit_data(const VolumeField& u0, const SurfaceField& eta0, double sigma);

}  // namespace fsw
