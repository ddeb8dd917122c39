#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "fsw/harness.hpp"

namespace fsw {

// Surface mode a * cos(k . x) or a * sin(k . x), k = (2 pi m1 / L1, 2 pi m2 / L2).
struct SurfaceMode {
    int m1 = 0;
    int m2 = 0;
    double amplitude = 0.0;
    std::string kind = "cos";
    bool operator==(const SurfaceMode&) const = default;
};

// Velocity component c set to the surface mode times (1 + x3/b), which
// vanishes on the bottom.
struct VelocityMode {
    int component = 0;
    SurfaceMode mode;
    bool operator==(const VelocityMode&) const = default;
};

struct InitialSpec {
    std::vector<SurfaceMode> eta;
    std::vector<VelocityMode> u;
    std::string file;  // snapshot to start from instead of the mode lists
    bool operator==(const InitialSpec&) const = default;
};

struct DiagnosticsSpec {
    int n = 1;
    int jmax = 1;
    int stride = 50;
    double s_F = 4.5;
    bool operator==(const DiagnosticsSpec&) const = default;
};

struct IoSpec {
    std::string output = "out";
    int snapshot_stride = 500;
    bool operator==(const IoSpec&) const = default;
};

struct ExperimentSpec {
    std::vector<double> sigmas{1.0, 0.1, 0.01, 0.001, 0.0};
    std::vector<double> kappas{1e-1, 1e-2, 1e-3};
    double decay_t0 = 1.0;
    double decay_t1 = 5.0;
    int compare_stride = 10;
    int threads = 0;
    bool operator==(const ExperimentSpec&) const = default;
};

struct SimConfig {
    GridSpec grid;
    double sigma = 0.0;
    double kappa = 0.0;
    double dt = 2e-3;
    double end_time = 5.0;
    StepMode mode = StepMode::Split;
    double compensator_tau = 1.0;
    bool linear = false;
    DiagnosticsSpec diagnostics;
    IoSpec io;
    InitialSpec initial;
    ExperimentSpec experiments;
    bool operator==(const SimConfig&) const = default;
};

// Throws ParseError (with line) on malformed YAML, unknown keys or values of
// the wrong type, ValidationError naming the field on out-of-range values.
SimConfig load_config(const std::string& path);
SimConfig parse_config(const std::string& text);
void validate(const SimConfig& c);
std::string dump_config(const SimConfig& c);
void save_config(const SimConfig& c, const std::string& path);

SchemeConfig scheme_of(const SimConfig& c);
Truncation truncation_of(const SimConfig& c);
ExperimentConfig experiment_of(const SimConfig& c);
// Mode lists evaluated on the grid, or the referenced snapshot.
InitialData initial_data_of(const SimConfig& c, const GridPtr& g);

// CSV of energy reports: header t,E,D,F2N,Kcal,mass,balance_residual and
// one row per report, 17 significant digits.
class DiagnosticsWriter {
public:
    explicit DiagnosticsWriter(const std::string& path);
    ~DiagnosticsWriter();
    DiagnosticsWriter(const DiagnosticsWriter&) = delete;
    DiagnosticsWriter& operator=(const DiagnosticsWriter&) = delete;
    void append(const EnergyReport& r);
    void flush();
    std::FILE* file() const { return f_; }

private:
    std::string path_;
    std::FILE* f_ = nullptr;
};

void write_diagnostics(const std::vector<EnergyReport>& reports, const std::string& path);
std::vector<EnergyReport> read_diagnostics(const std::string& path);

constexpr int kSnapshotVersion = 1;

struct Snapshot {
    FluidState state;
    double sigma = 0.0;
    double kappa = 0.0;
};

// <path> holds u (x1 fastest, then x2, x3, component), p, then eta as raw
// little-endian doubles; <path>.meta holds key = value metadata.
void write_snapshot(const FluidState& s, const std::string& path, double sigma = 0.0, double kappa = 0.0);
// With expected set, a snapshot of another shape is a FormatError.
Snapshot read_snapshot(const std::string& path, const GridSpec* expected = nullptr);

// value,metric,steps,aborted
void write_sweep(const SweepResult& r, const std::string& path);
void write_decay_fit(const DecayReport& r, const std::string& path);
void write_audit(const AuditReport& r, const std::string& path);

struct PlotInputs {
    std::string diagnostics;  // CSV of energy reports (E(t) semilog)
    std::string sigma_sweep;  // CSV from write_sweep
    std::string kappa_sweep;
};

// Gnuplot script rendering the given tables; empty paths are skipped.
void emit_plots(const PlotInputs& in, const std::string& script_path);

}  // namespace fsw
