// Command-line front end. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure, 4 i/o error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "fsw/errors.hpp"
#include "fsw/io.hpp"

namespace fs = std::filesystem;
using namespace fsw;

namespace {

struct Overrides {
    std::string config;
    std::optional<int> n1, n2, nz;
    std::optional<double> sigma, kappa, dt, end_time, tau;
    std::optional<std::string> mode, output;
    std::optional<int> snapshot_stride, diag_stride, threads, compare_stride;
    std::optional<std::vector<double>> sigmas, kappas;
    std::optional<double> decay_t0, decay_t1;
    bool linear = false;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("-c,--config", o.config, "YAML configuration file");
    sub->add_option("--n1", o.n1, "grid.n1");
    sub->add_option("--n2", o.n2, "grid.n2");
    sub->add_option("--nz", o.nz, "grid.nz");
    sub->add_option("--sigma", o.sigma, "physics.sigma");
    sub->add_option("--kappa", o.kappa, "physics.kappa");
    sub->add_option("--dt", o.dt, "scheme.dt");
    sub->add_option("--end-time", o.end_time, "scheme.end_time");
    sub->add_option("--mode", o.mode, "scheme.mode (split|coupled)");
    sub->add_option("--tau", o.tau, "scheme.compensator_tau");
    sub->add_flag("--linear", o.linear, "scheme.linear");
    sub->add_option("-o,--output", o.output, "io.output");
    sub->add_option("--snapshot-stride", o.snapshot_stride, "io.snapshot_stride");
    sub->add_option("--diag-stride", o.diag_stride, "diagnostics.stride");
    sub->add_option("--threads", o.threads, "experiments.threads");
    sub->add_option("--compare-stride", o.compare_stride, "experiments.compare_stride");
    sub->add_option("--sigmas", o.sigmas, "experiments.sigmas");
    sub->add_option("--kappas", o.kappas, "experiments.kappas");
    sub->add_option("--decay-t0", o.decay_t0, "experiments.decay_t0");
    sub->add_option("--decay-t1", o.decay_t1, "experiments.decay_t1");
}

SimConfig resolve(const Overrides& o) {
    SimConfig c = o.config.empty() ? SimConfig{} : load_config(o.config);
    if (o.n1) c.grid.n1 = *o.n1;
    if (o.n2) c.grid.n2 = *o.n2;
    if (o.nz) c.grid.nz = *o.nz;
    if (o.sigma) c.sigma = *o.sigma;
    if (o.kappa) c.kappa = *o.kappa;
    if (o.dt) c.dt = *o.dt;
    if (o.end_time) c.end_time = *o.end_time;
    if (o.tau) c.compensator_tau = *o.tau;
    if (o.linear) c.linear = true;
    if (o.mode) {
        if (*o.mode == "split") c.mode = StepMode::Split;
        else if (*o.mode == "coupled") c.mode = StepMode::Coupled;
        else throw ValidationError("scheme.mode", "expected split or coupled");
    }
    if (o.output) c.io.output = *o.output;
    if (o.snapshot_stride) c.io.snapshot_stride = *o.snapshot_stride;
    if (o.diag_stride) c.diagnostics.stride = *o.diag_stride;
    if (o.threads) c.experiments.threads = *o.threads;
    if (o.compare_stride) c.experiments.compare_stride = *o.compare_stride;
    if (o.sigmas) c.experiments.sigmas = *o.sigmas;
    if (o.kappas) c.experiments.kappas = *o.kappas;
    if (o.decay_t0) c.experiments.decay_t0 = *o.decay_t0;
    if (o.decay_t1) c.experiments.decay_t1 = *o.decay_t1;
    validate(c);
    return c;
}

fs::path prepare_output(const SimConfig& c) {
    const fs::path out(c.io.output);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
    save_config(c, (out / "config.yaml").string());
    return out;
}

void print_report(const EnergyReport& r) {
    std::printf("t = %.17g\nE = %.17g\nD = %.17g\nF2N = %.17g\nKcal = %.17g\nmass = %.17g\n", r.t, r.E, r.D, r.F2N,
                r.Kcal, r.mass);
    std::printf("n = %d\njmax = %d\ns_F = %g\n", r.n, r.jmax, r.s_F);
}

int cmd_simulate(const Overrides& o) {
    const SimConfig c = resolve(o);
    const fs::path out = prepare_output(c);
    const GridPtr g = Grid::create(c.grid);
    const InitialData d = initial_data_of(c, g);
    const PreparedData prep = prepare(d.u0, d.eta0, c.sigma);
    const SchemeConfig sc = scheme_of(c);
    const Truncation tr = truncation_of(c);
    const Compensator psi = c.kappa > 0.0 ? Compensator(d.eta0, c.compensator_tau) : Compensator();
    const long n = step_count(sc);

    DiagnosticsWriter diag((out / "diagnostics.csv").string());
    BalanceOptions bo;
    bo.sigma = c.sigma;
    bo.kappa = c.kappa;
    bo.linear = c.linear;
    bo.psi = &psi;
    BalanceTracker tracker(bo);
    std::vector<Observer> obs;
    obs.push_back({1, [&](const FluidState& s, long k) {
                       tracker.push(s);
                       if (k % c.diagnostics.stride == 0 || k == n)
                           diag.append(make_report(s, c.sigma, tr, tracker.mean_abs()));
                       if (c.io.snapshot_stride > 0 && k % c.io.snapshot_stride == 0) {
                           char name[32];
                           std::snprintf(name, sizeof name, "snap_%06ld.bin", k);
                           write_snapshot(s, (out / name).string(), c.sigma, c.kappa);
                       }
                   }});
    const SimulationSummary sum = simulate(prep.state, sc, obs, psi);
    std::printf("steps = %ld\nrejections = %ld\nwall_seconds = %.3f\n", sum.steps, sum.rejections, sum.wall_seconds);
    if (sum.aborted) {
        write_snapshot(sum.final_state, (out / "last_good.bin").string(), c.sigma, c.kappa);
        std::fprintf(stderr, "aborted at t = %.17g: %s\n", sum.final_state.t, sum.failure.c_str());
        return 3;
    }
    write_snapshot(sum.final_state, (out / "final.bin").string(), c.sigma, c.kappa);
    return 0;
}

int report_sweep(const SweepResult& r, const fs::path& out, const std::string& name) {
    write_sweep(r, (out / ("sweep_" + name + ".csv")).string());
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        char file[64];
        std::snprintf(file, sizeof file, "diagnostics_%s_%zu.csv", name.c_str(), i);
        write_diagnostics(r.runs[i].reports, (out / file).string());
    }
    for (const auto& run : r.runs) std::printf("%s = %.17g  d = %.17g\n", name.c_str(), run.value, run.metric);
    std::printf("order = %.6g\nmonotone = %d\n", r.order, int(r.monotone));
    if (!r.complete) {
        std::fprintf(stderr, "sweep incomplete: %s\n", r.failure.c_str());
        return 3;
    }
    return 0;
}

int cmd_sweep(const Overrides& o, bool sigma) {
    const SimConfig c = resolve(o);
    const fs::path out = prepare_output(c);
    const GridPtr g = Grid::create(c.grid);
    const InitialData d = initial_data_of(c, g);
    const ExperimentConfig ec = experiment_of(c);
    if (sigma) return report_sweep(run_sigma_sweep(ec, d, c.experiments.sigmas), out, "sigma");
    return report_sweep(run_kappa_sweep(ec, d, c.experiments.kappas), out, "kappa");
}

int cmd_decay(const Overrides& o) {
    const SimConfig c = resolve(o);
    const fs::path out = prepare_output(c);
    const GridPtr g = Grid::create(c.grid);
    const InitialData d = initial_data_of(c, g);
    const DecayReport r = run_decay(experiment_of(c), d, {c.experiments.decay_t0, c.experiments.decay_t1});
    write_diagnostics(r.series, (out / "decay.csv").string());
    write_decay_fit(r, (out / "decay_fit.txt").string());
    std::printf("best_model = %s\nrate = %.6g\nr2_exponential = %.6g\n", r.best_model.c_str(), r.rate, r.r2_exp);
    if (r.has_algebraic) std::printf("exponent = %.6g\nr2_algebraic = %.6g\n", r.exponent, r.r2_alg);
    std::printf("monotone = %d\n", int(r.monotone));
    return r.summary.aborted ? 3 : 0;
}

int cmd_check(const Overrides& o) {
    const SimConfig c = resolve(o);
    const fs::path out = prepare_output(c);
    const GridPtr g = Grid::create(c.grid);
    const InitialData d = initial_data_of(c, g);
    const AuditReport a = audit_data(d.u0, d.eta0, c.sigma);
    write_audit(a, (out / "audit.txt").string());
    std::printf("before: div %.3e bottom %.3e tangential %.3e %s\n", a.before.div_residual, a.before.bottom_residual,
                a.before.tangential_residual, a.before.pass() ? "pass" : "fail");
    std::printf("after:  div %.3e bottom %.3e tangential %.3e %s\n", a.after.div_residual, a.after.bottom_residual,
                a.after.tangential_residual, a.after.pass() ? "pass" : "fail");
    return 0;
}

int cmd_diagnose(const std::string& snapshot, std::optional<double> sigma) {
    const Snapshot s = read_snapshot(snapshot);
    print_report(make_report(s.state, sigma.value_or(s.sigma)));
    return 0;
}

int cmd_plot(const std::string& dir, PlotInputs in) {
    const fs::path d(dir);
    auto pick = [&](std::string& slot, const char* name) {
        if (slot.empty() && fs::exists(d / name)) slot = (d / name).string();
    };
    pick(in.diagnostics, "diagnostics.csv");
    pick(in.sigma_sweep, "sweep_sigma.csv");
    pick(in.kappa_sweep, "sweep_kappa.csv");
    if (in.diagnostics.empty() && in.sigma_sweep.empty() && in.kappa_sweep.empty())
        throw IoError("no diagnostics or sweep tables found in " + dir);
    const std::string script = (d / "plots.gp").string();
    emit_plots(in, script);
    std::printf("%s\n", script.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Viscous surface-wave simulator in flattened coordinates"};
    app.require_subcommand(1);
    Overrides o;
    auto* sim = app.add_subcommand("simulate", "run one simulation");
    auto* ss = app.add_subcommand("sweep-sigma", "surface-tension sweep");
    auto* sk = app.add_subcommand("sweep-kappa", "regularization sweep");
    auto* dc = app.add_subcommand("decay", "energy decay fit");
    auto* ck = app.add_subcommand("check-data", "audit and repair initial data");
    for (auto* s : {sim, ss, sk, dc, ck}) add_common(s, o);

    auto* dg = app.add_subcommand("diagnose", "energy report of a snapshot");
    std::string snapshot;
    std::optional<double> dsigma;
    dg->add_option("snapshot", snapshot, "snapshot data file")->required();
    dg->add_option("--sigma", dsigma, "override the recorded sigma");

    auto* pl = app.add_subcommand("plot", "write a gnuplot script");
    std::string dir = "out";
    PlotInputs pin;
    pl->add_option("-o,--output", dir, "directory holding the tables");
    pl->add_option("--diagnostics", pin.diagnostics, "diagnostics CSV");
    pl->add_option("--sigma-sweep", pin.sigma_sweep, "sigma sweep CSV");
    pl->add_option("--kappa-sweep", pin.kappa_sweep, "kappa sweep CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(o);
        if (ss->parsed()) return cmd_sweep(o, true);
        if (sk->parsed()) return cmd_sweep(o, false);
        if (dc->parsed()) return cmd_decay(o);
        if (ck->parsed()) return cmd_check(o);
        if (dg->parsed()) return cmd_diagnose(snapshot, dsigma);
        if (pl->parsed()) return cmd_plot(dir, pin);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "config error (line %d): %s\n", e.line, e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
