#include "fsw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

#include "fsw/errors.hpp"

namespace fsw {

InitialData reference_data(const GridPtr& g) {
    InitialData d;
    d.u0 = VolumeField(g, 3);
    d.eta0 = SurfaceField::from_function(g, [](double x1, double x2) { return 0.01 * (std::cos(x1) + 0.5 * std::cos(x2)); });
    return d;
}

namespace {

struct Sample {
    long step;
    SurfaceField eta;
    VolumeField u;
};

struct Trajectory {
    std::vector<Sample> samples;
};

bool sample_step(long k, long n, int stride) { return k % std::max(1, stride) == 0 || k == n; }

// One simulation with energy reports; either records samples or measures
// the distance to a recorded baseline.
void run_member(const ExperimentConfig& cfg, const SchemeConfig& scheme, const FluidState& init,
                const Compensator& psi, Trajectory* record, const Trajectory* baseline, SweepRun& out) {
    const long n = step_count(scheme);
    BalanceOptions bo;
    bo.sigma = scheme.sigma;
    bo.kappa = scheme.kappa;
    bo.linear = scheme.linear;
    bo.psi = &psi;
    BalanceTracker tracker(bo);
    double d_eta = 0.0, d_u = 0.0;
    std::size_t next = 0;

    std::vector<Observer> obs;
    obs.push_back({1, [&](const FluidState& s, long k) {
                       tracker.push(s);
                       if (k % std::max(1, cfg.diag_stride) == 0 || k == n)
                           out.reports.push_back(make_report(s, scheme.sigma, cfg.truncation, tracker.mean_abs()));
                       if (!sample_step(k, n, cfg.compare_stride)) return;
                       if (record) record->samples.push_back({k, s.eta, s.u});
                       if (baseline) {
                           while (next < baseline->samples.size() && baseline->samples[next].step < k) ++next;
                           if (next < baseline->samples.size() && baseline->samples[next].step == k) {
                               const Sample& b = baseline->samples[next];
                               d_eta = std::max(d_eta, surface_norm(s.eta - b.eta, 2.0));
                               d_u = std::max(d_u, norm_l2(s.u - b.u));
                           }
                       }
                   }});
    out.summary = simulate(init, scheme, obs, psi);
    out.metric = d_eta + d_u;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = threads > 0 ? std::size_t(threads) : std::max(1u, hw);
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

using Setter = std::function<void(SchemeConfig&, double)>;

SweepResult run_sweep(const ExperimentConfig& cfg, const InitialData& data, const std::vector<double>& values,
                      const std::string& name, const Setter& set, bool compensate) {
    for (double v : values)
        if (!(v >= 0.0)) throw ValidationError(name, "sweep values must be nonnegative");
    validate(cfg.scheme);
    const GridPtr g = data.eta0.grid();
    const VolumeField u0 = repair(data.u0, data.eta0);

    auto setup = [&](double v, SchemeConfig& sc, FluidState& init, Compensator& psi) {
        sc = cfg.scheme;
        set(sc, v);
        init = make_state(u0, initial_pressure(u0, data.eta0, sc.sigma), data.eta0, 0.0, sc.j_floor);
        psi = compensate && sc.kappa > 0.0 ? Compensator(data.eta0, sc.compensator_tau) : Compensator();
    };

    SweepResult res;
    res.parameter = name;
    res.runs.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) res.runs[i].value = values[i];

    Trajectory base;
    SweepRun base_run;
    base_run.value = 0.0;
    {
        SchemeConfig sc;
        FluidState init;
        Compensator psi;
        setup(0.0, sc, init, psi);
        run_member(cfg, sc, init, psi, &base, nullptr, base_run);
        base_run.metric = 0.0;
    }
    if (base_run.summary.aborted) {
        res.complete = false;
        res.failure = name + " = 0: " + base_run.summary.failure;
    }

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == 0.0) {
            res.runs[i] = base_run;
        } else if (res.complete) {
            todo.push_back(i);
        }
    }
    std::vector<std::string> errors(values.size());
    parallel_for(todo.size(), cfg.threads, [&](std::size_t j) {
        const std::size_t i = todo[j];
        try {
            SchemeConfig sc;
            FluidState init;
            Compensator psi;
            setup(values[i], sc, init, psi);
            run_member(cfg, sc, init, psi, nullptr, &base, res.runs[i]);
            if (res.runs[i].summary.aborted) errors[i] = res.runs[i].summary.failure;
        } catch (const NumericalError& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!errors[i].empty() && res.complete) {
            res.complete = false;
            res.failure = name + " = " + std::to_string(values[i]) + ": " + errors[i];
        }

    std::vector<double> v, m;
    for (const auto& r : res.runs) {
        v.push_back(r.value);
        m.push_back(r.metric);
    }
    res.order = fitted_order(v, m);
    res.monotone = nonincreasing(v, m);
    return res;
}

}  // namespace

SweepResult run_sigma_sweep(const ExperimentConfig& cfg, const InitialData& data, const std::vector<double>& sigmas) {
    return run_sweep(cfg, data, sigmas, "sigma", [](SchemeConfig& s, double v) { s.sigma = v; }, true);
}

SweepResult run_kappa_sweep(const ExperimentConfig& cfg, const InitialData& data, const std::vector<double>& kappas) {
    if (!(cfg.scheme.sigma > 0.0)) throw ValidationError("sigma", "the kappa sweep runs at fixed positive sigma");
    return run_sweep(cfg, data, kappas, "kappa", [](SchemeConfig& s, double v) { s.kappa = v; }, true);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit f;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return f;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

double fitted_order(const std::vector<double>& values, const std::vector<double>& metrics) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] > 0.0 && metrics[i] > 0.0) pts.emplace_back(values[i], metrics[i]);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first == b.first; }), pts.end());
    if (pts.size() > 3) pts.resize(3);
    if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> x, y;
    for (auto& [v, m] : pts) {
        x.push_back(std::log(v));
        y.push_back(std::log(m));
    }
    return fit_line(x, y).slope;
}

bool nonincreasing(const std::vector<double>& values, const std::vector<double>& metrics, double slack) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < values.size(); ++i) pts.emplace_back(values[i], metrics[i]);
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].second > (1.0 + slack) * pts[i - 1].second) return false;
    return true;
}

DecayReport run_decay(const ExperimentConfig& cfg, const InitialData& data, const DecayWindow& window) {
    const SchemeConfig& sc = cfg.scheme;
    validate(sc);
    if (!(window.t1 > window.t0)) throw ValidationError("window", "empty fit window");
    PreparedData prep = prepare(data.u0, data.eta0, sc.sigma);
    const Compensator psi = sc.kappa > 0.0 ? Compensator(data.eta0, sc.compensator_tau) : Compensator();
    SweepRun run;
    run_member(cfg, sc, prep.state, psi, nullptr, nullptr, run);

    DecayReport rep;
    rep.series = std::move(run.reports);
    rep.summary = std::move(run.summary);
    std::vector<double> t, logE, logT;
    double emax = 0.0;
    for (const auto& r : rep.series) emax = std::max(emax, r.E);
    if (emax == 0.0) {
        rep.degenerate = true;
        return rep;
    }
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.series) {
        if (r.t < window.t0 - 1e-12 || r.t > window.t1 + 1e-12) continue;
        if (r.E > prev) rep.monotone = false;
        prev = r.E;
        if (r.E <= 0.0) continue;
        t.push_back(r.t);
        logE.push_back(std::log(r.E));
        logT.push_back(std::log1p(r.t));
    }
    if (t.size() < 3) throw FitUnreliable("fewer than three energy samples in the fit window");
    const LinearFit fe = fit_line(t, logE);
    rep.rate = -fe.slope;
    rep.r2_exp = fe.r2;
    rep.best_model = "exponential";
    double best = fe.r2;
    if (sc.sigma == 0.0) {
        const LinearFit fa = fit_line(logT, logE);
        rep.has_algebraic = true;
        rep.exponent = -fa.slope;
        rep.r2_alg = fa.r2;
        if (fa.r2 > fe.r2) {
            rep.best_model = "algebraic";
            best = fa.r2;
        }
    }
    if (best < 0.9) throw FitUnreliable("no decay model reaches R^2 >= 0.9");
    return rep;
}

AuditReport audit_data(const VolumeField& u0, const SurfaceField& eta0, double sigma) {
    AuditReport a;
    PreparedData d = prepare(u0, eta0, sigma);
    a.before = d.before;
    a.after = d.after;
    a.u0_norm = norm_l2(u0);
    a.repaired_norm = norm_l2(d.state.u);
    a.repair_change = max_abs(d.state.u - u0);
    a.idempotence = max_abs(repair(d.state.u, eta0) - d.state.u);
    a.p0_norm = volume_norm(d.state.p, 1);
    a.accel_norm = norm_l2(d.accel);
    a.du_dt_norm = norm_l2(d.du_dt);
    a.eta0_norm = surface_norm(eta0, 1.5);
    return a;
}

}  // namespace fsw
