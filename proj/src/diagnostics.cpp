#include "fsw/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "fsw/errors.hpp"
#include "fsw/operators.hpp"

namespace fsw {

namespace {

double sq(double x) { return x * x; }

// Horizontal derivative d1^a1 d2^a2 of a spectrum; Nyquist rows of a
// differentiated direction are dropped as in spectral_d1/d2.
Spectrum horizontal_derivative(const Spectrum& s, int a1, int a2) {
    Spectrum out = s;
    const Grid& g = *s.grid;
    const cplx I(0, 1);
    for (int l = 0; l < s.layers; ++l)
        for (int j2 = 0; j2 < g.n2(); ++j2)
            for (int j1 = 0; j1 < g.n1h(); ++j1) {
                cplx& c = out.at(j1, j2, l);
                if ((a1 > 0 && 2 * j1 == g.n1()) || (a2 > 0 && 2 * j2 == g.n2())) {
                    c = 0.0;
                    continue;
                }
                c *= std::pow(I * g.k1(j1), a1) * std::pow(I * g.k2(j2), a2);
            }
    return out;
}

double sum_sq(const VolumeField& f) {
    double s = 0.0;
    for (int c = 0; c < f.arity(); ++c) {
        VolumeField fc = f.component(c);
        s += integrate(mul(fc, fc));
    }
    return s;
}

double volume_sq(const VolumeField& f, int k) {
    if (k <= 0) return sum_sq(f);
    double total = 0.0;
    for (int c = 0; c < f.arity(); ++c) {
        const Spectrum s = fft(f.component(c));
        for (int a1 = 0; a1 <= k; ++a1)
            for (int a2 = 0; a1 + a2 <= k; ++a2) {
                VolumeField h = ifft_volume(horizontal_derivative(s, a1, a2));
                for (int a3 = 0; a1 + a2 + a3 <= k; ++a3) {
                    total += integrate(mul(h, h));
                    if (a1 + a2 + a3 < k) h = d3(h);
                }
            }
    }
    return total;
}

double vsq(const VolumeField& f, int k, const Truncation& tr) { return volume_sq(f, std::min(k, tr.volume_clamp)); }

double ssq(const SurfaceField& f, double s, const Truncation& tr) {
    return sq(surface_norm(f, std::min(s, tr.surface_clamp)));
}

SurfaceField flux_of(const FluidState& s, bool linear) {
    return linear ? s.u.top(2) : kinematic_flux(s.u, *s.geometry);
}

}  // namespace

double surface_norm(const SurfaceField& f, double s) {
    const Grid& g = *f.grid();
    const Spectrum m = fft(f);
    double acc = 0.0;
    for (int j2 = 0; j2 < g.n2(); ++j2)
        for (int j1 = 0; j1 < g.n1h(); ++j1) {
            const double kk = sq(g.k1(j1)) + sq(g.k2(j2));
            acc += g.hermitian_weight(j1) * std::pow(1.0 + kk, s) * std::norm(m.at(j1, j2));
        }
    return std::sqrt(acc * g.l1() * g.l2());
}

double volume_norm(const VolumeField& f, int k, bool allow_high_order) {
    if (k < 0) throw OrderTooHigh("negative Sobolev order");
    if (k > 4 && !allow_high_order) throw OrderTooHigh("volume norms above order 4 amplify collocation noise");
    return std::sqrt(volume_sq(f, k));
}

TimeDerivatives recover_time_derivatives(const FluidState& s, double sigma, const FluidState* previous, double kappa,
                                         const SurfaceField* psi) {
    const GeometryState& G = *s.geometry;
    TimeDerivatives d;
    d.eta_t = surface_velocity(s, kappa, psi);
    d.u_t = forcing_F(s, sigma, d.eta_t).F1;
    d.u_t += lap_A(s.u, G);
    d.u_t -= grad_A(s.p, G);
    if (previous && s.t > previous->t) {
        VolumeField pt = s.p - previous->p;
        pt *= 1.0 / (s.t - previous->t);
        d.p_t = std::move(pt);
    }
    return d;
}

double energy(const FluidState& s, double sigma, const Truncation& tr, const TimeDerivatives* dts) {
    TimeDerivatives local;
    if (!dts && tr.jmax >= 1) {
        local = recover_time_derivatives(s, sigma);
        dts = &local;
    }
    const int n = tr.n;
    double E = 0.0;
    for (int j = 0; j <= std::min(n, tr.jmax); ++j) E += vsq(j == 0 ? s.u : dts->u_t, 2 * n - 2 * j, tr);
    for (int j = 0; j <= std::min(n - 1, tr.jmax); ++j) {
        if (j == 0) E += vsq(s.p, 2 * n - 1, tr);
        else if (dts && dts->p_t) E += vsq(*dts->p_t, 2 * n - 2 * j - 1, tr);
    }
    E += sigma * ssq(s.eta, 2 * n + 1, tr) + ssq(s.eta, 2 * n, tr);
    for (int j = 1; j <= std::min(n + 1, tr.jmax); ++j) E += ssq(dts->eta_t, 2 * n - 2 * j + 1.5, tr);
    return E;
}

double dissipation(const FluidState& s, double sigma, const Truncation& tr, const TimeDerivatives* dts) {
    TimeDerivatives local;
    if (!dts && tr.jmax >= 1) {
        local = recover_time_derivatives(s, sigma);
        dts = &local;
    }
    const int n = tr.n;
    double D = 0.0;
    for (int j = 0; j <= std::min(n, tr.jmax); ++j) D += vsq(j == 0 ? s.u : dts->u_t, 2 * n - 2 * j + 1, tr);
    for (int j = 0; j <= std::min(n - 1, tr.jmax); ++j) {
        if (j == 0) D += vsq(s.p, 2 * n, tr);
        else if (dts && dts->p_t) D += vsq(*dts->p_t, 2 * n - 2 * j, tr);
    }
    D += sq(sigma) * ssq(s.eta, 2 * n + 1.5, tr) + ssq(s.eta, 2 * n - 0.5, tr);
    if (tr.jmax >= 1) {
        D += sq(sigma) * ssq(dts->eta_t, 2 * n + 0.5, tr) + ssq(dts->eta_t, 2 * n - 0.5, tr);
    }
    return D;
}

double surface_functional(const SurfaceField& eta, double s_F) { return sq(surface_norm(eta, s_F)); }

double gradient_functional(const VolumeField& u) {
    const GridPtr& g = u.grid();
    VolumeField g1(g), g2(g);
    double trace = 0.0;
    for (int c = 0; c < u.arity(); ++c) {
        const auto grad1 = gradient(u.component(c));
        for (int a = 0; a < 3; ++a) {
            g1 += mul(grad1[a], grad1[a]);
            const auto grad2 = gradient(grad1[a]);
            for (int b = 0; b < 3; ++b) g2 += mul(grad2[b], grad2[b]);
        }
        const SurfaceField top = u.top(c);
        trace += sq(surface_norm(d1(top), 2.0)) + sq(surface_norm(d2(top), 2.0));
    }
    return max_abs(g1) + max_abs(g2) + trace;
}

double balance_energy(const FluidState& s, double sigma, bool linear) {
    const GeometryState& G = *s.geometry;
    double e = 0.0;
    for (int c = 0; c < 3; ++c) {
        VolumeField uc = s.u.component(c);
        e += linear ? integrate(mul(uc, uc)) : integrate(mul(G.J, uc, uc));
    }
    e += integrate(mul(s.eta, s.eta));
    if (sigma > 0.0) e += sigma * (integrate(mul(d1(s.eta), d1(s.eta))) + integrate(mul(d2(s.eta), d2(s.eta))));
    return 0.5 * e;
}

namespace {

double interval_defect(const FluidState& a, const FluidState& b, double e_a, double e_b, const BalanceOptions& opt) {
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) throw InsufficientHistory("snapshots must advance in time");
    const GeometryState& G = *b.geometry;
    const double diss =
        opt.linear ? frobenius_sq_integral(symgrad(b.u)) : frobenius_sq_integral(symgrad_A(b.u, G), &G.J);
    double work = 0.0;
    if (!opt.linear && opt.sigma > 0.0) work += opt.sigma * integrate(mul(G.H - lap(b.eta), flux_of(b, false)));
    if (opt.kappa > 0.0) {
        SurfaceField lhs = b.eta;
        lhs.axpy(-opt.sigma, lap(b.eta));
        SurfaceField rhs = lap(b.eta);
        if (opt.psi && opt.psi->active()) rhs += (*opt.psi)(a.t);
        work += opt.kappa * integrate(mul(lhs, rhs));
    }
    return (e_b - e_a) / dt + 0.5 * diss - work;
}

}  // namespace

std::vector<double> balance_defects(const std::vector<FluidState>& history, const BalanceOptions& opt) {
    if (history.size() < 2) throw InsufficientHistory("energy balance needs at least two snapshots");
    std::vector<double> out;
    out.reserve(history.size() - 1);
    double e_prev = balance_energy(history[0], opt.sigma, opt.linear);
    for (std::size_t k = 1; k < history.size(); ++k) {
        const double e = balance_energy(history[k], opt.sigma, opt.linear);
        out.push_back(interval_defect(history[k - 1], history[k], e_prev, e, opt));
        e_prev = e;
    }
    return out;
}

double BalanceTracker::push(const FluidState& s) {
    const double e = balance_energy(s, opt_.sigma, opt_.linear);
    last_ = 0.0;
    if (prev_) {
        last_ = interval_defect(*prev_, s, e_prev_, e, opt_);
        sum_abs_ += std::abs(last_);
        ++count_;
    }
    prev_ = s;
    e_prev_ = e;
    return last_;
}

double balance_residual(const std::vector<FluidState>& history, const BalanceOptions& opt) {
    const std::vector<double> d = balance_defects(history, opt);
    double s = 0.0;
    for (double x : d) s += std::abs(x);
    return s / double(d.size());
}

EnergyReport make_report(const FluidState& s, double sigma, const Truncation& tr, double balance,
                         const FluidState* previous) {
    EnergyReport r;
    const TimeDerivatives dts = recover_time_derivatives(s, sigma, previous);
    r.t = s.t;
    r.E = energy(s, sigma, tr, &dts);
    r.D = dissipation(s, sigma, tr, &dts);
    r.F2N = surface_functional(s.eta, tr.s_F);
    r.Kcal = gradient_functional(s.u);
    r.mass = integrate(s.eta);
    r.balance_residual = balance;
    r.n = tr.n;
    r.jmax = tr.jmax;
    r.s_F = tr.s_F;
    return r;
}

}  // namespace fsw
