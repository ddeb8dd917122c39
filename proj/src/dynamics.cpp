#include "fsw/dynamics.hpp"

#include <chrono>
#include <cmath>

#include "fsw/errors.hpp"
#include "fsw/operators.hpp"

namespace fsw {

void validate(const SchemeConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ValidationError("dt", "must be positive");
    if (!(cfg.sigma >= 0.0)) throw ValidationError("sigma", "must be nonnegative");
    if (!(cfg.kappa >= 0.0)) throw ValidationError("kappa", "must be nonnegative");
    if (!(cfg.compensator_tau > 0.0)) throw ValidationError("compensator_tau", "must be positive");
    if (!(cfg.end_time >= 0.0)) throw ValidationError("end_time", "must be nonnegative");
    if (!(cfg.div_tol > 0.0)) throw ValidationError("div_tol", "must be positive");
    if (cfg.div_iterations < 0) throw ValidationError("div_iterations", "must be nonnegative");
}

FluidState make_state(VolumeField u, VolumeField p, SurfaceField eta, double t, double j_floor) {
    if (u.arity() != 3) throw GridMismatch("velocity must be a vector field");
    require_same(u.grid(), p.grid());
    require_same(u.grid(), eta.grid());
    FluidState s;
    s.geometry = std::make_shared<const GeometryState>(build_geometry(eta, nullptr, j_floor));
    s.u = std::move(u);
    s.p = std::move(p);
    s.eta = std::move(eta);
    s.t = t;
    return s;
}

FluidState zero_state(const GridPtr& g) { return make_state(VolumeField(g, 3), VolumeField(g), SurfaceField(g)); }

Compensator::Compensator(const SurfaceField& eta0, double tau) : lap_eta0_(lap(eta0)), tau_(tau), active_(true) {
    if (!(tau > 0.0)) throw ValidationError("compensator_tau", "must be positive");
}

SurfaceField Compensator::operator()(double t) const {
    if (!active_) return {};
    SurfaceField out = lap_eta0_;
    out *= -std::exp(-t / tau_);
    return out;
}

namespace {

// The flat correction cannot reach Nyquist modes (their derivatives are
// zero), so the residual it works on leaves them out.
VolumeField without_nyquist(const VolumeField& f) {
    Spectrum s = fft(f);
    const Grid& g = *s.grid;
    for (int l = 0; l < s.layers; ++l)
        for (int j2 = 0; j2 < g.n2(); ++j2)
            for (int j1 = 0; j1 < g.n1h(); ++j1)
                if (g.nyquist(j1, j2)) s.at(j1, j2, l) = 0;
    return ifft_volume(s);
}

SurfaceField neg_tangential_flux(const VolumeField& u, const SurfaceField& eta) {
    // -(u1 d1 eta + u2 d2 eta) on the top row
    SurfaceField t = mul(u.top(0), d1(eta));
    t += mul(u.top(1), d2(eta));
    t *= -1.0;
    return dealias(t);
}

SurfaceField with_zero_mean(const SurfaceField& f) {
    Spectrum s = fft(f);
    s.at(0, 0) = 0.0;
    return ifft_surface(s);
}

// The solve leaves transform rounding on the no-slip row.
void pin_bottom(VolumeField& u) {
    const SurfaceField zero(u.grid());
    for (int c = 0; c < 3; ++c) u.set_layer(0, zero, c);
}

SurfaceField psi_or_zero(const Compensator& psi, double t, const GridPtr& g) {
    return psi.active() ? psi(t) : SurfaceField(g);
}

}  // namespace

SurfaceField kinematic_flux(const VolumeField& u, const GeometryState& G) {
    SurfaceField f = u.top(2);
    if (!G.flat) f += neg_tangential_flux(u, G.eta);
    return f;
}

SurfaceField surface_velocity(const FluidState& s, double kappa, const SurfaceField* psi) {
    SurfaceField v = kinematic_flux(s.u, *s.geometry);
    if (kappa > 0.0) {
        v.axpy(kappa, lap(s.eta));
        if (psi && psi->size()) v.axpy(kappa, *psi);
    }
    return v;
}

ForcingF forcing_F(const FluidState& s, double sigma, const SurfaceField& eta_t) {
    const GeometryState& G = *s.geometry;
    const GridPtr& g = s.u.grid();
    ForcingF F;
    // dt eta_bar b~ K d3 u - u . grad_A u
    VolumeField coef = mul(poisson_extend(eta_t), btilde(g), G.K);
    VolumeField dz = d3(s.u);
    VolumeField adv = advect_A(s.u, s.u, G);
    F.F1 = VolumeField(g, 3);
    for (int c = 0; c < 3; ++c) {
        VolumeField t = mul(coef, dz.component(c));
        t -= adv.component(c);
        F.F1.set_component(c, dealias(t));
    }
    for (int i = 0; i < 3; ++i) {
        SurfaceField t = mul(s.eta, G.N[i]);
        t.axpy(-sigma, mul(G.H, G.N[i]));
        F.F3[i] = dealias(t);
    }
    F.F4 = kinematic_flux(s.u, G);
    return F;
}

VolumeField forcing_G2(const VolumeField& u, const GeometryState& G) {
    VolumeField out = div(u);
    if (!G.flat) out -= div_A(u, G);
    else out *= 0.0;
    return out;
}

ForcingG forcing_G(const FluidState& s, double sigma, const SurfaceField& eta_t) {
    const GeometryState& G = *s.geometry;
    const GridPtr& g = s.u.grid();
    ForcingG out;
    out.G1 = forcing_F(s, sigma, eta_t).F1;
    if (!G.flat) {
        out.G1 += lap_A(s.u, G);
        out.G1 -= lap(s.u);
        out.G1 -= grad_A(s.p, G);
        out.G1 += grad(s.p);
    }
    out.G2 = forcing_G2(s.u, G);

    const SurfaceField& eta = s.eta;
    const SurfaceField e1 = d1(eta), e2 = d2(eta);
    const SurfaceField leta = lap(eta);
    const VolumeField dz = d3(s.u);
    std::array<SurfaceField, 3> u1, u2, u3;  // d1 u_i, d2 u_i, d3 u_i at the top
    for (int i = 0; i < 3; ++i) {
        SurfaceField ui = s.u.top(i);
        u1[i] = d1(ui);
        u2[i] = d2(ui);
        u3[i] = dz.top(i);
    }
    const SurfaceField AK = G.AK.top(), BK = G.BK.top();
    SurfaceField Km1 = G.K.top();
    Km1 -= SurfaceField::constant(g, 1.0);
    SurfaceField curv = G.H - leta;  // H - Lap eta
    curv *= sigma;

    SurfaceField base = s.p.top();  // p - eta + sigma Lap eta
    base -= eta;
    base.axpy(sigma, leta);

    // (pI - D u) e3 - S_A(p,u) N + eta N - sigma H N - (eta - sigma Lap eta) e3
    SurfaceField g1 = mul(e1, base);
    g1.axpy(-2.0, mul(e1, u1[0] - mul(AK, u3[0])));
    g1 += mul(e2, mul(BK, u3[0]) + mul(AK, u3[1]) - u2[0] - u1[1]);
    g1 += mul(Km1, u3[0]);
    g1 -= mul(AK, u3[2]);
    g1 += mul(curv, e1);

    SurfaceField g2 = mul(e2, base);
    g2 += mul(e1, mul(AK, u3[1]) + mul(BK, u3[0]) - u1[1] - u2[0]);
    g2.axpy(-2.0, mul(e2, u2[1] - mul(BK, u3[1])));
    g2 += mul(Km1, u3[1]);
    g2 -= mul(BK, u3[2]);
    g2 += mul(curv, e2);

    SurfaceField g3 = mul(e1, mul(AK, u3[2]) - mul(G.K.top(), u3[0]) - u1[2]);
    g3 += mul(e2, mul(BK, u3[2]) - mul(G.K.top(), u3[1]) - u2[2]);
    g3.axpy(2.0, mul(Km1, u3[2]));
    g3 -= curv;

    out.G3 = {dealias(g1), dealias(g2), dealias(g3)};
    out.G4 = neg_tangential_flux(s.u, eta);
    return out;
}

SurfaceField surface_rhs(const FluidState& s, const SchemeConfig& cfg, const Compensator& psi) {
    SurfaceField r = cfg.linear ? s.u.top(2) : kinematic_flux(s.u, *s.geometry);
    if (cfg.kappa > 0.0) {
        r.axpy(cfg.kappa, lap(s.eta));
        if (psi.active()) r.axpy(cfg.kappa, psi(s.t));
    }
    return r;
}

Stepper::Stepper(GridPtr g, const SchemeConfig& cfg, const Compensator& psi)
    : grid_(std::move(g)), cfg_(cfg), psi_(psi) {
    validate(cfg_);
    split_ = std::make_unique<FlatStokesSolver>(grid_, StokesVariant::FreeStress, 1.0 / cfg_.dt);
    if (cfg_.mode == StepMode::Coupled)
        coupled_ = std::make_unique<FlatStokesSolver>(grid_, StokesVariant::FreeStress, 1.0 / cfg_.dt,
                                                      SurfaceCoupling{cfg_.dt, cfg_.sigma, cfg_.kappa});
}

Stepper::~Stepper() = default;

FluidState Stepper::step(const FluidState& s) const {
    require_same(grid_, s.u.grid());
    return cfg_.mode == StepMode::Coupled ? step_coupled(s) : step_split(s);
}

void Stepper::correct_divergence(VolumeField& u, VolumeField& p, const GeometryState& G) const {
    if (cfg_.linear) {
        if (max_abs(div(u)) > cfg_.div_tol) throw StepRejected("divergence constraint violated after the step");
        pin_bottom(u);
        return;
    }
    VolumeField r = without_nyquist(div_A(u, G));
    for (int it = 0; it < cfg_.div_iterations && max_abs(r) > 1e-12; ++it) {
        StokesRhs rhs{VolumeField(grid_, 3), -1.0 * r, {}, StokesVariant::FreeStress};
        for (auto& c : rhs.bc_top) c = SurfaceField(grid_);
        StokesSolution d = split_->solve(rhs);
        u += d.u;
        p += d.p;
        r = without_nyquist(div_A(u, G));
    }
    if (max_abs(r) > cfg_.div_tol) throw StepRejected("div_A u exceeds the admissibility tolerance");
    pin_bottom(u);
}

FluidState Stepper::step_split(const FluidState& s) const {
    const GridPtr& g = grid_;
    const double dt = cfg_.dt;
    const SurfaceField psi = psi_or_zero(psi_, s.t, g);

    // surface: (1/dt + kappa k^2) eta+ = eta/dt + kappa Psi + u.N
    SurfaceField flux = cfg_.linear ? s.u.top(2) : kinematic_flux(s.u, *s.geometry);
    flux = with_zero_mean(flux);
    SurfaceField rhs = s.eta;
    rhs.axpy(dt, flux);
    if (cfg_.kappa > 0.0) rhs.axpy(dt * cfg_.kappa, psi);
    Spectrum es = fft(rhs);
    for (int j2 = 0; j2 < g->n2(); ++j2)
        for (int j1 = 0; j1 < g->n1h(); ++j1) {
            const double kk = g->k1(j1) * g->k1(j1) + g->k2(j2) * g->k2(j2);
            es.at(j1, j2) /= 1.0 + dt * cfg_.kappa * kk;
        }
    SurfaceField eta_new = ifft_surface(es);
    auto geo = std::make_shared<const GeometryState>(build_geometry(eta_new, nullptr, cfg_.j_floor));

    StokesRhs m;
    m.variant = StokesVariant::FreeStress;
    m.f = s.u;
    m.f *= 1.0 / dt;
    SurfaceField top3 = eta_new;
    if (cfg_.sigma > 0.0) top3.axpy(-cfg_.sigma, lap(eta_new));
    m.bc_top = {SurfaceField(g), SurfaceField(g), top3};
    if (cfg_.linear) {
        m.h = VolumeField(g);
    } else {
        const SurfaceField eta_t = surface_velocity(s, cfg_.kappa, &psi);
        ForcingG G = forcing_G(s, cfg_.sigma, eta_t);
        m.f += G.G1;
        m.h = forcing_G2(s.u, *geo);
        for (int i = 0; i < 3; ++i) m.bc_top[i] += G.G3[i];
    }
    StokesSolution sol = split_->solve(m);
    correct_divergence(sol.u, sol.p, *geo);

    FluidState out;
    out.u = std::move(sol.u);
    out.p = std::move(sol.p);
    out.eta = std::move(eta_new);
    out.t = s.t + dt;
    out.geometry = std::move(geo);
    return out;
}

FluidState Stepper::step_coupled(const FluidState& s) const {
    const GridPtr& g = grid_;
    const double dt = cfg_.dt;
    const SurfaceField psi = psi_or_zero(psi_, s.t, g);

    StokesRhs m;
    m.variant = StokesVariant::FreeStress;
    m.f = s.u;
    m.f *= 1.0 / dt;
    m.bc_top = {SurfaceField(g), SurfaceField(g), SurfaceField(g)};
    SurfaceField eta_rhs = s.eta;
    eta_rhs *= 1.0 / dt;
    if (cfg_.kappa > 0.0) eta_rhs.axpy(cfg_.kappa, psi);
    if (cfg_.linear) {
        m.h = VolumeField(g);
    } else {
        const SurfaceField eta_t = surface_velocity(s, cfg_.kappa, &psi);
        ForcingG G = forcing_G(s, cfg_.sigma, eta_t);
        m.f += G.G1;
        m.h = G.G2;
        m.bc_top = G.G3;
        eta_rhs += with_zero_mean(G.G4);
    }
    SurfaceField eta_new;
    StokesSolution sol = coupled_->solve_coupled(m, eta_rhs, eta_new);
    auto geo = std::make_shared<const GeometryState>(build_geometry(eta_new, nullptr, cfg_.j_floor));
    correct_divergence(sol.u, sol.p, *geo);

    FluidState out;
    out.u = std::move(sol.u);
    out.p = std::move(sol.p);
    out.eta = std::move(eta_new);
    out.t = s.t + dt;
    out.geometry = std::move(geo);
    return out;
}

FluidState step(const FluidState& s, const SchemeConfig& cfg, const Compensator& psi) {
    Stepper st(s.u.grid(), cfg, psi);
    return st.step(s);
}

long step_count(const SchemeConfig& cfg) {
    validate(cfg);
    return std::lround(std::ceil(cfg.end_time / cfg.dt - 1e-9));
}

SimulationSummary simulate(const FluidState& initial, const SchemeConfig& cfg, const std::vector<Observer>& observers,
                           const Compensator& psi) {
    const auto t0 = std::chrono::steady_clock::now();
    const long n = step_count(cfg);
    SimulationSummary sum;
    sum.final_state = initial;
    auto notify = [&](const FluidState& st, long k, bool last) {
        for (const auto& o : observers) {
            const int stride = std::max(1, o.stride);
            if (k % stride == 0 || last) o.fn(st, k);
        }
    };
    notify(initial, 0, n == 0);
    if (n > 0) {
        Stepper stepper(initial.u.grid(), cfg, psi);
        for (long k = 1; k <= n; ++k) {
            try {
                FluidState next = stepper.step(sum.final_state);
                next.t = initial.t + double(k) * cfg.dt;
                sum.final_state = std::move(next);
            } catch (const StepRejected& e) {
                ++sum.rejections;
                sum.aborted = true;
                sum.failure = e.what();
                break;
            } catch (const DegenerateMap& e) {
                sum.aborted = true;
                sum.failure = e.what();
                break;
            }
            sum.steps = k;
            notify(sum.final_state, k, k == n);
        }
    }
    sum.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sum;
}

}  // namespace fsw
