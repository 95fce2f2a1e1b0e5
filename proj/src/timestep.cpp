#include "npe/timestep.hpp"

#include <algorithm>
#include <cmath>

#include "npe/errors.hpp"

namespace npe {

void validate_stepper(const StepperConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ValidationError("stepper.dt must be > 0");
    if (cfg.t_end < 0.0) throw ValidationError("stepper.t_end must be >= 0");
    if (cfg.dt > cfg.dt_max) throw ValidationError("stepper.dt must be <= dt_max");
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
        throw ValidationError("stepper.cfl_safety must be in (0, 1]");
}

namespace {

// exp(-kappa |k|^2 s) for every mode, row-major.
std::vector<double> exp_factors(const Grid& g, double kappa, double s) {
    std::vector<double> e(static_cast<size_t>(g.size()));
    for (int i = 0; i < g.n; ++i) {
        const double k1 = g.wavenumber(i);
        for (int j = 0; j < g.n; ++j) {
            const double k2 = g.wavenumber(j);
            e[static_cast<size_t>(i) * g.n + j] = std::exp(-kappa * (k1 * k1 + k2 * k2) * s);
        }
    }
    return e;
}

struct StepFactors {
    // Half- and full-step exponentials for (rho,sigma) and omega.
    std::vector<double> half_c, full_c;
    std::vector<double> half_w, full_w;
};

StepFactors make_factors(const Grid& g, const PhysParams& p, double dt) {
    const double kw = (p.variant == Variant::NPNS) ? p.nu : 0.0;
    return {exp_factors(g, p.D, 0.5 * dt), exp_factors(g, p.D, dt),
            exp_factors(g, kw, 0.5 * dt), exp_factors(g, kw, dt)};
}

void scale(SpectralField2D& f, const std::vector<double>& e) {
    auto& c = f.coeffs();
    for (size_t i = 0; i < c.size(); ++i) c[i] *= e[i];
}

SimState scaled(const SimState& s, const StepFactors& f, bool full) {
    SimState out = s;
    scale(out.rho, full ? f.full_c : f.half_c);
    scale(out.sigma, full ? f.full_c : f.half_c);
    scale(out.omega, full ? f.full_w : f.half_w);
    return out;
}

void axpy(SimState& y, double a, const Tendency& t) {
    auto add = [a](SpectralField2D& dst, const SpectralField2D& src) {
        auto& d = dst.coeffs();
        const auto& s = src.coeffs();
        for (size_t i = 0; i < d.size(); ++i) d[i] += a * s[i];
    };
    add(y.rho, t.d_rho);
    add(y.sigma, t.d_sigma);
    add(y.omega, t.d_omega);
}

void scale_tendency(Tendency& t, const StepFactors& f, bool full) {
    scale(t.d_rho, full ? f.full_c : f.half_c);
    scale(t.d_sigma, full ? f.full_c : f.half_c);
    scale(t.d_omega, full ? f.full_w : f.half_w);
}

void add_tendency(Tendency& dst, const Tendency& src) {
    dst.d_rho += src.d_rho;
    dst.d_sigma += src.d_sigma;
    dst.d_omega += src.d_omega;
}

SimState step_with_factors(const SimState& s, const PhysParams& p, double dt,
                           const StepFactors& f,
                           const std::function<Tendency(const SimState&, int)>& rhs) {
    // Integrating-factor RK4 (Lawson): with E1 = exp(L dt/2), E2 = exp(L dt),
    //   A = N(y)
    //   B = N(E1 (y + dt/2 A))
    //   C = N(E1 y + dt/2 B)
    //   D = N(E2 y + dt E1 C)
    //   y' = E2 y + dt/6 (E2 A + 2 E1 (B + C) + D)
    const Tendency a = rhs(s, 0);

    SimState yb = s;
    axpy(yb, 0.5 * dt, a);
    yb = scaled(yb, f, false);
    yb.time = s.time + 0.5 * dt;
    const Tendency b = rhs(yb, 1);

    SimState yc = scaled(s, f, false);
    axpy(yc, 0.5 * dt, b);
    yc.time = s.time + 0.5 * dt;
    const Tendency c = rhs(yc, 2);

    SimState yd = scaled(s, f, true);
    Tendency ec = c;
    scale_tendency(ec, f, false);
    axpy(yd, dt, ec);
    yd.time = s.time + dt;
    const Tendency d = rhs(yd, 3);

    SimState out = scaled(s, f, true);
    Tendency ea = a;
    scale_tendency(ea, f, true);
    axpy(out, dt / 6.0, ea);
    Tendency ebc = b;
    add_tendency(ebc, c);
    scale_tendency(ebc, f, false);
    axpy(out, dt / 3.0, ebc);
    axpy(out, dt / 6.0, d);

    out.time = s.time + dt;
    // Neutrality and mean-zero vorticity are exact invariants; remove the
    // roundoff drift so the Poisson solves stay well-posed.
    out.rho.set_mean(0.0);
    out.omega.set_mean(0.0);

    if (!out.rho.is_finite() || !out.sigma.is_finite() || !out.omega.is_finite())
        throw NonFiniteError("non-finite state after step", out.time);
    (void)p;
    return out;
}

} // namespace

SimState step(const SimState& s, const PhysParams& p, double dt) {
    if (!(dt > 0.0)) throw ValidationError("step: dt must be > 0");
    const StepFactors f = make_factors(s.rho.grid(), p, dt);
    return step_with_factors(s, p, dt, f, [&p](const SimState& y, int) {
        return tendency(y, p, TendencyParts::Nonstiff);
    });
}

SimState step_with_rhs(const SimState& s, const PhysParams& p, double dt, const StageRhs& rhs) {
    if (!(dt > 0.0)) throw ValidationError("step_with_rhs: dt must be > 0");
    const StepFactors f = make_factors(s.rho.grid(), p, dt);
    return step_with_factors(s, p, dt, f, rhs);
}

double stable_dt(const SimState& s, const PhysParams& p, const StepperConfig& cfg) {
    const auto [u1, u2] = velocity_from_vorticity(s.omega);
    const auto p1 = u1.to_samples();
    const auto p2 = u2.to_samples();
    double umax = 0.0;
    for (size_t i = 0; i < p1.size(); ++i)
        umax = std::max({umax, std::abs(p1[i]), std::abs(p2[i])});
    const double floor_u = 1e-8;
    const double h = s.rho.grid().cell_size();
    (void)p;
    return std::min(cfg.dt_max, cfg.cfl_safety * h / std::max(umax, floor_u));
}

SimState integrate(SimState s, const PhysParams& p, const StepperConfig& cfg,
                   const StepCallback& on_step) {
    validate_stepper(cfg);
    if (cfg.t_end < s.time)
        throw ValidationError("integrate: t_end is before the state time");
    if (cfg.t_end == s.time) return s;

    const double span = cfg.t_end - s.time;
    const double t0 = s.time;

    if (!cfg.adaptive) {
        // Fixed-dt schedule. When the span is an integer number of steps
        // every step uses exactly cfg.dt, which keeps split runs bitwise
        // consistent with uninterrupted ones.
        const double ratio = span / cfg.dt;
        long nsteps = std::lround(ratio);
        bool exact = nsteps > 0 && std::abs(ratio - static_cast<double>(nsteps)) < 1e-9;
        if (!exact) nsteps = static_cast<long>(std::ceil(ratio - 1e-12));

        const StepFactors f = make_factors(s.rho.grid(), p, cfg.dt);
        auto rhs = [&p](const SimState& y, int) { return tendency(y, p, TendencyParts::Nonstiff); };
        for (long i = 0; i < nsteps; ++i) {
            const bool last = (i == nsteps - 1);
            double dt = cfg.dt;
            if (!exact && last) dt = cfg.t_end - s.time;
            if (dt == cfg.dt)
                s = step_with_factors(s, p, dt, f, rhs);
            else
                s = step(s, p, dt);
            if (last) s.time = cfg.t_end;
            if (on_step) on_step(s);
        }
        (void)t0;
        return s;
    }

    // CFL-adaptive.
    while (s.time < cfg.t_end) {
        double dt = std::min(stable_dt(s, p, cfg), cfg.t_end - s.time);
        const bool last = (cfg.t_end - s.time) <= dt * (1.0 + 1e-9);
        if (last) dt = cfg.t_end - s.time;
        s = step(s, p, dt);
        if (last) s.time = cfg.t_end;
        if (on_step) on_step(s);
        if (last) break;
    }
    return s;
}

} // namespace npe
