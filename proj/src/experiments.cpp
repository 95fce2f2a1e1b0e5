#include "npe/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "npe/errors.hpp"

namespace npe {

SimState regularize_initial_data(const SimState& state0, double kappa) {
    if (!(kappa > 0.0)) throw ValidationError("regularize_initial_data: kappa must be > 0");
    SimState out;
    out.time = state0.time;
    out.rho = mollify(state0.rho, kappa);
    out.sigma = mollify(state0.sigma, kappa);
    const int kmax = static_cast<int>(std::floor(1.0 / kappa));
    const int m = count_modes_within(state0.omega.grid(), kmax);
    out.omega = project_low_modes(state0.omega, m);
    return out;
}

std::string inviscid_mode_name(InviscidMode m) {
    return m == InviscidMode::Matched ? "matched" : "regularized";
}

namespace {

struct MonitoredRun {
    std::vector<SimState> at_samples;
    double energy0 = 0.0;
    double sup_energy = 0.0;
    double sup_omega_l2 = 0.0;
    double sup_grad_phi = 0.0;
    bool envelope_ok = true;
    bool completed = false;
    std::string error;
};

double energy_of(const SimState& s) {
    SpectralField2D fluct = s.sigma;
    fluct.set_mean(0.0);
    const double a = l2_norm(s.rho);
    const double b = l2_norm(fluct);
    return 0.5 * (a * a + b * b);
}

double grad_phi_sup_of(const SimState& s, double eps) {
    const SpectralField2D phi = poisson_potential(s.rho, eps);
    const auto px = derivative(phi, Deriv::Dx).to_samples();
    const auto py = derivative(phi, Deriv::Dy).to_samples();
    double m = 0.0;
    for (size_t i = 0; i < px.size(); ++i) m = std::max(m, std::hypot(px[i], py[i]));
    return m;
}

MonitoredRun run_with_samples(SimState s, const PhysParams& p, StepperConfig st,
                              const std::vector<double>& sample_times, int monitor_every) {
    MonitoredRun r;
    const double t0 = s.time;
    r.energy0 = energy_of(s);
    r.sup_energy = r.energy0;
    r.sup_omega_l2 = l2_norm(s.omega);
    r.sup_grad_phi = grad_phi_sup_of(s, p.eps);

    long step_count = 0;
    auto monitor = [&](const SimState& y) {
        if (++step_count % monitor_every != 0) return;
        const double e = energy_of(y);
        r.sup_energy = std::max(r.sup_energy, e);
        if (e > r.energy0 * std::exp(-2.0 * p.D * (y.time - t0)) * (1.0 + 1e-6))
            r.envelope_ok = false;
        r.sup_omega_l2 = std::max(r.sup_omega_l2, l2_norm(y.omega));
        r.sup_grad_phi = std::max(r.sup_grad_phi, grad_phi_sup_of(y, p.eps));
    };

    try {
        for (double ts : sample_times) {
            st.t_end = ts;
            s = integrate(std::move(s), p, st, monitor);
            r.at_samples.push_back(s);
        }
        r.completed = true;
    } catch (const NonFiniteError& e) {
        r.error = e.what();
    }
    return r;
}

void run_parallel(std::vector<std::function<void()>> jobs, unsigned max_threads) {
    if (max_threads <= 1 || jobs.size() <= 1) {
        for (auto& j : jobs) j();
        return;
    }
    std::atomic<size_t> next{0};
    const unsigned nthreads = std::min<unsigned>(max_threads, static_cast<unsigned>(jobs.size()));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                jobs[i]();
            }
        });
    for (auto& th : pool) th.join();
}

std::vector<SlopeFit> fit_slopes(const SweepReport& report, const std::vector<double>& s_list) {
    std::vector<SlopeFit> fits;
    if (report.sample_times.empty()) return fits;
    for (double s : s_list) {
        std::vector<double> lx, ly;
        for (const auto& m : report.members) {
            if (!m.completed || m.param <= 0.0 || m.samples.empty()) continue;
            const auto& norms = m.samples.back().norms;
            const auto it = std::find_if(norms.begin(), norms.end(),
                                         [s](const DifferenceNorms& d) { return d.s == s; });
            if (it == norms.end() || !(it->combined() > 0.0)) continue;
            lx.push_back(std::log(m.param));
            ly.push_back(std::log(it->combined()));
        }
        if (lx.size() < 2) continue;
        const double n = static_cast<double>(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / n;
        double ss = 0.0;
        for (size_t i = 0; i < lx.size(); ++i) {
            const double resid = ly[i] - (icpt + slope * lx[i]);
            ss += resid * resid;
        }
        fits.push_back({s, slope, std::sqrt(ss / n)});
    }
    return fits;
}

int default_monitor_every(double dt) {
    return std::max(1, static_cast<int>(std::lround(0.01 / dt)));
}

} // namespace

SweepReport inviscid_sweep(const SimState& state0, const PhysParams& base,
                           const StepperConfig& stepper, const std::vector<double>& nu_list,
                           const std::vector<double>& sample_times, InviscidMode mode,
                           unsigned max_threads) {
    validate_state(state0);
    if (sample_times.empty()) throw ValidationError("inviscid_sweep: no sample times");
    for (double nu : nu_list)
        if (nu < 0.0) throw ValidationError("inviscid_sweep: nu must be >= 0");

    SweepReport report;
    report.parameter = "nu";
    report.mode = inviscid_mode_name(mode);
    report.values = nu_list;
    report.sample_times = sample_times;
    report.members.resize(nu_list.size());

    const int mon = default_monitor_every(stepper.dt);
    const std::vector<double> s_list = {1.0, 2.0, 3.0};

    PhysParams inviscid = base;
    inviscid.variant = Variant::NPE;
    inviscid.nu = 0.0;
    inviscid.ell = 0.0;

    // Baselines: one shared inviscid run in matched mode, one per branch
    // (with kappa-regularized data) in regularized mode.
    MonitoredRun baseline;
    std::vector<MonitoredRun> member_runs(nu_list.size());
    std::vector<MonitoredRun> member_baselines(nu_list.size());

    std::vector<std::function<void()>> jobs;
    jobs.emplace_back([&]() {
        baseline = run_with_samples(state0, inviscid, stepper, sample_times, mon);
    });
    for (size_t i = 0; i < nu_list.size(); ++i) {
        jobs.emplace_back([&, i]() {
            PhysParams viscous = base;
            viscous.variant = Variant::NPNS;
            viscous.nu = nu_list[i];
            viscous.ell = 0.0;
            member_runs[i] = run_with_samples(state0, viscous, stepper, sample_times, mon);
        });
        if (mode == InviscidMode::RegularizedKappa && nu_list[i] > 0.0) {
            jobs.emplace_back([&, i]() {
                const double kappa = std::cbrt(nu_list[i]);
                member_baselines[i] = run_with_samples(regularize_initial_data(state0, kappa),
                                                       inviscid, stepper, sample_times, mon);
            });
        }
    }
    run_parallel(std::move(jobs), max_threads);

    for (size_t i = 0; i < nu_list.size(); ++i) {
        SweepMember& m = report.members[i];
        m.param = nu_list[i];
        const MonitoredRun& run = member_runs[i];
        const MonitoredRun& ref = (mode == InviscidMode::RegularizedKappa && nu_list[i] > 0.0)
                                      ? member_baselines[i]
                                      : baseline;
        m.completed = run.completed && ref.completed;
        m.error = !run.completed ? run.error : ref.error;
        m.energy_l2_initial = run.energy0;
        m.sup_energy_l2 = run.sup_energy;
        m.sup_omega_l2 = run.sup_omega_l2;
        m.sup_grad_phi = run.sup_grad_phi;
        m.decay_envelope_ok = run.envelope_ok;
        if (!m.completed) {
            report.partial = true;
            continue;
        }
        for (size_t t = 0; t < sample_times.size(); ++t) {
            SweepSample sample;
            sample.time = sample_times[t];
            sample.norms = difference_norms(run.at_samples[t], ref.at_samples[t], s_list);
            m.samples.push_back(std::move(sample));
        }
    }
    report.slopes = fit_slopes(report, s_list);
    return report;
}

SweepReport mollification_sweep(const SimState& state0, const PhysParams& base,
                                const StepperConfig& stepper, const std::vector<double>& ell_list,
                                const std::vector<double>& sample_times, unsigned max_threads) {
    validate_state(state0);
    if (sample_times.empty()) throw ValidationError("mollification_sweep: no sample times");
    for (double ell : ell_list)
        if (ell < 0.0) throw ValidationError("mollification_sweep: ell must be >= 0");

    SweepReport report;
    report.parameter = "ell";
    report.mode = "";
    report.values = ell_list;
    report.sample_times = sample_times;
    report.members.resize(ell_list.size());

    const int mon = default_monitor_every(stepper.dt);
    const std::vector<double> s_list = {0.0, 1.0, 2.0};

    PhysParams reference = base;
    reference.ell = 0.0;
    if (reference.variant == Variant::Regularized)
        reference.variant = reference.nu > 0.0 ? Variant::NPNS : Variant::NPE;

    MonitoredRun ref_run;
    std::vector<MonitoredRun> member_runs(ell_list.size());

    std::vector<std::function<void()>> jobs;
    jobs.emplace_back([&]() {
        ref_run = run_with_samples(state0, reference, stepper, sample_times, mon);
    });
    for (size_t i = 0; i < ell_list.size(); ++i) {
        jobs.emplace_back([&, i]() {
            PhysParams p = base;
            if (ell_list[i] > 0.0) {
                p.variant = Variant::Regularized;
                p.ell = ell_list[i];
                p.nu = 0.0;
            } else {
                p = reference;
            }
            member_runs[i] = run_with_samples(state0, p, stepper, sample_times, mon);
        });
    }
    run_parallel(std::move(jobs), max_threads);

    for (size_t i = 0; i < ell_list.size(); ++i) {
        SweepMember& m = report.members[i];
        m.param = ell_list[i];
        const MonitoredRun& run = member_runs[i];
        m.completed = run.completed && ref_run.completed;
        m.error = !run.completed ? run.error : ref_run.error;
        m.energy_l2_initial = run.energy0;
        m.sup_energy_l2 = run.sup_energy;
        m.sup_omega_l2 = run.sup_omega_l2;
        m.sup_grad_phi = run.sup_grad_phi;
        m.decay_envelope_ok = run.envelope_ok;
        if (!m.completed) {
            report.partial = true;
            continue;
        }
        for (size_t t = 0; t < sample_times.size(); ++t) {
            SweepSample sample;
            sample.time = sample_times[t];
            sample.norms = difference_norms(run.at_samples[t], ref_run.at_samples[t], s_list);
            m.samples.push_back(std::move(sample));
        }
    }
    report.slopes = fit_slopes(report, s_list);
    return report;
}

// ---------------------------------------------------------------------------
// Picard iteration
// ---------------------------------------------------------------------------

namespace {

// Frozen coefficients of one trajectory point: mollified advecting
// velocity, grad Phi, and rho (for the analytic Lap Phi = -rho/eps).
struct CoeffBundle {
    std::vector<double> ua1, ua2, px, py, rho;
};

CoeffBundle bundle_from_state(const SimState& s, const PhysParams& p) {
    CoeffBundle b;
    const SpectralField2D phi = poisson_potential(s.rho, p.eps);
    auto [u1, u2] = velocity_from_vorticity(s.omega);
    if (p.variant == Variant::Regularized) {
        u1 = mollify(u1, p.ell);
        u2 = mollify(u2, p.ell);
    }
    b.ua1 = u1.to_samples();
    b.ua2 = u2.to_samples();
    b.px = derivative(phi, Deriv::Dx).to_samples();
    b.py = derivative(phi, Deriv::Dy).to_samples();
    b.rho = s.rho.to_samples();
    return b;
}

// Linear right-hand side with coefficients frozen from the previous
// iterate. The arithmetic mirrors tendency() exactly so that feeding a
// state its own bundle reproduces the nonlinear tendency bit for bit.
Tendency frozen_tendency(const SimState& y, const PhysParams& p, const CoeffBundle& cb) {
    const Grid& g = y.rho.grid();
    const auto rx = derivative(y.rho, Deriv::Dx).to_samples();
    const auto ry = derivative(y.rho, Deriv::Dy).to_samples();
    const auto sx = derivative(y.sigma, Deriv::Dx).to_samples();
    const auto sy = derivative(y.sigma, Deriv::Dy).to_samples();
    const auto wx = derivative(y.omega, Deriv::Dx).to_samples();
    const auto wy = derivative(y.omega, Deriv::Dy).to_samples();
    const auto rho = y.rho.to_samples();
    const auto sigma = y.sigma.to_samples();

    const size_t sz = rho.size();
    std::vector<double> nl_rho(sz), nl_sigma(sz), nl_omega(sz);
    const double inv_eps = 1.0 / p.eps;
    for (size_t i = 0; i < sz; ++i) {
        nl_rho[i] = -(cb.ua1[i] * rx[i] + cb.ua2[i] * ry[i]) +
                    p.D * (sx[i] * cb.px[i] + sy[i] * cb.py[i] - sigma[i] * cb.rho[i] * inv_eps);
        nl_sigma[i] = -(cb.ua1[i] * sx[i] + cb.ua2[i] * sy[i]) +
                      p.D * (rx[i] * cb.px[i] + ry[i] * cb.py[i] - rho[i] * cb.rho[i] * inv_eps);
        nl_omega[i] = -(cb.ua1[i] * wx[i] + cb.ua2[i] * wy[i]) -
                      p.kbtk * (-ry[i] * cb.px[i] + rx[i] * cb.py[i]);
    }
    auto to_field = [&g](const std::vector<double>& v) {
        SpectralField2D f(g, fft::forward(g, v));
        dealias_in_place(f);
        return f;
    };
    Tendency t{to_field(nl_rho), to_field(nl_sigma), to_field(nl_omega)};
    if (!t.d_rho.is_finite() || !t.d_sigma.is_finite() || !t.d_omega.is_finite())
        throw NonFiniteError("picard: non-finite frozen tendency", y.time);
    return t;
}

struct Trajectory {
    std::vector<SimState> states;                      // nsteps + 1 accepted states
    std::vector<std::array<CoeffBundle, 4>> stages;    // per-step stage coefficients
};

Trajectory integrate_frozen(const SimState& state0, const PhysParams& p, double dt, long nsteps,
                            const Trajectory& prev) {
    Trajectory out;
    out.states.reserve(static_cast<size_t>(nsteps) + 1);
    out.stages.resize(static_cast<size_t>(nsteps));
    SimState s = state0;
    out.states.push_back(s);
    for (long j = 0; j < nsteps; ++j) {
        const auto& frozen = prev.stages[static_cast<size_t>(j)];
        auto& record = out.stages[static_cast<size_t>(j)];
        s = step_with_rhs(s, p, dt, [&](const SimState& y, int stage) {
            record[static_cast<size_t>(stage)] = bundle_from_state(y, p);
            return frozen_tendency(y, p, frozen[static_cast<size_t>(stage)]);
        });
        out.states.push_back(s);
    }
    return out;
}

double combined_l2(const SimState& a, const SimState& b) {
    const double dr = l2_norm(a.rho - b.rho);
    const double ds = l2_norm(a.sigma - b.sigma);
    const double du = velocity_sobolev_norm(a.omega - b.omega, 0.0);
    return std::sqrt(dr * dr + ds * ds + du * du);
}

double tendency_l2(const Tendency& a, const Tendency& b) {
    const double dr = l2_norm(a.d_rho - b.d_rho);
    const double ds = l2_norm(a.d_sigma - b.d_sigma);
    const double dw = l2_norm(a.d_omega - b.d_omega);
    return std::sqrt(dr * dr + ds * ds + dw * dw);
}

} // namespace

double m_r_proxy(const SimState& state0) {
    return velocity_sobolev_norm(state0.omega, 1.0) + sobolev_norm(state0.rho, 1.0) +
           sobolev_norm(state0.sigma, 1.0);
}

double picard_default_T0(const SimState& state0) {
    const double mr = m_r_proxy(state0);
    return std::min(0.1, 0.05 / std::max(mr * mr, 1e-12));
}

PicardReport picard_solve(const SimState& state0, const PhysParams& params,
                          const PicardConfig& cfg) {
    if (params.variant != Variant::Regularized)
        throw ValidationError("picard_solve requires the regularized variant");
    validate_params(params);
    validate_state(state0);
    if (cfg.n_iters < 2) throw ValidationError("picard: n_iters must be >= 2");
    if (!(cfg.dt > 0.0)) throw ValidationError("picard: dt must be > 0");

    PicardReport report;
    report.m_r_proxy = m_r_proxy(state0);
    report.t0_from_heuristic = !(cfg.T0 > 0.0);
    report.T0 = report.t0_from_heuristic ? picard_default_T0(state0) : cfg.T0;
    report.n_iters = cfg.n_iters;

    const long nsteps = std::max<long>(1, std::lround(report.T0 / cfg.dt));
    const double dt = report.T0 / static_cast<double>(nsteps);
    report.dt = dt;

    // Iterate 0: initial data held constant in time.
    Trajectory prev;
    prev.states.assign(static_cast<size_t>(nsteps) + 1, state0);
    for (long j = 0; j <= nsteps; ++j)
        prev.states[static_cast<size_t>(j)].time = state0.time + static_cast<double>(j) * dt;
    {
        const CoeffBundle b0 = bundle_from_state(state0, params);
        prev.stages.assign(static_cast<size_t>(nsteps), {b0, b0, b0, b0});
    }

    const double sigma_mean0 = state0.sigma.mean().real();
    std::vector<SimState> before_last; // iterate n_iters - 1
    for (int n = 0; n < cfg.n_iters; ++n) {
        Trajectory cur = integrate_frozen(state0, params, dt, nsteps, prev);
        double sup_delta = 0.0, sup_upsilon = 0.0;
        for (size_t j = 0; j < cur.states.size(); ++j) {
            const double dr = l2_norm(cur.states[j].rho - prev.states[j].rho);
            const double ds = l2_norm(cur.states[j].sigma - prev.states[j].sigma);
            sup_delta = std::max(sup_delta, std::sqrt(dr * dr + ds * ds));
            sup_upsilon = std::max(
                sup_upsilon, velocity_sobolev_norm(cur.states[j].omega - prev.states[j].omega, 0.0));
            report.max_mean_rho = std::max(report.max_mean_rho, std::abs(cur.states[j].rho.mean()));
            report.max_sigma_mean_drift =
                std::max(report.max_sigma_mean_drift,
                         std::abs(cur.states[j].sigma.mean().real() - sigma_mean0));
        }
        report.delta.push_back(sup_delta);
        report.upsilon.push_back(sup_upsilon);
        if (n == cfg.n_iters - 1) before_last = std::move(prev.states);
        prev = std::move(cur);
    }

    for (size_t n = 0; n + 1 < report.delta.size(); ++n) {
        const double denom = report.delta[n] + report.upsilon[n];
        const double numer = report.delta[n + 1] + report.upsilon[n + 1];
        report.q.push_back(denom == 0.0 ? 0.0 : numer / denom);
    }

    // Residual of the fixed-point equation: nonlinear tendency minus the
    // frozen tendency the final iterate was integrated with.
    double residual = 0.0;
    for (size_t j = 0; j < prev.states.size(); ++j) {
        const Tendency nonlinear = tendency(prev.states[j], params, TendencyParts::Nonstiff);
        const Tendency frozen =
            frozen_tendency(prev.states[j], params, bundle_from_state(before_last[j], params));
        residual = std::max(residual, tendency_l2(nonlinear, frozen));
    }
    report.nonlinear_residual = residual;

    // Distance to the direct nonlinear solve on the same dt grid.
    {
        std::vector<SimState> direct;
        direct.reserve(prev.states.size());
        direct.push_back(state0);
        StepperConfig st;
        st.dt = dt;
        st.dt_max = dt;
        st.t_end = state0.time + report.T0;
        integrate(state0, params, st, [&direct](const SimState& y) { direct.push_back(y); });
        double dist = 0.0;
        for (size_t j = 0; j < prev.states.size() && j < direct.size(); ++j)
            dist = std::max(dist, combined_l2(prev.states[j], direct[j]));
        report.direct_solve_distance = dist;
    }

    if (report.q.size() >= 3) {
        const size_t last = report.q.size();
        if (report.q[last - 1] >= 1.0 && report.q[last - 2] >= 1.0 && report.q[last - 3] >= 1.0)
            throw NoContractionError("picard iteration is not contracting (q >= 1); "
                                     "reduce T0");
    }
    return report;
}

} // namespace npe
