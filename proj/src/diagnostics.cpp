#include "npe/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "npe/errors.hpp"

namespace npe {

double lp_norm(const SpectralField2D& f, double p) {
    if (p < 1.0) throw ValidationError("lp_norm: p must be >= 1");
    const auto samples = f.to_samples();
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : samples) m = std::max(m, std::abs(v));
        return m;
    }
    const double h = f.grid().cell_size();
    double acc = 0.0;
    for (double v : samples) acc += std::pow(std::abs(v), p);
    return std::pow(h * h * acc, 1.0 / p);
}

double sobolev_norm(const SpectralField2D& f, double s) {
    if (s < 0.0) throw ValidationError("sobolev_norm: s must be >= 0");
    const Grid& g = f.grid();
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double k1 = g.wavenumber(i);
        for (int j = 0; j < g.n; ++j) {
            const double k2 = g.wavenumber(j);
            acc += std::pow(1.0 + k1 * k1 + k2 * k2, s) * std::norm(f.at(i, j));
        }
    }
    return two_pi * std::sqrt(acc);
}

double l2_norm(const SpectralField2D& f) {
    double acc = 0.0;
    for (const auto& z : f.coeffs()) acc += std::norm(z);
    return two_pi * std::sqrt(acc);
}

double grad_l2_norm(const SpectralField2D& f) {
    const Grid& g = f.grid();
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double k1 = g.wavenumber(i);
        for (int j = 0; j < g.n; ++j) {
            const double k2 = g.wavenumber(j);
            acc += (k1 * k1 + k2 * k2) * std::norm(f.at(i, j));
        }
    }
    return two_pi * std::sqrt(acc);
}

double velocity_sobolev_norm(const SpectralField2D& omega, double s) {
    // |uhat|^2 = |omegahat|^2 / |k|^2 for the Biot-Savart velocity.
    const Grid& g = omega.grid();
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double k1 = g.wavenumber(i);
        for (int j = 0; j < g.n; ++j) {
            const double k2 = g.wavenumber(j);
            const double k2sum = k1 * k1 + k2 * k2;
            if (k2sum == 0.0) continue;
            acc += std::pow(1.0 + k2sum, s) * std::norm(omega.at(i, j)) / k2sum;
        }
    }
    return two_pi * std::sqrt(acc);
}

DiagnosticsRecord compute_diagnostics(const SimState& s, const PhysParams& p) {
    DiagnosticsRecord r;
    r.time = s.time;
    r.mean_rho = s.rho.mean().real();
    r.mean_sigma = s.sigma.mean().real();

    SpectralField2D sigma_fluct = s.sigma;
    sigma_fluct.set_mean(0.0);

    const double inf = std::numeric_limits<double>::infinity();
    const double ps[4] = {2.0, 3.0, 4.0, inf};
    for (int i = 0; i < 4; ++i) {
        r.lp_rho[static_cast<size_t>(i)] = lp_norm(s.rho, ps[i]);
        r.lp_sigma_fluct[static_cast<size_t>(i)] = lp_norm(sigma_fluct, ps[i]);
    }

    const SpectralField2D phi = poisson_potential(s.rho, p.eps);
    const auto phix = derivative(phi, Deriv::Dx).to_samples();
    const auto phiy = derivative(phi, Deriv::Dy).to_samples();
    double gsup = 0.0;
    for (size_t i = 0; i < phix.size(); ++i)
        gsup = std::max(gsup, std::hypot(phix[i], phiy[i]));
    r.grad_phi_sup = gsup;

    for (int s_idx = 0; s_idx < 3; ++s_idx) {
        const double sv = s_idx + 1.0;
        r.hs_rho[static_cast<size_t>(s_idx)] = sobolev_norm(s.rho, sv);
        r.hs_sigma[static_cast<size_t>(s_idx)] = sobolev_norm(s.sigma, sv);
        r.hs_u[static_cast<size_t>(s_idx)] = velocity_sobolev_norm(s.omega, sv);
    }

    const double rs[3] = {2.0, 4.0, inf};
    for (int i = 0; i < 3; ++i) r.lr_omega[static_cast<size_t>(i)] = lp_norm(s.omega, rs[i]);

    const auto rho = s.rho.to_samples();
    const auto sg = s.sigma.to_samples();
    double mc1 = std::numeric_limits<double>::max();
    double mc2 = std::numeric_limits<double>::max();
    double int_sigma_rho2 = 0.0;
    for (size_t i = 0; i < rho.size(); ++i) {
        mc1 = std::min(mc1, 0.5 * (sg[i] + rho[i]));
        mc2 = std::min(mc2, 0.5 * (sg[i] - rho[i]));
        int_sigma_rho2 += sg[i] * rho[i] * rho[i];
    }
    const double h = s.rho.grid().cell_size();
    int_sigma_rho2 *= h * h;
    r.min_c1 = mc1;
    r.min_c2 = mc2;

    const double rho_l2 = r.lp_rho[0];
    const double sig_l2 = r.lp_sigma_fluct[0];
    r.energy_l2 = 0.5 * (rho_l2 * rho_l2 + sig_l2 * sig_l2);
    const double gr = grad_l2_norm(s.rho);
    const double gs2 = grad_l2_norm(sigma_fluct);
    r.dissipation = p.D * (gr * gr + gs2 * gs2) + (p.D / p.eps) * int_sigma_rho2;
    return r;
}

double energy_identity_residual(const DiagnosticsRecord& r0, const DiagnosticsRecord& r1,
                                const DiagnosticsRecord& r2) {
    const double d1 = r1.time - r0.time;
    const double d2 = r2.time - r1.time;
    if (!(d1 > 0.0) || std::abs(d2 - d1) > 1e-9 * d1)
        throw ValidationError("energy_identity_residual: records not equally spaced");
    return (r2.energy_l2 - r0.energy_l2) / (r2.time - r0.time) + r1.dissipation;
}

RateFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y,
                        double window_lo, double window_hi) {
    if (t.size() != y.size()) throw ValidationError("fit_exponential: length mismatch");
    std::vector<double> ts, ls;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window_lo || t[i] > window_hi) continue;
        if (!(y[i] > 0.0))
            throw ValidationError("fit_exponential: nonpositive sample in window");
        ts.push_back(t[i]);
        ls.push_back(std::log(y[i]));
    }
    if (ts.size() < 3)
        throw ValidationError("fit_exponential: fewer than 3 points in window");

    const double n = static_cast<double>(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += ls[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * ls[i];
    }
    const double denom = n * stt - st * st;
    const double slope = (n * stl - st * sl) / denom;
    const double intercept = (sl - slope * st) / n;

    double ss = 0.0;
    for (size_t i = 0; i < ts.size(); ++i) {
        const double resid = ls[i] - (intercept + slope * ts[i]);
        ss += resid * resid;
    }
    RateFit fit;
    fit.rate = -slope;
    fit.amplitude = std::exp(intercept);
    fit.rms_residual = std::sqrt(ss / n);
    fit.t_lo = window_lo;
    fit.t_hi = window_hi;
    return fit;
}

std::vector<DifferenceNorms> difference_norms(const SimState& a, const SimState& b,
                                              const std::vector<double>& s_list) {
    require_same_grid(a.rho, b.rho, "difference_norms");
    require_same_grid(a.omega, b.omega, "difference_norms");
    const SpectralField2D drho = a.rho - b.rho;
    const SpectralField2D dsigma = a.sigma - b.sigma;
    const SpectralField2D domega = a.omega - b.omega;

    std::vector<DifferenceNorms> out;
    out.reserve(s_list.size());
    for (double s : s_list) {
        DifferenceNorms d;
        d.s = s;
        d.rho = sobolev_norm(drho, s);
        d.sigma = sobolev_norm(dsigma, s);
        d.u = velocity_sobolev_norm(domega, s);
        out.push_back(d);
    }
    return out;
}

std::vector<InvariantCheck> invariant_report(const SimState& s, const PhysParams& p,
                                             double initial_mean_sigma,
                                             const InvariantTolerances& tol) {
    (void)p;
    std::vector<InvariantCheck> checks;
    auto push = [&checks](const std::string& name, double residual, double tolerance) {
        checks.push_back({name, residual, tolerance, residual <= tolerance});
    };

    const bool finite = s.rho.is_finite() && s.sigma.is_finite() && s.omega.is_finite();
    push("finite", finite ? 0.0 : 1.0, 0.5);
    if (!finite) return checks;

    push("neutrality", std::abs(s.rho.mean()), tol.mean_rho);
    const double ref = std::max(std::abs(initial_mean_sigma), 1e-300);
    push("salt_mean_drift", std::abs(s.sigma.mean().real() - initial_mean_sigma) / ref,
         tol.mean_sigma_rel);

    const auto rho = s.rho.to_samples();
    const auto sg = s.sigma.to_samples();
    double mc1 = std::numeric_limits<double>::max();
    double mc2 = std::numeric_limits<double>::max();
    for (size_t i = 0; i < rho.size(); ++i) {
        mc1 = std::min(mc1, 0.5 * (sg[i] + rho[i]));
        mc2 = std::min(mc2, 0.5 * (sg[i] - rho[i]));
    }
    push("positivity_c1", std::max(0.0, -mc1), tol.tol_pos);
    push("positivity_c2", std::max(0.0, -mc2), tol.tol_pos);
    return checks;
}

} // namespace npe
