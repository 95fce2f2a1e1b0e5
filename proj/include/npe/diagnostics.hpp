#pragma once

#include <array>
#include <limits>
#include <vector>

#include "npe/model.hpp"

namespace npe {

// One timestamped row of every monitored norm and invariant residual.
// Column order here is the series-file column order.
struct DiagnosticsRecord {
    double time = 0.0;
    std::array<double, 4> lp_rho{};         // p = 2, 3, 4, inf
    std::array<double, 4> lp_sigma_fluct{}; // of sigma - mean(sigma)
    double grad_phi_sup = 0.0;
    std::array<double, 3> hs_rho{};   // s = 1, 2, 3
    std::array<double, 3> hs_sigma{}; // of sigma (mean included)
    std::array<double, 3> lr_omega{}; // r = 2, 4, inf
    std::array<double, 3> hs_u{};     // s = 1, 2, 3
    double min_c1 = 0.0;
    double min_c2 = 0.0;
    double mean_rho = 0.0;
    double mean_sigma = 0.0;
    double energy_l2 = 0.0;   // (|rho|_2^2 + |sigma - mean|_2^2) / 2
    double dissipation = 0.0; // D(|grad rho|^2 + |grad sigma|^2) + (D/eps) int sigma rho^2
};

// Quadrature L^p norm on the collocation grid, (h^2 sum |f|^p)^{1/p};
// p = infinity is the grid maximum of |f|.
double lp_norm(const SpectralField2D& f, double p);

// Inhomogeneous Bessel norm, |f|_{H^s}^2 = (2pi)^2 sum (1+|k|^2)^s |fhat|^2.
double sobolev_norm(const SpectralField2D& f, double s);

// L^2 by Parseval; equals lp_norm(f, 2) to roundoff.
double l2_norm(const SpectralField2D& f);
// |grad f|_{L^2} by Parseval.
double grad_l2_norm(const SpectralField2D& f);
// H^s norm of the Biot-Savart velocity of omega, computed spectrally.
double velocity_sobolev_norm(const SpectralField2D& omega, double s);

DiagnosticsRecord compute_diagnostics(const SimState& s, const PhysParams& p);

// Centered-difference d/dt of energy_l2 at the middle record plus its
// dissipation entry; zero for the continuum solution.
double energy_identity_residual(const DiagnosticsRecord& r0, const DiagnosticsRecord& r1,
                                const DiagnosticsRecord& r2);

struct RateFit {
    double rate = 0.0;      // decay rate, -slope of log y vs t
    double amplitude = 0.0; // exp(intercept)
    double rms_residual = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
};

RateFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y,
                        double window_lo, double window_hi);

struct DifferenceNorms {
    double s = 0.0;
    double rho = 0.0;
    double sigma = 0.0;
    double u = 0.0;
    double combined() const { return rho + sigma + u; }
};

// H^s distances between two states on the same grid; velocities are
// reconstructed via Biot-Savart.
std::vector<DifferenceNorms> difference_norms(const SimState& a, const SimState& b,
                                              const std::vector<double>& s_list);

struct InvariantCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct InvariantTolerances {
    double mean_rho = 1e-12;
    double mean_sigma_rel = 1e-10;
    double tol_pos = default_tol_pos;
};

// Neutrality, salt-mean drift against the stored initial mean, positivity
// of both concentrations, finiteness.
std::vector<InvariantCheck> invariant_report(const SimState& s, const PhysParams& p,
                                             double initial_mean_sigma,
                                             const InvariantTolerances& tol = {});

} // namespace npe
