#pragma once

#include <string>

#include "npe/diagnostics.hpp"
#include "npe/timestep.hpp"

namespace npe {

// Smooth the concentrations with the scale-kappa mollifier and project the
// vorticity onto the modes with |k| <= floor(1/kappa). Means are preserved
// and positivity cannot deepen (positive kernel).
SimState regularize_initial_data(const SimState& state0, double kappa);

// Matched: every viscous branch starts from the sweep's shared initial
// data. RegularizedKappa: branch nu is compared against an inviscid run
// whose initial data was regularized with kappa = nu^(1/3).
enum class InviscidMode { Matched, RegularizedKappa };

std::string inviscid_mode_name(InviscidMode m);

struct SweepSample {
    double time = 0.0;
    std::vector<DifferenceNorms> norms;
};

struct SweepMember {
    double param = 0.0;
    bool completed = false;
    std::string error;
    std::vector<SweepSample> samples;
    double energy_l2_initial = 0.0;
    double sup_energy_l2 = 0.0;
    double sup_omega_l2 = 0.0;
    double sup_grad_phi = 0.0;
    bool decay_envelope_ok = false; // energy(t) <= energy(0) e^{-2Dt}(1+1e-6)
};

struct SlopeFit {
    double s = 0.0;
    double slope = 0.0;
    double rms_residual = 0.0;
};

struct SweepReport {
    std::string parameter; // "nu" or "ell"
    std::string mode;
    std::vector<double> values;
    std::vector<double> sample_times;
    std::vector<SweepMember> members;
    std::vector<SlopeFit> slopes; // log-log fit at the last sample time, combined norm
    bool partial = false;
};

// Viscous branches against the inviscid baseline with identical grid and
// dt; differences tabulated at the sample times, slopes fitted per Sobolev
// index at the last one.
SweepReport inviscid_sweep(const SimState& state0, const PhysParams& base,
                           const StepperConfig& stepper, const std::vector<double>& nu_list,
                           const std::vector<double>& sample_times, InviscidMode mode,
                           unsigned max_threads = 1);

// Regularized runs per ell against the ell = 0 reference; also records the
// sup over time of the monitored decay norms per member.
SweepReport mollification_sweep(const SimState& state0, const PhysParams& base,
                                const StepperConfig& stepper, const std::vector<double>& ell_list,
                                const std::vector<double>& sample_times, unsigned max_threads = 1);

struct PicardConfig {
    double T0 = 0.0; // <= 0 selects the default min(0.1, 0.05 / Mr^2)
    int n_iters = 10;
    double dt = 1e-3;
};

struct PicardReport {
    double T0 = 0.0;
    double dt = 0.0;
    int n_iters = 0;
    double m_r_proxy = 0.0;
    bool t0_from_heuristic = false; // default T0 formula is heuristic, see README
    // delta[n], upsilon[n]: sup over the stored time grid of the L2
    // distances between iterates n+1 and n.
    std::vector<double> delta;
    std::vector<double> upsilon;
    std::vector<double> q; // q[n] = (delta[n+1]+upsilon[n+1]) / (delta[n]+upsilon[n])
    double nonlinear_residual = 0.0;    // max over stored times, final iterate
    double direct_solve_distance = 0.0; // sup over stored times vs nonlinear integrate
    double max_mean_rho = 0.0;          // neutrality drift across all iterates
    double max_sigma_mean_drift = 0.0;  // salt-mean drift across all iterates
};

// |u0|_H1 + |rho0|_H1 + |sigma0|_H1, the W^{1,r} smallness proxy at r = 2.
double m_r_proxy(const SimState& state0);
double picard_default_T0(const SimState& state0);

// Successive linear solves with the advecting velocity and potential frozen
// from the previous iterate's trajectory; iterate 0 is the initial data
// held constant in time. Coefficients are frozen per Runge-Kutta stage so
// the fixed point of the discrete map is the direct nonlinear trajectory.
// Throws NoContractionError if the last three contraction ratios are >= 1.
PicardReport picard_solve(const SimState& state0, const PhysParams& params,
                          const PicardConfig& cfg);

} // namespace npe
