#pragma once

#include <functional>

#include "npe/model.hpp"

namespace npe {

struct StepperConfig {
    double dt = 1e-3;
    double t_end = 0.0;
    double cfl_safety = 0.5;
    double dt_max = 1e-3;
    bool adaptive = false;
};

void validate_stepper(const StepperConfig& cfg);

// One integrating-factor RK4 step: the linear diffusion (D*Lap on rho and
// sigma, nu*Lap on omega for NPNS) is applied through exact exponential
// factors, the remaining terms through classical RK4. The means of rho and
// omega are re-projected to exactly zero afterwards. Deterministic.
SimState step(const SimState& s, const PhysParams& p, double dt);

// Advective CFL candidate: min(dt_max, cfl_safety * h / max(|u|_inf, 1e-8)).
// Diffusion needs no restriction (treated exactly).
double stable_dt(const SimState& s, const PhysParams& p, const StepperConfig& cfg);

// Called after every accepted step.
using StepCallback = std::function<void(const SimState&)>;

// Same integrating-factor RK4 step with a caller-supplied nonstiff
// right-hand side, invoked once per stage with the stage input state and
// the stage index 0..3 (stage times t, t+dt/2, t+dt/2, t+dt). The Picard
// solver uses this to evaluate frozen-coefficient systems.
using StageRhs = std::function<Tendency(const SimState&, int stage)>;
SimState step_with_rhs(const SimState& s, const PhysParams& p, double dt, const StageRhs& rhs);

// Integrate to cfg.t_end. Fixed dt by default (the last step is shortened
// when t_end - t0 is not a multiple of dt); CFL-adaptive when cfg.adaptive.
// The final time equals t_end exactly. Bitwise deterministic for a fixed
// config.
SimState integrate(SimState s, const PhysParams& p, const StepperConfig& cfg,
                   const StepCallback& on_step = {});

} // namespace npe
