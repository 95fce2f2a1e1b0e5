#pragma once

#include <string>
#include <utility>

#include "npe/field.hpp"
#include "npe/ops.hpp"

namespace npe {

enum class Variant { NPE, NPNS, Regularized };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Physical constants selecting the NPE / NPNS / regularized vortex-method
// systems. D: ionic diffusivity, eps: Debye coefficient in -eps*Lap(Phi)=rho,
// kbtk: thermal factor multiplying the electric force, nu: kinematic
// viscosity, ell: mollification scale of the advecting velocity.
struct PhysParams {
    double D = 1.0;
    double eps = 1.0;
    double kbtk = 1.0;
    double nu = 0.0;
    double ell = 0.0;
    Variant variant = Variant::NPE;
};

void validate_params(const PhysParams& p);

// Complete dynamical state: charge rho = c1 - c2, salt sigma = c1 + c2,
// vorticity omega. Velocity, potential and concentrations are derived.
struct SimState {
    double time = 0.0;
    SpectralField2D rho;
    SpectralField2D sigma;
    SpectralField2D omega;
};

inline constexpr double default_tol_pos = 1e-8;

// Checks neutrality, sigma >= |rho| - tol_pos on the collocation grid, and
// mean-zero vorticity. Throws ValidationError naming the violated invariant.
void validate_state(const SimState& s, double tol_pos = default_tol_pos);

struct Tendency {
    SpectralField2D d_rho;
    SpectralField2D d_sigma;
    SpectralField2D d_omega;
};

// Solve -eps * Lap(Phi) = rho; Phi mean-zero.
SpectralField2D poisson_potential(const SpectralField2D& rho, double eps);

// Biot-Savart: u = grad_perp(Lap^{-1} omega), grad_perp = (-dy, dx).
// Divergence-free by construction, mean-zero.
std::pair<SpectralField2D, SpectralField2D> velocity_from_vorticity(const SpectralField2D& omega);

// c1 = (sigma + rho)/2, c2 = (sigma - rho)/2 and back.
std::pair<SpectralField2D, SpectralField2D> concentrations(const SimState& s);
std::pair<SpectralField2D, SpectralField2D> combine(const SpectralField2D& c1,
                                                    const SpectralField2D& c2);

// Whether the linear diffusion terms (D*Lap on rho/sigma, nu*Lap on omega)
// are included. The time stepper integrates those exactly and only needs
// the nonstiff remainder.
enum class TendencyParts { Full, Nonstiff };

// Right-hand side of the charge/salt/vorticity system:
//   d_rho   = -u_adv.grad(rho)   + D(Lap rho   + grad sigma.grad Phi + sigma Lap Phi)
//   d_sigma = -u_adv.grad(sigma) + D(Lap sigma + grad rho.grad Phi   + rho Lap Phi)
//   d_omega = -u_adv.grad(omega) - kbtk grad_perp(rho).grad(Phi) + nu Lap omega
// with u_adv = mollify(u, ell) for the regularized variant and Lap Phi
// replaced analytically by -rho/eps. All pointwise products are dealiased.
Tendency tendency(const SimState& s, const PhysParams& p,
                  TendencyParts parts = TendencyParts::Full);

// Velocity-form right-hand side of the regularized momentum equation,
//   du = P[ -[u].grad(u) - [grad u]^T u - kbtk rho grad(Phi) ],
// P the spectral Leray projection (pressure eliminated). Its scalar curl
// matches tendency().d_omega; exists as a consistency check of the vortex
// method.
std::pair<SpectralField2D, SpectralField2D> velocity_form_tendency(const SimState& s,
                                                                   const PhysParams& p);

} // namespace npe
