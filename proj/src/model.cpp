#include "npe/model.hpp"

#include <algorithm>
#include <cmath>

#include "npe/errors.hpp"

namespace npe {

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::NPE: return "npe";
    case Variant::NPNS: return "npns";
    case Variant::Regularized: return "regularized";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "npe") return Variant::NPE;
    if (name == "npns") return Variant::NPNS;
    if (name == "regularized") return Variant::Regularized;
    throw ValidationError("unknown variant '" + name + "' (npe|npns|regularized)");
}

void validate_params(const PhysParams& p) {
    if (!(p.D > 0.0)) throw ValidationError("params.D must be > 0");
    if (!(p.eps > 0.0)) throw ValidationError("params.eps must be > 0");
    if (p.kbtk < 0.0) throw ValidationError("params.kbtk must be >= 0");
    if (p.nu < 0.0) throw ValidationError("params.nu must be >= 0");
    if (p.ell < 0.0) throw ValidationError("params.ell must be >= 0");
    if (p.variant == Variant::NPE && p.nu != 0.0)
        throw ValidationError("variant npe requires nu = 0");
    if (p.variant == Variant::Regularized && !(p.ell > 0.0))
        throw ValidationError("variant regularized requires ell > 0");
    if (p.variant == Variant::NPNS && p.ell != 0.0)
        throw ValidationError("variant npns requires ell = 0");
}

void validate_state(const SimState& s, double tol_pos) {
    require_same_grid(s.rho, s.sigma, "validate_state");
    require_same_grid(s.rho, s.omega, "validate_state");
    if (!s.rho.is_finite() || !s.sigma.is_finite() || !s.omega.is_finite())
        throw ValidationError("state contains non-finite coefficients");
    if (std::abs(s.rho.mean()) > 1e-12)
        throw ValidationError("state violates neutrality: |mean rho| = " +
                              std::to_string(std::abs(s.rho.mean())));
    if (std::abs(s.omega.mean()) > 1e-12)
        throw ValidationError("state has nonzero mean vorticity");

    const auto rho = s.rho.to_samples();
    const auto sigma = s.sigma.to_samples();
    double worst = 0.0;
    for (size_t i = 0; i < rho.size(); ++i)
        worst = std::max(worst, std::abs(rho[i]) - sigma[i]);
    if (worst > tol_pos)
        throw ValidationError("state violates sigma >= |rho| by " + std::to_string(worst));
}

SpectralField2D poisson_potential(const SpectralField2D& rho, double eps) {
    // -eps Lap(Phi) = rho  =>  Phi = -Lap^{-1}(rho) / eps
    SpectralField2D phi = inverse_laplacian(rho);
    phi *= -1.0 / eps;
    return phi;
}

std::pair<SpectralField2D, SpectralField2D> velocity_from_vorticity(const SpectralField2D& omega) {
    const SpectralField2D psi = inverse_laplacian(omega);
    return {-1.0 * derivative(psi, Deriv::Dy), derivative(psi, Deriv::Dx)};
}

std::pair<SpectralField2D, SpectralField2D> concentrations(const SimState& s) {
    SpectralField2D c1 = s.sigma;
    c1 += s.rho;
    c1 *= 0.5;
    SpectralField2D c2 = s.sigma;
    c2 -= s.rho;
    c2 *= 0.5;
    return {std::move(c1), std::move(c2)};
}

std::pair<SpectralField2D, SpectralField2D> combine(const SpectralField2D& c1,
                                                    const SpectralField2D& c2) {
    return {c1 - c2, c1 + c2};
}

namespace {

using Phys = std::vector<double>;

Phys phys(const SpectralField2D& f) { return f.to_samples(); }

SpectralField2D spectral_of_product(const Grid& g, const Phys& p) {
    SpectralField2D f(g, fft::forward(g, p));
    dealias_in_place(f);
    return f;
}

// Common physical-space ingredients of one right-hand-side evaluation.
struct RhsWorkspace {
    Phys ua1, ua2;       // advecting velocity (mollified if regularized)
    Phys rx, ry;         // grad rho
    Phys sx, sy;         // grad sigma
    Phys px, py;         // grad Phi
    Phys rho, sigma;
};

RhsWorkspace make_workspace(const SimState& s, const PhysParams& p) {
    RhsWorkspace w;
    const SpectralField2D phi = poisson_potential(s.rho, p.eps);
    auto [u1, u2] = velocity_from_vorticity(s.omega);
    if (p.variant == Variant::Regularized) {
        u1 = mollify(u1, p.ell);
        u2 = mollify(u2, p.ell);
    }
    w.ua1 = phys(u1);
    w.ua2 = phys(u2);
    w.rx = phys(derivative(s.rho, Deriv::Dx));
    w.ry = phys(derivative(s.rho, Deriv::Dy));
    w.sx = phys(derivative(s.sigma, Deriv::Dx));
    w.sy = phys(derivative(s.sigma, Deriv::Dy));
    w.px = phys(derivative(phi, Deriv::Dx));
    w.py = phys(derivative(phi, Deriv::Dy));
    w.rho = phys(s.rho);
    w.sigma = phys(s.sigma);
    return w;
}

} // namespace

Tendency tendency(const SimState& s, const PhysParams& p, TendencyParts parts) {
    const Grid& g = s.rho.grid();
    require_same_grid(s.rho, s.sigma, "tendency");
    require_same_grid(s.rho, s.omega, "tendency");

    const RhsWorkspace w = make_workspace(s, p);
    const Phys wx = phys(derivative(s.omega, Deriv::Dx));
    const Phys wy = phys(derivative(s.omega, Deriv::Dy));

    const size_t sz = w.rho.size();
    Phys nl_rho(sz), nl_sigma(sz), nl_omega(sz);
    const double inv_eps = 1.0 / p.eps;
    for (size_t i = 0; i < sz; ++i) {
        // Lap(Phi) substituted analytically by -rho/eps.
        nl_rho[i] = -(w.ua1[i] * w.rx[i] + w.ua2[i] * w.ry[i]) +
                    p.D * (w.sx[i] * w.px[i] + w.sy[i] * w.py[i] - w.sigma[i] * w.rho[i] * inv_eps);
        nl_sigma[i] = -(w.ua1[i] * w.sx[i] + w.ua2[i] * w.sy[i]) +
                      p.D * (w.rx[i] * w.px[i] + w.ry[i] * w.py[i] - w.rho[i] * w.rho[i] * inv_eps);
        // grad_perp(rho).grad(Phi) = -dy(rho) dx(Phi) + dx(rho) dy(Phi)
        nl_omega[i] = -(w.ua1[i] * wx[i] + w.ua2[i] * wy[i]) -
                      p.kbtk * (-w.ry[i] * w.px[i] + w.rx[i] * w.py[i]);
    }

    Tendency t{spectral_of_product(g, nl_rho), spectral_of_product(g, nl_sigma),
               spectral_of_product(g, nl_omega)};
    if (!t.d_rho.is_finite() || !t.d_sigma.is_finite() || !t.d_omega.is_finite())
        throw NonFiniteError("tendency produced non-finite coefficients", s.time);

    if (parts == TendencyParts::Full) {
        t.d_rho += p.D * derivative(s.rho, Deriv::Laplacian);
        t.d_sigma += p.D * derivative(s.sigma, Deriv::Laplacian);
        if (p.variant == Variant::NPNS && p.nu != 0.0)
            t.d_omega += p.nu * derivative(s.omega, Deriv::Laplacian);
    }
    return t;
}

std::pair<SpectralField2D, SpectralField2D> velocity_form_tendency(const SimState& s,
                                                                   const PhysParams& p) {
    if (p.variant != Variant::Regularized)
        throw ValidationError("velocity_form_tendency requires the regularized variant");
    const Grid& g = s.rho.grid();

    const SpectralField2D phi = poisson_potential(s.rho, p.eps);
    const auto [u1, u2] = velocity_from_vorticity(s.omega);
    const SpectralField2D um1 = mollify(u1, p.ell);
    const SpectralField2D um2 = mollify(u2, p.ell);

    const Phys pu1 = phys(u1), pu2 = phys(u2);
    const Phys pum1 = phys(um1), pum2 = phys(um2);
    const Phys u1x = phys(derivative(u1, Deriv::Dx)), u1y = phys(derivative(u1, Deriv::Dy));
    const Phys u2x = phys(derivative(u2, Deriv::Dx)), u2y = phys(derivative(u2, Deriv::Dy));
    const Phys m1x = phys(derivative(um1, Deriv::Dx)), m1y = phys(derivative(um1, Deriv::Dy));
    const Phys m2x = phys(derivative(um2, Deriv::Dx)), m2y = phys(derivative(um2, Deriv::Dy));
    const Phys rho = phys(s.rho);
    const Phys px = phys(derivative(phi, Deriv::Dx)), py = phys(derivative(phi, Deriv::Dy));

    const size_t sz = rho.size();
    Phys f1(sz), f2(sz);
    for (size_t i = 0; i < sz; ++i) {
        // -[u].grad(u_i) - sum_j u_j d_i([u]_j) - kbtk rho d_i(Phi)
        f1[i] = -(pum1[i] * u1x[i] + pum2[i] * u1y[i]) - (pu1[i] * m1x[i] + pu2[i] * m2x[i]) -
                p.kbtk * rho[i] * px[i];
        f2[i] = -(pum1[i] * u2x[i] + pum2[i] * u2y[i]) - (pu1[i] * m1y[i] + pu2[i] * m2y[i]) -
                p.kbtk * rho[i] * py[i];
    }

    SpectralField2D g1 = spectral_of_product(g, f1);
    SpectralField2D g2 = spectral_of_product(g, f2);

    // Leray projection: ghat <- ghat - k (k.ghat)/|k|^2, mean mode removed.
    const int n = g.n;
    for (int i = 0; i < n; ++i) {
        const double k1 = g.wavenumber(i);
        for (int j = 0; j < n; ++j) {
            const double k2 = g.wavenumber(j);
            const double k2sum = k1 * k1 + k2 * k2;
            if (k2sum == 0.0) {
                g1.at(i, j) = 0.0;
                g2.at(i, j) = 0.0;
                continue;
            }
            const std::complex<double> kdotg = k1 * g1.at(i, j) + k2 * g2.at(i, j);
            g1.at(i, j) -= k1 * kdotg / k2sum;
            g2.at(i, j) -= k2 * kdotg / k2sum;
        }
    }
    return {std::move(g1), std::move(g2)};
}

} // namespace npe
