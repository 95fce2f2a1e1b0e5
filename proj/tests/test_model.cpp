#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "npe/diagnostics.hpp"
#include "npe/errors.hpp"
#include "npe/model.hpp"
#include "npe/timestep.hpp"
#include "test_util.hpp"

using namespace npe;
using namespace npe::test;

namespace {

std::vector<double> grid_function(Grid g, double (*fn)(double, double)) {
    std::vector<double> v(static_cast<size_t>(g.size()));
    const double h = g.cell_size();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            v[static_cast<size_t>(i) * g.n + j] = fn(i * h, j * h);
    return v;
}

double max_phys_diff(const SpectralField2D& f, const std::vector<double>& expected) {
    const auto got = f.to_samples();
    double m = 0.0;
    for (size_t i = 0; i < got.size(); ++i) m = std::max(m, std::abs(got[i] - expected[i]));
    return m;
}

} // namespace

TEST_CASE("poisson potential closed forms") {
    Grid g(32);
    SUBCASE("zero charge gives zero potential") {
        SpectralField2D zero(g);
        CHECK(poisson_potential(zero, 1.0).max_abs_coeff() == 0.0);
    }
    SUBCASE("cos(x) with eps=2") {
        const auto rho = SpectralField2D::from_samples(
            g, grid_function(g, [](double x, double) { return std::cos(x); }));
        CHECK(max_phys_diff(poisson_potential(rho, 2.0),
                            grid_function(g, [](double x, double) { return 0.5 * std::cos(x); })) <
              1e-13);
    }
    SUBCASE("sin(3x)cos(4y) with eps=1") {
        const auto rho = SpectralField2D::from_samples(g, grid_function(g, [](double x, double y) {
                                                           return std::sin(3 * x) * std::cos(4 * y);
                                                       }));
        CHECK(max_phys_diff(poisson_potential(rho, 1.0), grid_function(g, [](double x, double y) {
                                return std::sin(3 * x) * std::cos(4 * y) / 25.0;
                            })) < 1e-13);
    }
    SUBCASE("defining equation holds for random neutral charge") {
        std::mt19937_64 rng(3);
        const auto rho = random_field(g, 9, rng);
        const double eps = 1.7;
        const auto phi = poisson_potential(rho, eps);
        const auto residual = -eps * derivative(phi, Deriv::Laplacian) - rho;
        CHECK(residual.max_abs_coeff() < 1e-12 * rho.max_abs_coeff());
        CHECK(std::abs(phi.mean()) == 0.0);
    }
    SUBCASE("nonzero mean charge is rejected") {
        std::vector<double> ones(static_cast<size_t>(g.size()), 1.0);
        CHECK_THROWS_AS(poisson_potential(SpectralField2D::from_samples(g, ones), 1.0),
                        NonZeroMeanError);
    }
}

TEST_CASE("Biot-Savart velocity") {
    Grid g(32);
    SUBCASE("zero vorticity gives zero velocity") {
        SpectralField2D zero(g);
        const auto [u1, u2] = velocity_from_vorticity(zero);
        CHECK(u1.max_abs_coeff() == 0.0);
        CHECK(u2.max_abs_coeff() == 0.0);
    }
    SUBCASE("omega = cos(x) gives u = (0, sin x)") {
        const auto w = SpectralField2D::from_samples(
            g, grid_function(g, [](double x, double) { return std::cos(x); }));
        const auto [u1, u2] = velocity_from_vorticity(w);
        CHECK(u1.max_abs_coeff() < 1e-14);
        CHECK(max_phys_diff(u2, grid_function(g, [](double x, double) { return std::sin(x); })) <
              1e-13);
    }
    SUBCASE("omega = 2cos(x)cos(y)") {
        const auto w = SpectralField2D::from_samples(g, grid_function(g, [](double x, double y) {
                                                         return 2.0 * std::cos(x) * std::cos(y);
                                                     }));
        const auto [u1, u2] = velocity_from_vorticity(w);
        CHECK(max_phys_diff(u1, grid_function(g, [](double x, double y) {
                                return -std::cos(x) * std::sin(y);
                            })) < 1e-13);
        CHECK(max_phys_diff(u2, grid_function(g, [](double x, double y) {
                                return std::sin(x) * std::cos(y);
                            })) < 1e-13);
    }
    SUBCASE("divergence-free, curl recovers omega, zero mean, |grad u| = |omega|") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            const auto w = dealias(random_field(g, 10, rng));
            const auto [u1, u2] = velocity_from_vorticity(w);
            const auto div = derivative(u1, Deriv::Dx) + derivative(u2, Deriv::Dy);
            CHECK(div.max_abs_coeff() <= 1e-14);
            const auto curl = derivative(u2, Deriv::Dx) - derivative(u1, Deriv::Dy);
            CHECK(max_coeff_diff(curl, w) < 1e-12);
            CHECK(std::abs(u1.mean()) == 0.0);
            CHECK(std::abs(u2.mean()) == 0.0);
            const double grad_u = std::hypot(grad_l2_norm(u1), grad_l2_norm(u2));
            CHECK(rel_diff(grad_u, l2_norm(w)) < 1e-12);
        }
    }
}

TEST_CASE("concentrations and combine") {
    Grid g(16);
    SUBCASE("rho = 0, sigma = 2 gives c1 = c2 = 1") {
        SimState s;
        s.rho = SpectralField2D(g);
        s.sigma = SpectralField2D(g);
        s.sigma.set_mean(2.0);
        s.omega = SpectralField2D(g);
        const auto [c1, c2] = concentrations(s);
        CHECK(std::abs(c1.mean() - 1.0) == 0.0);
        CHECK(std::abs(c2.mean() - 1.0) == 0.0);
    }
    SUBCASE("boundary case rho = sigma = cos x has c2 = 0") {
        SimState s;
        s.rho = SpectralField2D(g);
        s.rho.set_coeff(1, 0, 0.5);
        s.rho.set_coeff(-1, 0, 0.5);
        s.sigma = s.rho;
        s.omega = SpectralField2D(g);
        const auto [c1, c2] = concentrations(s);
        CHECK(c2.max_abs_coeff() == 0.0);
        (void)c1;
    }
    SUBCASE("combine then split is the identity on random states") {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 10; ++trial) {
            const SimState s = random_state(g, 40 + static_cast<uint64_t>(trial));
            const auto [c1, c2] = concentrations(s);
            const auto [rho, sigma] = combine(c1, c2);
            CHECK(max_coeff_diff(rho, s.rho) < 1e-14);
            CHECK(max_coeff_diff(sigma, s.sigma) < 1e-14);
        }
    }
}

TEST_CASE("tendency at equilibrium vanishes") {
    Grid g(32);
    SimState s;
    s.rho = SpectralField2D(g);
    s.sigma = SpectralField2D(g);
    s.sigma.set_mean(1.0);
    s.omega = SpectralField2D(g);
    PhysParams p;
    const Tendency t = tendency(s, p);
    CHECK(t.d_rho.max_abs_coeff() == 0.0);
    CHECK(t.d_sigma.max_abs_coeff() == 0.0);
    CHECK(t.d_omega.max_abs_coeff() == 0.0);
}

TEST_CASE("tendency closed form for a single charge mode") {
    Grid g(64);
    const double sigma_bar = 2.0, D = 0.8, eps = 1.3;
    SimState s;
    s.rho = SpectralField2D(g);
    s.rho.set_coeff(1, 0, 0.5);
    s.rho.set_coeff(-1, 0, 0.5);
    s.sigma = SpectralField2D(g);
    s.sigma.set_mean(sigma_bar);
    s.omega = SpectralField2D(g);
    PhysParams p;
    p.D = D;
    p.eps = eps;
    const Tendency t = tendency(s, p);

    // d_rho = -D (1 + sigma_bar/eps) cos x
    {
        const auto expected = grid_function(g, [](double x, double) { return std::cos(x); });
        const auto got = t.d_rho.to_samples();
        const double scale = -D * (1.0 + sigma_bar / eps);
        double sup = 0.0;
        for (size_t i = 0; i < got.size(); ++i)
            sup = std::max(sup, std::abs(got[i] - scale * expected[i]));
        CHECK(sup < 1e-12);
    }
    // d_sigma = -(D/eps) cos 2x
    {
        const auto expected = grid_function(g, [](double x, double) { return std::cos(2 * x); });
        const auto got = t.d_sigma.to_samples();
        const double scale = -D / eps;
        double sup = 0.0;
        for (size_t i = 0; i < got.size(); ++i)
            sup = std::max(sup, std::abs(got[i] - scale * expected[i]));
        CHECK(sup < 1e-12);
    }
    // the electric force vanishes: both gradients point in x
    CHECK(t.d_omega.max_abs_coeff() < 1e-15);
}

TEST_CASE("tendency matches a centered finite difference of the integrator") {
    Grid g(32);
    for (Variant variant : {Variant::NPE, Variant::NPNS, Variant::Regularized}) {
        CAPTURE(variant_name(variant));
        PhysParams p;
        p.variant = variant;
        p.nu = variant == Variant::NPNS ? 0.05 : 0.0;
        p.ell = variant == Variant::Regularized ? 0.1 : 0.0;
        const SimState s0 = random_state(g, 77, 0.3);

        auto fd_error = [&](double delta) {
            const SimState s1 = step(s0, p, delta);
            const SimState s2 = step(s1, p, delta);
            const Tendency t = tendency(s1, p);
            double worst = 0.0;
            auto check_field = [&](const SpectralField2D& a0, const SpectralField2D& a2,
                                   const SpectralField2D& dt_field) {
                for (size_t i = 0; i < a0.size(); ++i) {
                    const std::complex<double> fd = (a2[i] - a0[i]) / (2.0 * delta);
                    worst = std::max(worst, std::abs(fd - dt_field[i]));
                }
            };
            check_field(s0.rho, s2.rho, t.d_rho);
            check_field(s0.sigma, s2.sigma, t.d_sigma);
            check_field(s0.omega, s2.omega, t.d_omega);
            return worst;
        };

        const double e1 = fd_error(2e-4);
        const double e2 = fd_error(1e-4);
        CHECK(e1 < 1e-5);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.35)); // O(dt^2)
    }
}

TEST_CASE("tendency preserves neutrality and the salt mean") {
    Grid g(48);
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        const SimState s = random_state(g, seed, 0.4);
        PhysParams p;
        p.D = 0.7;
        p.eps = 1.9;
        const Tendency t = tendency(s, p);
        CHECK(std::abs(t.d_rho.mean()) < 1e-12);
        CHECK(std::abs(t.d_sigma.mean()) < 1e-12);
        CHECK(std::abs(t.d_omega.mean()) < 1e-12);
    }
}

TEST_CASE("with kbtk = 0 and rho = 0 the vorticity tendency is pure advection") {
    Grid g(32);
    std::mt19937_64 rng(31);
    PhysParams p;
    p.kbtk = 0.0;
    p.variant = Variant::Regularized;
    p.ell = 0.15;
    SimState s;
    s.rho = SpectralField2D(g);
    s.sigma = SpectralField2D(g);
    s.sigma.set_mean(1.0);
    s.omega = dealias(random_field(g, 8, rng));

    const Tendency t = tendency(s, p);
    auto [u1, u2] = velocity_from_vorticity(s.omega);
    u1 = mollify(u1, p.ell);
    u2 = mollify(u2, p.ell);
    const auto p1 = u1.to_samples();
    const auto p2 = u2.to_samples();
    const auto wx = derivative(s.omega, Deriv::Dx).to_samples();
    const auto wy = derivative(s.omega, Deriv::Dy).to_samples();
    std::vector<double> adv(p1.size());
    for (size_t i = 0; i < adv.size(); ++i) adv[i] = -(p1[i] * wx[i] + p2[i] * wy[i]);
    const auto expected = dealias(SpectralField2D::from_samples(g, adv));
    CHECK(max_coeff_diff(t.d_omega, expected) < 1e-14);
    CHECK(t.d_rho.max_abs_coeff() == 0.0);
}

TEST_CASE("velocity-form tendency: curl consistency and incompressibility") {
    Grid g(48);
    PhysParams p;
    p.variant = Variant::Regularized;

    SUBCASE("zero state maps to zero") {
        p.ell = 0.1;
        SimState s;
        s.rho = SpectralField2D(g);
        s.sigma = SpectralField2D(g);
        s.sigma.set_mean(1.0);
        s.omega = SpectralField2D(g);
        const auto [du1, du2] = velocity_form_tendency(s, p);
        CHECK(du1.max_abs_coeff() == 0.0);
        CHECK(du2.max_abs_coeff() == 0.0);
    }

    SUBCASE("curl equals the vorticity tendency; divergence vanishes") {
        for (double ell : {0.05, 0.1, 0.2}) {
            p.ell = ell;
            for (uint64_t seed = 0; seed < 10; ++seed) {
                const SimState s = random_state(g, 1000 + seed, 0.4);
                const auto [du1, du2] = velocity_form_tendency(s, p);
                const Tendency t = tendency(s, p);
                const auto curl = derivative(du2, Deriv::Dx) - derivative(du1, Deriv::Dy);
                const double rel =
                    l2_norm(curl - t.d_omega) / std::max(l2_norm(t.d_omega), 1e-300);
                CHECK(rel < 1e-10);
                const auto div = derivative(du1, Deriv::Dx) + derivative(du2, Deriv::Dy);
                CHECK(div.max_abs_coeff() < 1e-13);
            }
        }
    }
}

TEST_CASE("state and parameter validation") {
    Grid g(16);
    SUBCASE("non-neutral charge is rejected") {
        SimState s;
        s.rho = SpectralField2D(g);
        s.rho.set_mean(0.1);
        s.sigma = SpectralField2D(g);
        s.sigma.set_mean(1.0);
        s.omega = SpectralField2D(g);
        CHECK_THROWS_AS(validate_state(s), ValidationError);
    }
    SUBCASE("sigma < |rho| is rejected") {
        SimState s;
        s.rho = SpectralField2D(g);
        s.rho.set_coeff(1, 0, 0.5);
        s.rho.set_coeff(-1, 0, 0.5);
        s.sigma = SpectralField2D(g);
        s.sigma.set_mean(0.5);
        s.omega = SpectralField2D(g);
        CHECK_THROWS_AS(validate_state(s), ValidationError);
    }
    SUBCASE("variant constraints") {
        PhysParams p;
        p.variant = Variant::NPE;
        p.nu = 0.1;
        CHECK_THROWS_AS(validate_params(p), ValidationError);
        p = PhysParams{};
        p.variant = Variant::Regularized;
        CHECK_THROWS_AS(validate_params(p), ValidationError);
        p = PhysParams{};
        p.variant = Variant::NPNS;
        p.ell = 0.3;
        CHECK_THROWS_AS(validate_params(p), ValidationError);
    }
}
