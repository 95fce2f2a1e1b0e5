#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "npe/diagnostics.hpp"
#include "npe/errors.hpp"
#include "npe/timestep.hpp"
#include "test_util.hpp"

using namespace npe;
using namespace npe::test;

namespace {

const double inf = std::numeric_limits<double>::infinity();

SpectralField2D cosx(Grid g, double amplitude = 1.0) {
    SpectralField2D f(g);
    f.set_coeff(1, 0, 0.5 * amplitude);
    f.set_coeff(-1, 0, 0.5 * amplitude);
    return f;
}

} // namespace

TEST_CASE("lp_norm closed forms") {
    Grid g(32);
    SUBCASE("constant") {
        SpectralField2D f(g);
        f.set_mean(-1.5);
        CHECK(lp_norm(f, 2.0) == doctest::Approx(two_pi * 1.5).epsilon(1e-13));
    }
    SUBCASE("cos x in L2") {
        CHECK(lp_norm(cosx(g), 2.0) ==
              doctest::Approx(std::numbers::pi * std::sqrt(2.0)).epsilon(1e-13));
    }
    SUBCASE("sin x in L-infinity") {
        SpectralField2D f(g);
        f.set_coeff(1, 0, std::complex<double>(0.0, -0.5));
        f.set_coeff(-1, 0, std::complex<double>(0.0, 0.5));
        CHECK(lp_norm(f, inf) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("p below one is rejected") {
        CHECK_THROWS_AS(lp_norm(cosx(g), 0.5), ValidationError);
    }
}

TEST_CASE("sobolev_norm closed forms and the s = 0 identity") {
    Grid g(32);
    SUBCASE("cos x at s = 1") {
        CHECK(sobolev_norm(cosx(g), 1.0) == doctest::Approx(two_pi).epsilon(1e-13));
    }
    SUBCASE("constants see only the k = 0 weight") {
        SpectralField2D f(g);
        f.set_mean(2.5);
        for (double s : {0.0, 1.0, 2.5, 3.0})
            CHECK(sobolev_norm(f, s) == doctest::Approx(two_pi * 2.5).epsilon(1e-13));
    }
    SUBCASE("s = 0 agrees with the quadrature L2 norm on random fields") {
        std::mt19937_64 rng(42);
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_field_with_mean(g, 9, rng);
            CHECK(rel_diff(sobolev_norm(f, 0.0), lp_norm(f, 2.0)) < 1e-12);
        }
    }
    SUBCASE("negative s is rejected") {
        CHECK_THROWS_AS(sobolev_norm(cosx(g), -1.0), ValidationError);
    }
}

TEST_CASE("energy identity residual") {
    Grid g(64);
    PhysParams p;

    SUBCASE("equilibrium trajectory has zero residual") {
        SimState s;
        s.rho = SpectralField2D(g);
        s.sigma = SpectralField2D(g);
        s.sigma.set_mean(1.0);
        s.omega = SpectralField2D(g);
        DiagnosticsRecord r0 = compute_diagnostics(s, p);
        DiagnosticsRecord r1 = r0, r2 = r0;
        r1.time = 0.1;
        r2.time = 0.2;
        CHECK(energy_identity_residual(r0, r1, r2) == 0.0);
    }
    SUBCASE("nonuniform spacing is rejected") {
        DiagnosticsRecord r0, r1, r2;
        r0.time = 0.0;
        r1.time = 0.1;
        r2.time = 0.25;
        CHECK_THROWS_AS(energy_identity_residual(r0, r1, r2), ValidationError);
    }
    SUBCASE("residual is small along a run and shrinks ~4x under dt halving") {
        const SimState s0 = random_state(g, 3, 0.4);
        auto run = [&](double dt) {
            std::vector<DiagnosticsRecord> recs;
            recs.push_back(compute_diagnostics(s0, p));
            StepperConfig cfg;
            cfg.dt = dt;
            cfg.dt_max = dt;
            cfg.t_end = 0.25;
            integrate(s0, p, cfg,
                      [&](const SimState& y) { recs.push_back(compute_diagnostics(y, p)); });
            return recs;
        };
        auto max_residual = [](const std::vector<DiagnosticsRecord>& recs) {
            double worst = 0.0, maxdiss = 0.0;
            for (size_t i = 1; i + 1 < recs.size(); ++i) {
                worst = std::max(worst,
                                 std::abs(energy_identity_residual(recs[i - 1], recs[i], recs[i + 1])));
                maxdiss = std::max(maxdiss, recs[i].dissipation);
            }
            return std::pair{worst, maxdiss};
        };
        const auto coarse = run(2e-3);
        const auto fine = run(1e-3);
        const auto [rc, dc] = max_residual(coarse);
        const auto [rf, df] = max_residual(fine);
        CHECK(rc <= 1e-4 * dc);
        CHECK(rc / rf == doctest::Approx(4.0).epsilon(0.30));
        (void)df;
    }
}

TEST_CASE("fit_exponential") {
    SUBCASE("clean exponential is recovered to high accuracy") {
        std::vector<double> t, y;
        for (int i = 0; i < 10; ++i) {
            t.push_back(0.1 * i);
            y.push_back(5.0 * std::exp(-2.0 * 0.1 * i));
        }
        const RateFit fit = fit_exponential(t, y, -1.0, 2.0);
        CHECK(std::abs(fit.rate - 2.0) < 1e-10);
        CHECK(std::abs(fit.amplitude - 5.0) < 1e-9);
        CHECK(fit.rms_residual < 1e-12);
    }
    SUBCASE("constants fit with zero rate") {
        std::vector<double> t{0.0, 1.0, 2.0, 3.0}, y(4, 3.3);
        const RateFit fit = fit_exponential(t, y, 0.0, 3.0);
        CHECK(std::abs(fit.rate) < 1e-14);
    }
    SUBCASE("small multiplicative perturbation keeps the rate near 2") {
        std::vector<double> t, y;
        for (int i = 0; i < 50; ++i) {
            const double ti = 0.05 * i;
            t.push_back(ti);
            y.push_back(5.0 * std::exp(-2.0 * ti) * (1.0 + 0.01 * std::sin(10.0 * ti)));
        }
        const RateFit fit = fit_exponential(t, y, 0.0, 3.0);
        CHECK(fit.rate > 1.9);
        CHECK(fit.rate < 2.1);
    }
    SUBCASE("rejects short or nonpositive input") {
        std::vector<double> t{0.0, 1.0}, y{1.0, 0.5};
        CHECK_THROWS_AS(fit_exponential(t, y, 0.0, 2.0), ValidationError);
        std::vector<double> t2{0.0, 1.0, 2.0}, y2{1.0, -0.5, 0.2};
        CHECK_THROWS_AS(fit_exponential(t2, y2, 0.0, 2.0), ValidationError);
    }
}

TEST_CASE("difference_norms") {
    Grid g(32);
    const SimState a = random_state(g, 50, 0.3);

    SUBCASE("identical states have zero distance") {
        for (const auto& d : difference_norms(a, a, {1.0, 2.0, 3.0})) {
            CHECK(d.rho == 0.0);
            CHECK(d.sigma == 0.0);
            CHECK(d.u == 0.0);
        }
    }
    SUBCASE("single-mode charge difference in H1 is 2 pi") {
        SimState b = a;
        b.rho += cosx(g);
        const auto norms = difference_norms(a, b, {1.0});
        CHECK(norms[0].rho == doctest::Approx(two_pi).epsilon(1e-13));
        CHECK(norms[0].sigma == 0.0);
    }
    SUBCASE("symmetric in its arguments") {
        const SimState b = random_state(g, 51, 0.3);
        const auto ab = difference_norms(a, b, {1.0, 2.0});
        const auto ba = difference_norms(b, a, {1.0, 2.0});
        for (size_t i = 0; i < ab.size(); ++i) {
            CHECK(ab[i].rho == ba[i].rho);
            CHECK(ab[i].sigma == ba[i].sigma);
            CHECK(ab[i].u == ba[i].u);
        }
    }
    SUBCASE("grid mismatch is rejected") {
        const SimState b = random_state(Grid(16), 52, 0.3);
        CHECK_THROWS_AS(difference_norms(a, b, {1.0}), DimensionMismatchError);
    }
}

TEST_CASE("invariant_report") {
    Grid g(32);
    PhysParams p;

    SUBCASE("admissible equilibrium passes every check") {
        SimState s;
        s.rho = SpectralField2D(g);
        s.sigma = SpectralField2D(g);
        s.sigma.set_mean(1.0);
        s.omega = SpectralField2D(g);
        for (const auto& check : invariant_report(s, p, 1.0)) CHECK(check.pass);
    }
    SUBCASE("non-neutral charge fails with the mean as residual") {
        SimState s;
        s.rho = SpectralField2D(g);
        s.rho.set_mean(0.1);
        s.sigma = SpectralField2D(g);
        s.sigma.set_mean(1.0);
        s.omega = SpectralField2D(g);
        const auto checks = invariant_report(s, p, 1.0);
        bool found = false;
        for (const auto& check : checks)
            if (check.name == "neutrality") {
                found = true;
                CHECK(!check.pass);
                CHECK(check.residual == doctest::Approx(0.1).epsilon(1e-12));
            }
        CHECK(found);
    }
    SUBCASE("a concentration dipping to -1e-3 fails positivity") {
        SimState s;
        s.rho = cosx(g, 1.0);
        s.sigma = SpectralField2D(g);
        s.sigma.set_mean(0.999); // c2 = (sigma - rho)/2 dips to -5e-4
        s.omega = SpectralField2D(g);
        const auto checks = invariant_report(s, p, 0.999);
        bool fail_seen = false;
        for (const auto& check : checks)
            if (check.name == "positivity_c2" && !check.pass) fail_seen = true;
        CHECK(fail_seen);
    }
}

TEST_CASE("decay envelope, monotone energy and elliptic ratio along a short run") {
    Grid g(64);
    PhysParams p;
    const SimState s0 = random_state(g, 60, 0.4);
    DiagnosticsRecord first = compute_diagnostics(s0, p);
    const double ratio0 = first.grad_phi_sup / first.lp_rho[1];

    std::vector<DiagnosticsRecord> recs{first};
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.dt_max = 1e-3;
    cfg.t_end = 1.0;
    long count = 0;
    integrate(s0, p, cfg, [&](const SimState& y) {
        if (++count % 10 == 0) recs.push_back(compute_diagnostics(y, p));
    });

    double prev_energy = std::numeric_limits<double>::max();
    for (const auto& r : recs) {
        CHECK(r.energy_l2 <= first.energy_l2 * std::exp(-2.0 * p.D * r.time) * (1.0 + 1e-6));
        CHECK(r.energy_l2 <= prev_energy);
        prev_energy = r.energy_l2;
        const double ratio = r.grad_phi_sup / r.lp_rho[1];
        CHECK(ratio < 2.0 * ratio0);
        CHECK(ratio > 0.5 * ratio0);
    }
}
