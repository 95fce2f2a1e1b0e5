#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "npe/errors.hpp"
#include "npe/experiments.hpp"
#include "test_util.hpp"

using namespace npe;
using namespace npe::test;

TEST_CASE("regularize_initial_data") {
    Grid g(64);
    const SimState s0 = random_state(g, 90, 0.3);

    SUBCASE("kappa -> 0 approaches the identity") {
        const SimState r = regularize_initial_data(s0, 1e-6);
        for (double s : {0.0, 1.0, 2.0, 3.0}) {
            CHECK(rel_diff(sobolev_norm(r.rho, s), sobolev_norm(s0.rho, s)) < 1e-10);
            CHECK(rel_diff(sobolev_norm(r.sigma, s), sobolev_norm(s0.sigma, s)) < 1e-10);
            CHECK(rel_diff(velocity_sobolev_norm(r.omega, s), velocity_sobolev_norm(s0.omega, s)) <
                  1e-10);
        }
    }
    SUBCASE("salt mean is preserved bit-exactly") {
        for (double kappa : {0.5, 0.25, 1e-3}) {
            const SimState r = regularize_initial_data(s0, kappa);
            CHECK(r.sigma.mean() == s0.sigma.mean());
            CHECK(std::abs(r.rho.mean()) == 0.0);
        }
    }
    SUBCASE("distance to the data shrinks monotonically as kappa decreases") {
        for (double s : {1.0, 2.0, 3.0}) {
            double prev = std::numeric_limits<double>::max();
            for (double kappa : {0.5, 0.25, 0.125}) {
                const SimState r = regularize_initial_data(s0, kappa);
                const double d = sobolev_norm(r.rho - s0.rho, s);
                CHECK(d <= prev);
                prev = d;
            }
        }
    }
    SUBCASE("positive smoothing cannot deepen concentration minima") {
        auto min_c = [](const SimState& s) {
            const auto rho = s.rho.to_samples();
            const auto sg = s.sigma.to_samples();
            double m1 = 1e300, m2 = 1e300;
            for (size_t i = 0; i < rho.size(); ++i) {
                m1 = std::min(m1, 0.5 * (sg[i] + rho[i]));
                m2 = std::min(m2, 0.5 * (sg[i] - rho[i]));
            }
            return std::pair{m1, m2};
        };
        const auto [m1, m2] = min_c(s0);
        for (double kappa : {0.5, 0.2, 0.05}) {
            const auto [r1, r2] = min_c(regularize_initial_data(s0, kappa));
            CHECK(r1 >= m1 - 1e-12);
            CHECK(r2 >= m2 - 1e-12);
        }
    }
    SUBCASE("kappa must be positive") {
        CHECK_THROWS_AS(regularize_initial_data(s0, 0.0), ValidationError);
    }
}

TEST_CASE("inviscid sweep") {
    Grid g(32);
    const SimState s0 = random_state(g, 91, 0.3);
    PhysParams base;
    StepperConfig st;
    st.dt = 2e-3;
    st.dt_max = 2e-3;

    SUBCASE("nu = 0 reproduces the baseline bitwise") {
        const SweepReport r =
            inviscid_sweep(s0, base, st, {0.0}, {0.25}, InviscidMode::Matched, 1);
        REQUIRE(r.members.size() == 1);
        REQUIRE(r.members[0].completed);
        for (const auto& d : r.members[0].samples[0].norms) {
            CHECK(d.rho == 0.0);
            CHECK(d.sigma == 0.0);
            CHECK(d.u == 0.0);
        }
    }
    SUBCASE("differences grow with nu and slopes are finite") {
        const SweepReport r = inviscid_sweep(s0, base, st, {3e-3, 1e-2}, {0.25},
                                             InviscidMode::Matched, 2);
        REQUIRE(r.members.size() == 2);
        for (const auto& m : r.members) REQUIRE(m.completed);
        auto combined = [](const SweepMember& m, double s) {
            for (const auto& d : m.samples.back().norms)
                if (d.s == s) return d.combined();
            return -1.0;
        };
        for (double s : {1.0, 2.0, 3.0})
            CHECK(combined(r.members[1], s) >= combined(r.members[0], s));
        REQUIRE(!r.slopes.empty());
        for (const auto& f : r.slopes) CHECK(std::isfinite(f.slope));
    }
    SUBCASE("regularized mode couples kappa = nu^(1/3)") {
        const SweepReport r = inviscid_sweep(s0, base, st, {1e-3, 1e-2}, {0.125},
                                             InviscidMode::RegularizedKappa, 2);
        REQUIRE(r.members.size() == 2);
        for (const auto& m : r.members) REQUIRE(m.completed);
        // smaller nu => smaller kappa => smaller total difference
        auto h3 = [](const SweepMember& m) {
            for (const auto& d : m.samples.back().norms)
                if (d.s == 3.0) return d.combined();
            return -1.0;
        };
        CHECK(h3(r.members[0]) <= h3(r.members[1]));
    }
}

TEST_CASE("mollification sweep") {
    Grid g(32);
    const SimState s0 = random_state(g, 92, 0.3);
    PhysParams base;
    StepperConfig st;
    st.dt = 2e-3;
    st.dt_max = 2e-3;

    const SweepReport r = mollification_sweep(s0, base, st, {0.2, 0.1, 0.05, 0.0}, {0.25}, 2);
    REQUIRE(r.members.size() == 4);
    for (const auto& m : r.members) REQUIRE(m.completed);

    SUBCASE("the ell = 0 entry coincides with the reference") {
        const auto& zero = r.members[3];
        for (const auto& d : zero.samples[0].norms) {
            CHECK(d.rho == 0.0);
            CHECK(d.sigma == 0.0);
            CHECK(d.u == 0.0);
        }
    }
    SUBCASE("L2 differences shrink monotonically as ell decreases") {
        auto l2 = [](const SweepMember& m) {
            for (const auto& d : m.samples.back().norms)
                if (d.s == 0.0) return d.combined();
            return -1.0;
        };
        CHECK(l2(r.members[0]) >= l2(r.members[1]));
        CHECK(l2(r.members[1]) >= l2(r.members[2]));
    }
    SUBCASE("the decay envelope holds uniformly in ell") {
        for (const auto& m : r.members) {
            CHECK(m.decay_envelope_ok);
            CHECK(m.sup_energy_l2 <= m.energy_l2_initial * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("picard iteration") {
    Grid g(32);
    PhysParams p;
    p.variant = Variant::Regularized;
    p.ell = 0.1;

    SUBCASE("zero initial data is a fixed point") {
        SimState s;
        s.rho = SpectralField2D(g);
        s.sigma = SpectralField2D(g);
        s.omega = SpectralField2D(g);
        PicardConfig cfg;
        cfg.T0 = 0.05;
        cfg.n_iters = 4;
        cfg.dt = 5e-3;
        const PicardReport r = picard_solve(s, p, cfg);
        for (double d : r.delta) CHECK(d == 0.0);
        for (double u : r.upsilon) CHECK(u == 0.0);
        for (double q : r.q) CHECK(q == 0.0);
        CHECK(r.nonlinear_residual == 0.0);
        CHECK(r.direct_solve_distance == 0.0);
    }
    SUBCASE("small smooth data contracts geometrically to the nonlinear solve") {
        const SimState s0 = random_state(g, 93, 0.02);
        PicardConfig cfg;
        cfg.n_iters = 10;
        cfg.dt = 1e-3;
        const PicardReport r = picard_solve(s0, p, cfg);
        CHECK(r.t0_from_heuristic);
        CHECK(r.T0 == doctest::Approx(picard_default_T0(s0)));
        REQUIRE(r.q.size() >= 4);
        for (size_t n = 2; n < r.q.size(); ++n) CHECK(r.q[n] <= 0.5);
        CHECK(r.direct_solve_distance <= 1e-6);
        CHECK(r.nonlinear_residual <= 1e-6);
        CHECK(r.max_mean_rho <= 1e-12);
        CHECK(r.max_sigma_mean_drift <= 1e-10);
    }
    SUBCASE("config validation") {
        const SimState s0 = random_state(g, 94, 0.02);
        PicardConfig cfg;
        cfg.n_iters = 1;
        CHECK_THROWS_AS(picard_solve(s0, p, cfg), ValidationError);
        PhysParams wrong;
        wrong.variant = Variant::NPE;
        PicardConfig ok;
        CHECK_THROWS_AS(picard_solve(s0, wrong, ok), ValidationError);
    }
}

TEST_CASE("default T0 heuristic") {
    Grid g(32);
    const SimState tiny = random_state(g, 95, 0.01);
    CHECK(picard_default_T0(tiny) == 0.1); // small data hits the cap
    const SimState big = random_state(g, 96, 0.45);
    const double mr = m_r_proxy(big);
    CHECK(picard_default_T0(big) == doctest::Approx(std::min(0.1, 0.05 / (mr * mr))));
}
