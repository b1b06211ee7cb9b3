#include "doctest.h"

#include <cmath>
#include <numbers>

#include "testsupport.hpp"
#include "wavefoa/oracles.hpp"
#include "wavefoa/pde.hpp"

using namespace wavefoa;

TEST_CASE("zero source and zero state is a fixed point of both schemes") {
    const Grid g(9, 9);
    const ScalarField mu(g, 0.0);
    for (Scheme scheme : {Scheme::Explicit, Scheme::Implicit}) {
        PotentialState s(g, PdeParams{0.5, 0.5, 1.0, 0.01});
        StepOptions opt;
        opt.scheme = scheme;
        for (int i = 0; i < 3; ++i) s = step(s, mu, opt);
        for (double v : s.current().values()) CHECK(v == 0.0);
    }
}

TEST_CASE("one explicit heat step from rest is (tau/d) * mass") {
    const Grid g(9, 9);
    const PdeParams p = PdeParams::heat_preset(1e-5);
    ScalarField mu(g, 0.0);
    mu.at(4, 4) = 1.0;
    PotentialState s(g, p);
    StepOptions opt;
    opt.scheme = Scheme::Explicit;
    s = step(s, mu, opt);
    CHECK(s.current().at(4, 4) == doctest::Approx(0.025).epsilon(1e-14));
    for (int y = 1; y < 8; ++y)
        for (int x = 1; x < 8; ++x)
            if (x != 4 || y != 4) CHECK(s.current().at(x, y) == 0.0);
}

TEST_CASE("implicit step agrees with the dense direct solve") {
    std::mt19937_64 rng(31);
    for (int n : {8, 16}) {
        const Grid g(n, n);
        const PdeParams p = PdeParams::damped_wave_preset(0.04);
        ScalarField curr = testsupport::random_field(g, rng, true);
        ScalarField prev = testsupport::random_field(g, rng, true);
        ScalarField mu = testsupport::random_field(g, rng, true);
        for (double& v : mu.values()) v = std::abs(v);

        PotentialState s(curr, prev, 0, p);
        StepOptions opt;
        opt.scheme = Scheme::Implicit;
        opt.cg_rel_tol = 1e-12;
        const PotentialState next = step(s, mu, opt);

        const double tau = p.tau;
        const double a_coef = p.effective_m() / (tau * tau) + p.effective_d() / tau;
        const double b_coef = 2.0 * p.effective_m() / (tau * tau) + p.effective_d() / tau;
        const double c_coef = p.effective_m() / (tau * tau);
        ScalarField rhs(g, 0.0);
        for (int y = 1; y < n - 1; ++y)
            for (int x = 1; x < n - 1; ++x)
                rhs.at(x, y) = mu.at(x, y) + b_coef * curr.at(x, y) - c_coef * prev.at(x, y);
        const ScalarField direct = dense_solve_shifted_laplacian(rhs, a_coef);

        double err = 0.0;
        for (size_t i = 0; i < direct.values().size(); ++i)
            err = std::max(err,
                           std::abs(direct.values()[i] - next.current().values()[i]));
        CHECK(err <= (n == 8 ? 1e-8 : 1e-7));
    }
}

TEST_CASE("stability bound matches the model presets") {
    CHECK(stability_bound(PdeParams::heat_preset()) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(stability_bound(PdeParams::damped_wave_preset()) ==
          doctest::Approx(std::sqrt(2e-5)).epsilon(1e-12));
    CHECK(stability_bound(PdeParams{2.0, 0.3, 1.0, 0.1}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(stability_bound(PdeParams{0.0, 0.0, 1.0, 0.1}), DegenerateParamsError);
}

TEST_CASE("explicit stepping above the stability bound is rejected") {
    const Grid g(9, 9);
    PdeParams p = PdeParams::heat_preset(0.04); // bound is 1e-4
    PotentialState s(g, p);
    StepOptions opt;
    opt.scheme = Scheme::Explicit;
    CHECK_THROWS_AS(step(s, ScalarField(g, 0.0), opt), UnstableSchemeError);
}

TEST_CASE("solver reports divergence when capped too early") {
    const Grid g(17, 17);
    std::mt19937_64 rng(32);
    ScalarField mu = testsupport::random_field(g, rng, true);
    PotentialState s(g, PdeParams::damped_wave_preset(0.04));
    StepOptions opt;
    opt.scheme = Scheme::Implicit;
    opt.cg_max_iter = 1;
    opt.cg_rel_tol = 1e-14;
    CHECK_THROWS_AS(step(s, mu, opt), SolverDivergedError);
}

TEST_CASE("poisson solve of zero mass is zero") {
    const ScalarField mu(Grid(9, 9), 0.0);
    const ScalarField phi = solve_poisson(mu);
    for (double v : phi.values()) CHECK(v == 0.0);
}

TEST_CASE("poisson solve matches the dense oracle on random masses") {
    std::mt19937_64 rng(33);
    const Grid g(16, 16);
    ScalarField mu(g, 0.0);
    for (int y = 1; y < 15; ++y)
        for (int x = 1; x < 15; ++x) mu.at(x, y) = testsupport::uniform(rng);
    const ScalarField iterative = solve_poisson(mu, 1e-10);
    const ScalarField direct = dense_solve_shifted_laplacian(mu, 0.0);
    double err = 0.0;
    for (size_t i = 0; i < direct.values().size(); ++i)
        err = std::max(err, std::abs(direct.values()[i] - iterative.values()[i]));
    CHECK(err <= 1e-7);

    // And the advertised interior residual bound holds.
    const ScalarField lap = laplacian_5pt(iterative);
    double res = 0.0;
    for (int y = 1; y < 15; ++y)
        for (int x = 1; x < 15; ++x)
            res = std::max(res, std::abs(lap.at(x, y) + mu.at(x, y)));
    CHECK(res <= 1e-8 * mu.max_abs());
}

TEST_CASE("poisson solution of a centred point mass has full dihedral symmetry") {
    const Grid g(17, 17);
    ScalarField mu(g, 0.0);
    mu.at(8, 8) = 1.0;
    const ScalarField phi = solve_poisson(mu, 1e-12);
    for (int y = 0; y < 17; ++y)
        for (int x = 0; x < 17; ++x) {
            const double v = phi.at(x, y);
            CHECK(std::abs(phi.at(16 - x, y) - v) <= 1e-10);
            CHECK(std::abs(phi.at(x, 16 - y) - v) <= 1e-10);
            CHECK(std::abs(phi.at(y, x) - v) <= 1e-10);
        }
}

TEST_CASE("point-mass wave potential closed form") {
    CHECK(analytic_point_mass_wave(1.0, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(analytic_point_mass_wave(2.0, 1.0, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(analytic_point_mass_wave(1.0, 2.0, 1.0) ==
          doctest::Approx(std::log(2.0 + std::sqrt(3.0)) / (2.0 * std::numbers::pi))
              .epsilon(1e-14)); // 0.20960035913949135
    CHECK_THROWS_AS(analytic_point_mass_wave(3.0, 1.0, 1.0), OutsideLightConeError);
    CHECK_THROWS_AS(analytic_point_mass_wave(0.0, 1.0, 1.0), SingularEvaluationError);
}

TEST_CASE("heat kernel closed form and normalisation") {
    const double c = 1.7, t = 0.8;
    CHECK(analytic_heat_kernel(0.0, t, c) ==
          doctest::Approx(1.0 / (4.0 * std::numbers::pi * c * t)).epsilon(1e-14));
    CHECK(analytic_heat_kernel(2.0, 1.0, 1.0) ==
          doctest::Approx(std::exp(-1.0) / (4.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK_THROWS_AS(analytic_heat_kernel(1.0, 0.0, 1.0), NonpositiveTimeError);

    // Midpoint quadrature of the kernel over a wide disk integrates to 1.
    const double R = 30.0 * std::sqrt(2.0 * c * t);
    const int n = 20000;
    const double dr = R / n;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = (i + 0.5) * dr;
        integral += analytic_heat_kernel(r, t, c) * 2.0 * std::numbers::pi * r * dr;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("brute-force gravitational gradient on canonical masses") {
    const Grid g(9, 9);
    ScalarField mu(g, 0.0);
    mu.at(0, 0) = 1.0; // origin
    const Vec2 grad = gravitational_gradient_bruteforce(mu, {1.0, 0.0});
    CHECK(grad.x == doctest::Approx(-1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(grad.y == doctest::Approx(0.0).epsilon(1e-14));

    ScalarField pair(g, 0.0);
    pair.at(2, 4) = 0.7;
    pair.at(6, 4) = 0.7;
    const Vec2 mid = gravitational_gradient_bruteforce(pair, {4.0, 4.0});
    CHECK(std::abs(mid.x) <= 1e-15);
    CHECK(std::abs(mid.y) <= 1e-15);

    CHECK_THROWS_AS(gravitational_gradient_bruteforce(pair, {2.0, 4.0}),
                    SingularEvaluationError);
}

TEST_CASE("brute-force gradient equals an independent double loop") {
    std::mt19937_64 rng(34);
    const Grid g(8, 8);
    ScalarField mu(g, 0.0);
    for (double& v : mu.values()) v = testsupport::uniform(rng);
    const Vec2 probes[3] = {{1.5, 2.5}, {3.25, 6.5}, {5.5, 0.5}};
    for (const Vec2& p : probes) {
        double ex = 0.0, ey = 0.0;
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                const double dx = p.x - x, dy = p.y - y;
                const double r2 = dx * dx + dy * dy;
                ex -= mu.at(x, y) * dx / (2.0 * std::numbers::pi * r2);
                ey -= mu.at(x, y) * dy / (2.0 * std::numbers::pi * r2);
            }
        const Vec2 got = gravitational_gradient_bruteforce(mu, p);
        CHECK(got.x == doctest::Approx(ex).epsilon(1e-12));
        CHECK(got.y == doctest::Approx(ey).epsilon(1e-12));
    }
}

TEST_CASE("implicit damped-wave steps dissipate the discrete energy") {
    const EnergyDissipationResult r = energy_dissipation_experiment(20, 25, 10, 99);
    CHECK(r.violations == 0);
}

TEST_CASE("stepping is linear in the source") {
    std::mt19937_64 rng(35);
    const Grid g(15, 15);
    ScalarField mu1 = testsupport::random_field(g, rng, true);
    ScalarField mu2 = testsupport::random_field(g, rng, true);
    ScalarField sum(g, 0.0);
    for (size_t i = 0; i < sum.values().size(); ++i)
        sum.values()[i] = mu1.values()[i] + mu2.values()[i];

    for (Scheme scheme : {Scheme::Explicit, Scheme::Implicit}) {
        PdeParams p{0.5, 0.5, 1.0, 0.02}; // explicit-stable
        StepOptions opt;
        opt.scheme = scheme;
        opt.cg_rel_tol = 1e-13;
        auto run = [&](const ScalarField& m) {
            PotentialState s(g, p);
            for (int i = 0; i < 4; ++i) s = step(s, m, opt);
            return s.current();
        };
        const ScalarField a = run(mu1);
        const ScalarField b = run(mu2);
        const ScalarField ab = run(sum);
        double scale = ab.max_abs();
        for (size_t i = 0; i < ab.values().size(); ++i)
            CHECK(std::abs(ab.values()[i] - (a.values()[i] + b.values()[i])) <=
                  1e-10 * std::max(1e-30, scale));
    }
}

TEST_CASE("heat stepping from an impulse reproduces the heat kernel") {
    const HeatKernelResult r = heat_kernel_experiment(129, 2e-5, {25.0});
    CHECK(r.worst <= 0.02);
}

TEST_CASE("explicit and implicit schemes agree to first order in tau") {
    const Grid g(21, 21);
    const ScalarField mu = three_blob_mass(g, 1.0);
    const double t_final = 0.8;

    auto disagreement = [&](double tau) {
        PdeParams p{0.5, 0.5, 1.0, tau};
        const long n = std::llround(t_final / tau);
        StepOptions ex;
        ex.scheme = Scheme::Explicit;
        StepOptions im;
        im.scheme = Scheme::Implicit;
        im.cg_rel_tol = 1e-12;
        PotentialState se(g, p), si(g, p);
        for (long i = 0; i < n; ++i) {
            se = step(se, mu, ex);
            si = step(si, mu, im);
        }
        double diff = 0.0;
        for (size_t i = 0; i < se.current().values().size(); ++i)
            diff = std::max(diff, std::abs(se.current().values()[i] -
                                           si.current().values()[i]));
        return diff;
    };

    const double d1 = disagreement(0.05);
    const double d2 = disagreement(0.025);
    const double ratio = d1 / d2;
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.3);
}

TEST_CASE("verify_limit of a zero mass is identically zero") {
    const ScalarField mu(Grid(17, 17), 0.0);
    const ConvergenceReport rep = verify_limit(mu, {1.0, 2.0, 4.0}, 0.4);
    for (double e : rep.wave_error) CHECK(e == 0.0);
    for (double e : rep.heat_error) CHECK(e == 0.0);
    CHECK(rep.poisson_grad_max == 0.0);
}

TEST_CASE("verify_limit validates its inputs") {
    const ScalarField mu(Grid(9, 9), 0.0);
    CHECK_THROWS_AS(verify_limit(mu, {1.0, 2.0}, 1.0), ConfigError);
    CHECK_THROWS_AS(verify_limit(mu, {2.0, 1.0, 4.0}, 1.0), ConfigError);
}

TEST_CASE("heat family settles onto the poisson solution") {
    // Large settle time: the diffusion steady state is the Poisson
    // solution on the same Dirichlet domain.
    const Grid g(33, 33);
    const ScalarField mu = three_blob_mass(g, 1.0);
    const ScalarField phi_ref = solve_poisson(mu, 1e-10);

    PdeParams p = PdeParams::heat_preset(0.04);
    PotentialState s(g, p);
    StepOptions opt;
    opt.scheme = Scheme::Implicit;
    // Long horizon relative to the slowest mode of the 33x33 domain.
    for (int i = 0; i < 600; ++i) s = step(s, mu, opt);

    ScalarField gx, gy, rx, ry;
    gradient_fields(s.current(), gx, gy);
    gradient_fields(phi_ref, rx, ry);
    double err = 0.0, ref = 0.0;
    for (int y = 2; y < 31; ++y)
        for (int x = 2; x < 31; ++x) {
            err = std::max(err, std::hypot(gx.at(x, y) - rx.at(x, y),
                                           gy.at(x, y) - ry.at(x, y)));
            ref = std::max(ref, std::hypot(rx.at(x, y), ry.at(x, y)));
        }
    CHECK(err <= 1e-4 * ref);
}
