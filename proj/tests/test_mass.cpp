#include "doctest.h"

#include <cmath>

#include "testsupport.hpp"
#include "wavefoa/mass.hpp"

using namespace wavefoa;

namespace {

MassParams plain_params(double k = 1.0) {
    MassParams p;
    p.alpha1 = 1.0;
    p.alpha2 = 0.0;
    p.k = k;
    p.sigma = 2.0;
    return p;
}

} // namespace

TEST_CASE("uniform frame with no motion produces zero mass") {
    const Grid g(8, 8);
    Frame f{ScalarField(g, 0.5), 0.0};
    InhibitionField inh(g);
    MassParams p;
    p.sigma = 2.0;
    const ScalarField mu = compute_mass(f, nullptr, inh, p);
    for (double v : mu.values()) CHECK(v == 0.0);
}

TEST_CASE("full inhibition annihilates mass") {
    const Grid g(8, 8);
    std::mt19937_64 rng(21);
    Frame prev{testsupport::random_field(g, rng), 0.0};
    Frame curr{testsupport::random_field(g, rng), 0.04};
    for (double& v : prev.brightness.values()) v = std::abs(v);
    for (double& v : curr.brightness.values()) v = std::abs(v);
    InhibitionField inh(g);
    inh.level.fill(1.0);
    MassParams p;
    p.sigma = 2.0;
    const ScalarField mu = compute_mass(curr, &prev, inh, p);
    for (double v : mu.values()) CHECK(v == 0.0);
}

TEST_CASE("vertical step edge produces mass on the two adjacent columns") {
    // 16x16, left half 0, right half 1; central differences put 0.5 on
    // the interior columns either side of the jump.
    const Grid g(16, 16);
    ScalarField b(g, 0.0);
    for (int y = 0; y < 16; ++y)
        for (int x = 8; x < 16; ++x) b.at(x, y) = 1.0;
    Frame f{std::move(b), 0.0};
    InhibitionField inh(g);
    const ScalarField mu = compute_mass(f, nullptr, inh, plain_params());
    for (int y = 1; y < 15; ++y)
        for (int x = 1; x < 15; ++x) {
            const double expect = (x == 7 || x == 8) ? 0.5 : 0.0;
            CHECK(mu.at(x, y) == doctest::Approx(expect).epsilon(1e-14));
        }
}

TEST_CASE("mass is nonnegative and exactly linear in k") {
    const Grid g(12, 10);
    std::mt19937_64 rng(22);
    Frame prev{testsupport::random_field(g, rng), 0.0};
    Frame curr{testsupport::random_field(g, rng), 0.04};
    InhibitionField inh(g);
    for (double& v : inh.level.values()) v = 0.5 * testsupport::uniform(rng);

    const ScalarField mu1 = compute_mass(curr, &prev, inh, plain_params(1.0));
    const ScalarField mu2 = compute_mass(curr, &prev, inh, plain_params(2.0));
    for (size_t i = 0; i < mu1.values().size(); ++i) {
        CHECK(mu1.values()[i] >= 0.0);
        CHECK(mu2.values()[i] == 2.0 * mu1.values()[i]);
    }
}

TEST_CASE("mass is pointwise nonincreasing in the inhibition") {
    const Grid g(10, 10);
    std::mt19937_64 rng(23);
    Frame curr{testsupport::random_field(g, rng), 0.0};
    InhibitionField weak(g), strong(g);
    for (size_t i = 0; i < weak.level.values().size(); ++i) {
        const double lo = 0.4 * testsupport::uniform(rng);
        weak.level.values()[i] = lo;
        strong.level.values()[i] = lo + 0.4 * testsupport::uniform(rng);
    }
    MassParams p;
    p.sigma = 2.0;
    const ScalarField mu_weak = compute_mass(curr, nullptr, weak, p);
    const ScalarField mu_strong = compute_mass(curr, nullptr, strong, p);
    for (size_t i = 0; i < mu_weak.values().size(); ++i)
        CHECK(mu_strong.values()[i] <= mu_weak.values()[i]);
}

TEST_CASE("compute_mass validates grids and timestamps") {
    Frame a{ScalarField(Grid(8, 8), 0.1), 0.0};
    Frame b{ScalarField(Grid(9, 8), 0.1), 0.04};
    InhibitionField inh(Grid(8, 8));
    MassParams p;
    p.sigma = 2.0;
    CHECK_THROWS_AS(compute_mass(a, &b, inh, p), GridMismatchError);

    Frame c{ScalarField(Grid(8, 8), 0.1), 0.0};
    CHECK_THROWS_AS(compute_mass(a, &c, inh, p), NonMonotonicTimeError); // equal times
}

TEST_CASE("inhibition is inert with zero rates") {
    const Grid g(12, 12);
    std::mt19937_64 rng(24);
    InhibitionField inh(g);
    for (double& v : inh.level.values()) v = testsupport::uniform(rng);
    MassParams p;
    p.beta = 0.0;
    p.gamma = 0.0;
    p.sigma = 2.0;
    const InhibitionField before = inh;
    const InhibitionField after = update_inhibition(std::move(inh), {5.0, 5.0}, p, 0.04);
    for (size_t i = 0; i < after.level.values().size(); ++i)
        CHECK(after.level.values()[i] == before.level.values()[i]);
}

TEST_CASE("inhibition deposits a Gaussian bump at the focus") {
    const Grid g(16, 16);
    InhibitionField inh(g);
    MassParams p;
    p.beta = 10.0;
    p.gamma = 0.0;
    p.sigma = 3.0;
    const InhibitionField out = update_inhibition(std::move(inh), {8.0, 8.0}, p, 0.04);
    CHECK(out.level.at(8, 8) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(out.level.at(11, 8) ==
          doctest::Approx(0.4 * std::exp(-9.0 / 18.0)).epsilon(1e-12));
    CHECK(out.level.at(8, 8) > out.level.at(9, 8));
    CHECK(out.level.at(9, 8) > out.level.at(12, 8));
}

TEST_CASE("inhibition clamps at one") {
    const Grid g(8, 8);
    InhibitionField inh(g);
    inh.level.fill(1.0);
    MassParams p;
    p.beta = 10.0;
    p.gamma = 0.0;
    p.sigma = 2.0;
    const InhibitionField out = update_inhibition(std::move(inh), {4.0, 4.0}, p, 0.04);
    CHECK(out.level.at(4, 4) == 1.0);
}

TEST_CASE("inhibition stays within [0,1] for random dynamics") {
    const Grid g(10, 10);
    std::mt19937_64 rng(25);
    for (int rep = 0; rep < 50; ++rep) {
        InhibitionField inh(g);
        for (double& v : inh.level.values()) v = testsupport::uniform(rng);
        MassParams p;
        p.beta = 30.0 * testsupport::uniform(rng);
        p.gamma = 30.0 * testsupport::uniform(rng);
        p.sigma = 0.5 + 5.0 * testsupport::uniform(rng);
        const double tau = 0.001 + 0.2 * testsupport::uniform(rng);
        const Vec2 foa{testsupport::uniform(rng) * 9.0, testsupport::uniform(rng) * 9.0};
        const InhibitionField out = update_inhibition(std::move(inh), foa, p, tau);
        for (double v : out.level.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("recovery alone decays inhibition geometrically") {
    const Grid g(9, 9);
    std::mt19937_64 rng(26);
    InhibitionField inh(g);
    for (double& v : inh.level.values()) v = testsupport::uniform(rng);
    MassParams p;
    p.beta = 0.0;
    p.gamma = 0.5;
    p.sigma = 2.0;
    const double tau = 0.1;
    const InhibitionField before = inh;
    const InhibitionField after = update_inhibition(std::move(inh), {4.0, 4.0}, p, tau);
    for (size_t i = 0; i < after.level.values().size(); ++i)
        CHECK(after.level.values()[i] ==
              doctest::Approx((1.0 - p.gamma * tau) * before.level.values()[i])
                  .epsilon(1e-14));
}

TEST_CASE("update_inhibition rejects an out-of-retina focus") {
    InhibitionField inh(Grid(8, 8));
    MassParams p;
    p.sigma = 2.0;
    CHECK_THROWS_AS(update_inhibition(std::move(inh), {-1.0, 4.0}, p, 0.04),
                    OutOfDomainError);
}

TEST_CASE("normalized mass integrates to k and renormalizes under suppression") {
    const Grid g(16, 16);
    ScalarField b(g, 0.0);
    for (int y = 0; y < 16; ++y)
        for (int x = 8; x < 16; ++x) b.at(x, y) = 1.0;
    Frame f{std::move(b), 0.0};
    MassParams p;
    p.alpha2 = 0.0;
    p.k = 250000.0;
    p.sigma = 2.0;

    InhibitionField none(g);
    const ScalarField mu = compute_mass_normalized(f, nullptr, none, p);
    CHECK(mu.sum() == doctest::Approx(p.k).epsilon(1e-12));

    // Suppress one of the two feature columns: the survivor is rescaled
    // so the total stays k.
    InhibitionField half(g);
    for (int y = 0; y < 16; ++y) half.level.at(7, y) = 1.0;
    const ScalarField mu_half = compute_mass_normalized(f, nullptr, half, p);
    CHECK(mu_half.sum() == doctest::Approx(p.k).epsilon(1e-12));
    for (int y = 1; y < 15; ++y) CHECK(mu_half.at(7, y) == 0.0);

    Frame flat{ScalarField(g, 0.25), 0.0};
    const ScalarField zero = compute_mass_normalized(flat, nullptr, none, p);
    for (double v : zero.values()) CHECK(v == 0.0);
}
