#include <doctest.h>

#include <cmath>

#include "lactose/kinetics.hpp"
#include "test_helpers.hpp"

using namespace lactose;

TEST_CASE("mutarotation ratio matches its defining line") {
    CHECK(mutarotation_ratio(Celsius{25.0}) == doctest::Approx(1.5725).epsilon(1e-12));
    CHECK(mutarotation_ratio(Celsius{70.0}) == doctest::Approx(1.451).epsilon(1e-12));
}

TEST_CASE("mutarotation rates: k1/k2 equals the equilibrium ratio") {
    const KineticParams p = test::fixture_kinetics();
    for (double t = 0.0; t <= 70.0; t += 3.5) {
        const MutarotationRates k = mutarotation_rates(Celsius{t}, p);
        CHECK(k.alpha_to_beta / k.beta_to_alpha ==
              doctest::Approx(mutarotation_ratio(Celsius{t})).epsilon(1e-14));
        CHECK(k.alpha_to_beta >= 0.0);
        CHECK(k.beta_to_alpha >= 0.0);
    }
    // fixture regression, independently evaluated
    const MutarotationRates k25 = mutarotation_rates(Celsius{25.0}, p);
    CHECK(k25.beta_to_alpha == doctest::Approx(4.230074659729677e-05).epsilon(1e-12));
}

TEST_CASE("huge activation energy freezes mutarotation") {
    KineticParams p = test::fixture_kinetics();
    p.activation_energy = 1e9;
    const MutarotationRates k = mutarotation_rates(Celsius{25.0}, p);
    CHECK(k.beta_to_alpha == doctest::Approx(0.0));
    CHECK(k.alpha_to_beta == doctest::Approx(0.0));
}

TEST_CASE("equilibrium saturation fixtures") {
    CHECK(equilibrium_saturation(Celsius{0.0}) ==
          doctest::Approx(0.041329166666666674).epsilon(1e-12));
    CHECK(equilibrium_saturation(Celsius{25.0}) ==
          doctest::Approx(0.08549596602505602).epsilon(1e-12));
    CHECK(equilibrium_saturation(Celsius{70.0}) ==
          doctest::Approx(0.3169206027568094).epsilon(1e-12));
}

TEST_CASE("equilibrium saturation increases with temperature") {
    double prev = equilibrium_saturation(Celsius{0.0});
    for (double t = 0.5; t <= 70.0; t += 0.5) {
        const double cur = equilibrium_saturation(Celsius{t});
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("alpha saturation reduces to the equilibrium value at equilibrium beta") {
    for (double t = 0.0; t <= 70.0; t += 7.0) {
        const Celsius T{t};
        const double eq = equilibrium_saturation(T);
        const double cb = mutarotation_ratio(T) * eq;
        CHECK(alpha_saturation(cb, T) == doctest::Approx(eq).epsilon(1e-14));
    }
}

TEST_CASE("alpha saturation fixtures at 70 degC") {
    CHECK(alpha_saturation(0.521, Celsius{70.0}) ==
          doctest::Approx(0.31095465004922257).epsilon(1e-12));
    CHECK(alpha_saturation(0.0, Celsius{70.0}) ==
          doctest::Approx(0.3617862540239708).epsilon(1e-12));
}

TEST_CASE("nucleation clamps below and at saturation") {
    const KineticParams p = test::fixture_kinetics();
    const Celsius T{70.0};
    const double cs = alpha_saturation(0.521, T);
    CHECK(nucleation_rate(cs, 0.521, T, p) == 0.0);
    CHECK(nucleation_rate(0.5 * cs, 0.521, T, p) == 0.0);
    // continuity: just above saturation the rate is still ~0
    CHECK(nucleation_rate(cs * (1.0 + 1e-9), 0.521, T, p) < 1e-30);
}

TEST_CASE("nucleation fixture at the startup state") {
    const KineticParams p = test::fixture_kinetics();
    CHECK(nucleation_rate(0.359, 0.521, Celsius{70.0}, p) ==
          doctest::Approx(1.1799917523016504e-07).epsilon(1e-12));
}

TEST_CASE("growth clamps below saturation and scales linearly above") {
    KineticParams p = test::fixture_kinetics();
    const Celsius T{70.0};
    const double cs = alpha_saturation(0.521, T);
    CHECK(growth_rate(cs, 0.521, T, p) == 0.0);
    CHECK(growth_rate(0.9 * cs, 0.521, T, p) == 0.0);
    CHECK(growth_rate(0.359, 0.521, T, p) ==
          doctest::Approx(4.8045349950777415e-09).epsilon(1e-12));
    // the raw tabulated coefficient, for the formula itself
    p.growth_rate_coeff = 10e10;
    CHECK(growth_rate(0.359, 0.521, T, p) ==
          doctest::Approx(4804534995.077742).epsilon(1e-12));
    p.allow_negative_growth = true;
    CHECK(growth_rate(0.9 * cs, 0.521, T, p) < 0.0);
}

TEST_CASE("nucleation and growth are monotone in c_alpha when supersaturated") {
    const KineticParams p = test::fixture_kinetics();
    const Celsius T{40.0};
    const double cs = alpha_saturation(0.4, T);
    double prev_b = 0.0, prev_g = 0.0;
    for (double ca = cs * 1.001; ca < cs * 2.0; ca += cs * 0.05) {
        const double b = nucleation_rate(ca, 0.4, T, p);
        const double g = growth_rate(ca, 0.4, T, p);
        CHECK(b >= prev_b);
        CHECK(g >= prev_g);
        prev_b = b;
        prev_g = g;
    }
}

TEST_CASE("kinetic parameter validation") {
    KineticParams p;  // activation energy unset
    CHECK_THROWS_AS(p.validate(), ModelError);
    p = test::fixture_kinetics();
    CHECK_NOTHROW(p.validate());
    p.birth_rate_coeff = -1.0;
    CHECK_THROWS_AS(p.validate(), ModelError);
}
