#include <doctest.h>

#include <cmath>

#include "lactose/integrate.hpp"
#include "lactose/pbe.hpp"
#include "test_helpers.hpp"

using namespace lactose;

namespace {

// Frozen-scalar configuration: a vanishing shape factor removes the
// growth->volume/mass feedback, so G stays constant and V' = 0. The liquid
// sits at the mutarotation equilibrium ratio, supersaturated, at the
// reference temperature with jacket and set point matched.
struct FrozenSetup {
    Model model;
    ProcessState state;
    double growth;

    explicit FrozenSetup(double birth_coeff = 1e-300)
        : model(
              [] {
                  PhysicalConstants c;
                  c.shape_factor = 1e-30;
                  return c;
              }(),
              [&] {
                  KineticParams k = lactose::test::fixture_kinetics();
                  k.birth_rate_coeff = birth_coeff;
                  return k;
              }(),
              reference_initial_state()) {
        state = reference_initial_state();
        state.temperature = 25.0;
        state.jacket_temperature = 25.0;
        state.c_alpha = 0.12;
        state.c_beta = mutarotation_ratio(Celsius{25.0}) * 0.12;
        growth = growth_rate(state.c_alpha, state.c_beta, Celsius{25.0},
                             model.kinetics);
    }
};

double gaussian(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z);
}

}  // namespace

TEST_CASE("grid constructors and widths") {
    const SizeGrid g = SizeGrid::uniform(2e-3, 2000);
    CHECK(g.cells() == 2000);
    CHECK(g.min_width() == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(g.center(0) == doctest::Approx(5e-7).epsilon(1e-12));
    CHECK_THROWS_AS(SizeGrid::uniform(1e-3, 50), ModelError);

    const SizeGrid lg = SizeGrid::with_log_tail(5e-4, 2e-3, 500, 100);
    CHECK(lg.cells() == 600);
    CHECK(lg.length_max() == doctest::Approx(2e-3));
    for (std::size_t i = 0; i < lg.cells(); ++i) CHECK(lg.width(i) > 0.0);
}

TEST_CASE("moments of simple densities") {
    // uniform density c on [0, a]: mu_nu = c a^{nu+1}/(nu+1), exact here
    const double a = 4e-4, c = 2e12;
    SizeGrid g = SizeGrid::uniform(a, 400);
    SizeDistribution d;
    d.grid = g;
    d.values.assign(400, c);
    const std::vector<double> mu = d.moments(5);
    for (int nu = 0; nu <= 5; ++nu)
        CHECK(mu[nu] ==
              doctest::Approx(c * std::pow(a, nu + 1) / (nu + 1.0))
                  .epsilon(1e-13));

    // single-cell spike of unit number at L*
    SizeDistribution spike;
    spike.grid = SizeGrid::uniform(4e-4, 400);
    spike.values.assign(400, 0.0);
    const std::size_t cell = 200;
    spike.values[cell] = 1.0 / spike.grid.width(cell);
    const double lstar = spike.grid.center(cell);
    const std::vector<double> ms = spike.moments(5);
    CHECK(ms[0] == doctest::Approx(1.0).epsilon(1e-13));
    for (int nu = 1; nu <= 5; ++nu)
        CHECK(ms[nu] == doctest::Approx(std::pow(lstar, nu)).epsilon(1e-5));
}

TEST_CASE("moments of a sampled log-normal match the analytic values") {
    const double median = 5e-5, sigma = 0.3;
    auto lognormal = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double z = (std::log(x) - std::log(median)) / sigma;
        return std::exp(-0.5 * z * z) /
               (x * sigma * std::sqrt(2.0 * M_PI));
    };
    const SizeGrid g = SizeGrid::uniform(6e-4, 15000);
    const SizeDistribution d = SizeDistribution::from_function(g, lognormal);
    const std::vector<double> mu = d.moments(5);
    for (int nu = 0; nu <= 5; ++nu) {
        const double analytic =
            std::pow(median, nu) * std::exp(0.5 * nu * nu * sigma * sigma);
        CHECK(std::abs(mu[nu] - analytic) / analytic < 1e-6);
    }
}

TEST_CASE("pure translation: the front moves at the growth speed") {
    const FrozenSetup fx;
    const SizeGrid grid = SizeGrid::uniform(1.2e-3, 600);
    const double mean0 = 3e-4, sigma = 5e-5, scale = 1e13;
    const SizeDistribution seed = SizeDistribution::from_function(
        grid, [&](double x) { return scale * gaussian(x, mean0, sigma); });

    const double tf = 4e-4 / fx.growth;  // shift by 0.4 mm
    PbeOptions opts;
    opts.max_dt = tf;  // scalars are frozen; let the CFL set the step
    opts.output_interval = tf;
    const ControlProfile u =
        constant_policy(25.0, 0.0, tf, test::fixture_bounds());
    const PbeResult res = simulate_pbe(fx.model, seed, fx.state, u, tf, opts);

    const std::vector<double> mu0 = seed.moments(1);
    const std::vector<double> muf = res.final_distribution.moments(1);
    // number is conserved exactly (flux form, no outflow)
    CHECK(muf[0] == doctest::Approx(mu0[0]).epsilon(1e-12));
    // the mean advances by exactly G*tf
    CHECK(muf[1] / muf[0] - mu0[1] / mu0[0] ==
          doctest::Approx(fx.growth * tf).epsilon(1e-4));

    // pointwise: compare against the shifted seed
    double err2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        const double expected =
            scale * gaussian(grid.center(i) - fx.growth * tf, mean0, sigma);
        err2 += std::pow(res.final_distribution.values[i] - expected, 2);
        norm2 += expected * expected;
    }
    CHECK(std::sqrt(err2 / norm2) < 0.05);
    CHECK(res.outflow_number_fraction < 1e-12);
}

TEST_CASE("constant boundary influx builds the analytic rectangle") {
    const FrozenSetup fx(1e6);  // strong nucleation
    const double birth = nucleation_rate(fx.state.c_alpha, fx.state.c_beta,
                                         Celsius{25.0}, fx.model.kinetics);
    REQUIRE(birth > 0.9e6);

    const SizeGrid grid = SizeGrid::uniform(1e-3, 500);
    SizeDistribution seed;
    seed.grid = grid;
    seed.values.assign(500, 0.0);

    const double tf = 2e-4 / fx.growth;  // front reaches 0.2 mm
    PbeOptions opts;
    opts.max_dt = tf;
    opts.output_interval = tf;
    const ControlProfile u =
        constant_policy(25.0, 0.0, tf, test::fixture_bounds());
    const PbeResult res = simulate_pbe(fx.model, seed, fx.state, u, tf, opts);

    // number balance: mu0 = B * tf exactly (V is constant, no outflow)
    const double mu0 = res.final_distribution.total_number();
    CHECK(mu0 == doctest::Approx(birth * tf).epsilon(1e-9));

    // plateau value B/G well behind the front, ~0 well ahead of it
    const double plateau = birth / fx.growth;
    const double front = fx.growth * tf;
    const auto value_at = [&](double x) {
        return res.final_distribution
            .values[static_cast<std::size_t>(x / grid.width(0))];
    };
    CHECK(value_at(0.5 * front) == doctest::Approx(plateau).epsilon(0.01));
    CHECK(value_at(1.5 * front) < 1e-4 * plateau);
}

TEST_CASE("dilution-only run tracks the moment model exactly") {
    // growth and nucleation effectively off; water feed dilutes both models
    Model model = test::fixture_model();
    model.kinetics.growth_rate_coeff = 1e-30;
    model.kinetics.birth_rate_coeff = 1e-300;
    const ProcessState s0 = reference_initial_state();
    const double tf = 2000.0;
    ControlBounds b = test::fixture_bounds();
    const ControlProfile u = constant_policy(15.0, b.feed_max, tf, b);

    IntegratorOptions iopts;
    const Trajectory ode = integrate(model, s0, u, tf, iopts);

    MaxEntProblem prob;
    prob.moments = s0.moments;
    const MaxEntSolution me = reconstruct(prob);
    const SizeGrid grid = SizeGrid::uniform(8e-4, 800);
    const SizeDistribution seed = SizeDistribution::from_function(
        grid, [&](double x) { return me.density(x); });

    PbeOptions popts;
    popts.max_dt = 1.0;
    popts.output_interval = tf;
    const PbeResult pbe = simulate_pbe(model, seed, s0, u, tf, popts);

    const auto& mu_ode = ode.final_state().moments;
    const auto& mu_pbe = pbe.moments.back();
    const std::vector<double> mu_seed = seed.moments(5);
    for (int nu = 0; nu < 6; ++nu) {
        // compare the dilution factor, removing the seed sampling offset
        const double f_ode = mu_ode[nu] / s0.moments[nu];
        const double f_pbe = mu_pbe[nu] / mu_seed[nu];
        CHECK(f_ode == doctest::Approx(f_pbe).epsilon(1e-6));
    }
}

TEST_CASE("upwind scheme preserves positivity") {
    const FrozenSetup fx;
    const SizeGrid grid = SizeGrid::uniform(1e-3, 500);
    const SizeDistribution seed = SizeDistribution::from_function(
        grid, [&](double x) { return 1e13 * gaussian(x, 2e-4, 2e-5); });
    const double tf = 1e-4 / fx.growth;
    PbeOptions opts;
    opts.scheme = PbeScheme::Upwind1;
    opts.max_dt = tf;
    const ControlProfile u =
        constant_policy(25.0, 0.0, tf, test::fixture_bounds());
    const PbeResult res = simulate_pbe(fx.model, seed, fx.state, u, tf, opts);
    for (double v : res.final_distribution.values) CHECK(v >= 0.0);
}

TEST_CASE("forcing a step beyond the CFL limit is rejected with a hint") {
    const FrozenSetup fx;
    const SizeGrid grid = SizeGrid::uniform(1e-3, 500);
    const SizeDistribution seed = SizeDistribution::from_function(
        grid, [&](double x) { return 1e13 * gaussian(x, 2e-4, 2e-5); });
    PbeOptions opts;
    opts.fixed_dt = 1e5;  // far beyond cfl * dx / G
    const ControlProfile u =
        constant_policy(25.0, 0.0, 1e5, test::fixture_bounds());
    try {
        simulate_pbe(fx.model, seed, fx.state, u, 1e5, opts);
        FAIL("expected CflViolation");
    } catch (const CflViolation& e) {
        CHECK(e.suggested_dt > 0.0);
        CHECK(e.suggested_dt < 1e5);
    }
}

TEST_CASE("seed residual check: zero and scaled seeds") {
    const std::vector<double> targets = reference_initial_state().moments;
    SizeDistribution zero;
    zero.grid = SizeGrid::uniform(6e-4, 600);
    zero.values.assign(600, 0.0);
    const std::vector<double> res = seed_from_moments_check(zero, targets);
    for (int nu = 0; nu < 6; ++nu)
        CHECK(res[nu] == doctest::Approx(-targets[nu]).epsilon(1e-14));

    MaxEntProblem prob;
    prob.moments = targets;
    const MaxEntSolution me = reconstruct(prob);
    const SizeGrid fine = SizeGrid::uniform(6e-4, 15000);
    SizeDistribution seed = SizeDistribution::from_function(
        fine, [&](double x) { return me.density(x); });
    const std::vector<double> r1 = seed_from_moments_check(seed, targets);
    for (int nu = 0; nu < 6; ++nu)
        CHECK(std::abs(r1[nu]) / targets[nu] < 1e-6);

    // doubling the seed shifts residuals affinely: r(2n) = 2 mu(n) - target
    SizeDistribution doubled = seed;
    for (auto& v : doubled.values) v *= 2.0;
    const std::vector<double> r2 = seed_from_moments_check(doubled, targets);
    const std::vector<double> mu = seed.moments(5);
    for (int nu = 0; nu < 6; ++nu)
        CHECK(r2[nu] ==
              doctest::Approx(2.0 * mu[nu] - targets[nu]).epsilon(1e-12));
}
