#include <doctest.h>

#include <cmath>

#include "lactose/integrate.hpp"
#include "test_helpers.hpp"

using namespace lactose;

namespace {

// Undersaturated state at mutarotation and thermal equilibrium: the full
// right-hand side vanishes identically.
ProcessState equilibrium_state() {
    ProcessState s = reference_initial_state();
    s.temperature = 25.0;
    s.jacket_temperature = 25.0;
    s.c_alpha = 0.05;
    s.c_beta = mutarotation_ratio(Celsius{25.0}) * 0.05;
    return s;
}

}  // namespace

TEST_CASE("equilibrium state stays put") {
    const Model model = test::fixture_model();
    const ControlProfile p =
        constant_policy(25.0, 0.0, 1000.0, test::fixture_bounds());
    const ProcessState s0 = equilibrium_state();
    IntegratorOptions opts;
    const Trajectory traj = integrate(model, s0, p, 1000.0, opts);
    REQUIRE(traj.reached(1000.0));
    const ProcessState& fin = traj.final_state();
    CHECK(fin.c_alpha == doctest::Approx(s0.c_alpha).epsilon(1e-12));
    CHECK(fin.temperature == doctest::Approx(25.0).epsilon(1e-12));
    for (int nu = 0; nu < 6; ++nu)
        CHECK(fin.moments[nu] ==
              doctest::Approx(s0.moments[nu]).epsilon(1e-12));
}

TEST_CASE("first-order jacket lag reproduces the analytic exponential") {
    // with heat exchange switched off the jacket equation is dx/dt = -x
    PhysicalConstants c;
    c.jacket_rate = 1.0;
    c.heat_transfer_coeff = 1e-30;
    const Model model(c, test::fixture_kinetics(), equilibrium_state());
    ProcessState s0 = equilibrium_state();
    s0.jacket_temperature = 1.0;
    s0.temperature = 0.0;
    ControlBounds b = test::fixture_bounds();
    const ControlProfile p = constant_policy(0.0, 0.0, 1.0, b);
    IntegratorOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-12;
    opts.output_interval = 0.25;
    opts.max_step = 0.5;
    const Trajectory traj = integrate(model, s0, p, 1.0, opts);
    CHECK(traj.final_state().jacket_temperature ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("zero horizon returns exactly the initial state") {
    const Model model = test::fixture_model();
    const Trajectory traj =
        integrate(model, reference_initial_state(),
                  test::fixture_constant_policy(), 0.0, IntegratorOptions{});
    REQUIRE(traj.times.size() == 1);
    CHECK(traj.times[0] == 0.0);
    CHECK(traj.states[0].moments == reference_initial_state().moments);
}

TEST_CASE("integration is deterministic") {
    const Model model = test::fixture_model();
    IntegratorOptions opts;
    const Trajectory a = integrate(model, reference_initial_state(),
                                   test::fixture_constant_policy(), 2000.0,
                                   opts);
    const Trajectory b = integrate(model, reference_initial_state(),
                                   test::fixture_constant_policy(), 2000.0,
                                   opts);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        CHECK(a.states[i].moments[5] == b.states[i].moments[5]);
        CHECK(a.states[i].temperature == b.states[i].temperature);
    }
}

TEST_CASE("adaptive and fixed-step runs agree on the reference policy") {
    const Model model = test::fixture_model();
    IntegratorOptions adaptive;
    IntegratorOptions fixed;
    fixed.method = IntegratorMethod::Rk4Fixed;
    fixed.fixed_dt = 1.0;
    const Trajectory a =
        integrate(model, reference_initial_state(),
                  test::fixture_constant_policy(), 11000.0, adaptive);
    const Trajectory f =
        integrate(model, reference_initial_state(),
                  test::fixture_constant_policy(), 11000.0, fixed);
    const ProcessState& sa = a.final_state();
    const ProcessState& sf = f.final_state();
    const double tol = 10.0 * std::max(adaptive.rel_tol, adaptive.abs_tol);
    for (int nu = 0; nu < 6; ++nu)
        CHECK(std::abs(sa.moments[nu] - sf.moments[nu]) /
                  std::abs(sa.moments[nu]) <
              tol);
    CHECK(std::abs(sa.temperature - sf.temperature) / 70.0 < tol);
}

TEST_CASE("conservation residuals shrink with the tolerance") {
    const Model model = test::fixture_model();
    auto residual_at = [&](double rel_tol) {
        IntegratorOptions opts;
        opts.rel_tol = rel_tol;
        opts.abs_tol = rel_tol;
        const Trajectory traj =
            integrate(model, reference_initial_state(),
                      test::fixture_constant_policy(), 11000.0, opts);
        const ConservationResiduals r = conservation_residuals(model, traj);
        return std::max(r.max_abs_lactose, r.max_abs_water);
    };
    const double coarse = residual_at(1e-5);
    const double fine = residual_at(1e-6);
    CHECK(fine * 5.0 <= coarse);
}

TEST_CASE("path monitor: feasible run reports no violations") {
    const Model model = test::fixture_model();
    const Trajectory traj =
        integrate(model, reference_initial_state(),
                  test::fixture_constant_policy(), 11000.0,
                  IntegratorOptions{});
    PathBounds bounds;
    bounds.volume_max = model.constants.max_volume;
    const ViolationReport rep = monitor_path_constraints(model, traj, bounds);
    CHECK(rep.volume_high.magnitude == 0.0);
    CHECK(rep.volume_low.magnitude == 0.0);
    CHECK(rep.temp_high.magnitude == 0.0);
    CHECK(rep.temp_low.magnitude == 0.0);
    CHECK(rep.undersaturation.magnitude == 0.0);
    CHECK(rep.max_scaled(bounds) == 0.0);
}

TEST_CASE("path monitor: constructed infeasible bounds are reported") {
    const Model model = test::fixture_model();
    const Trajectory traj =
        integrate(model, reference_initial_state(),
                  test::fixture_constant_policy(), 2000.0,
                  IntegratorOptions{});
    PathBounds tight;
    tight.temp_max = 60.0;  // the startup state sits at 70 degC
    const ViolationReport rep = monitor_path_constraints(model, traj, tight);
    CHECK(rep.temp_high.magnitude == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(rep.temp_high.first_time == 0.0);
}

TEST_CASE("path monitor: undersaturated start violates at t = 0") {
    const Model model = test::fixture_model();
    ProcessState s0 = equilibrium_state();  // well below saturation
    const ControlProfile p =
        constant_policy(25.0, 0.0, 100.0, test::fixture_bounds());
    const Trajectory traj =
        integrate(model, s0, p, 100.0, IntegratorOptions{});
    const ViolationReport rep =
        monitor_path_constraints(model, traj, PathBounds{});
    CHECK(rep.undersaturation.magnitude > 0.0);
    CHECK(rep.undersaturation.first_time == 0.0);
}

TEST_CASE("volume overflow stops integration with a flagged event") {
    Model model = test::fixture_model();
    model.constants.max_volume = 0.0015001;  // just above the initial charge
    ControlBounds b = test::fixture_bounds();
    const ControlProfile p = constant_policy(15.0, b.feed_max, 11000.0, b);
    const Trajectory traj = integrate(model, reference_initial_state(), p,
                                      11000.0, IntegratorOptions{});
    REQUIRE(traj.event.has_value());
    CHECK(traj.event->kind == IntegrationEvent::Kind::VolumeOverflow);
    CHECK(traj.times.back() < 11000.0);
}

TEST_CASE("step size underflow raises the dedicated error") {
    const Model model = test::fixture_model();
    IntegratorOptions opts;
    opts.rel_tol = 1e-15;
    opts.abs_tol = 1e-16;
    opts.min_step = 20.0;
    opts.max_step = 50.0;
    CHECK_THROWS_AS(integrate(model, reference_initial_state(),
                              test::fixture_constant_policy(), 1000.0, opts),
                    StepSizeUnderflow);
}

TEST_CASE("invalid initial state is rejected with the offending component") {
    const Model model = test::fixture_model();
    ProcessState bad = reference_initial_state();
    bad.moments[1] = -1.0;
    try {
        integrate(model, bad, test::fixture_constant_policy(), 100.0,
                  IntegratorOptions{});
        FAIL("expected StateInvariantViolated");
    } catch (const StateInvariantViolated& e) {
        CHECK(e.component == "mu1");
    }
}
