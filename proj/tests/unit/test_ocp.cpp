#include <doctest.h>

#include <cmath>
#include <random>

#include "lactose/ocp.hpp"
#include "test_helpers.hpp"

using namespace lactose;

namespace {

OcpSpec small_spec(ObjectiveKind kind, double horizon = 3000.0) {
    OcpSpec spec;
    spec.objective.kind = kind;
    spec.control_bounds = test::fixture_bounds();
    spec.path_bounds.volume_max = PhysicalConstants{}.max_volume;
    spec.knots = 4;
    spec.horizon = horizon;
    spec.optimizer.max_inner = 8;
    spec.optimizer.max_outer = 3;
    spec.sim_options.rel_tol = 1e-7;
    spec.sim_options.output_interval = 50.0;
    return spec;
}

Trajectory snapshot_trajectory(const Model& model, const ProcessState& s) {
    return integrate(model, s, test::fixture_constant_policy(1.0), 0.0,
                     IntegratorOptions{});
}

}  // namespace

TEST_CASE("terminal objectives at the startup state") {
    const Model model = test::fixture_model();
    const Trajectory traj =
        snapshot_trajectory(model, reference_initial_state());
    ObjectiveSpec obj;
    obj.kind = ObjectiveKind::TerminalD43;
    CHECK(evaluate_objective(traj, model, obj) ==
          doctest::Approx(0.0002070443349753695).epsilon(1e-12));
    obj.kind = ObjectiveKind::TerminalCv;
    CHECK(evaluate_objective(traj, model, obj) ==
          doctest::Approx(0.0369367834821539).epsilon(1e-10));
}

TEST_CASE("nucleation objective is zero at a saturated terminal state") {
    const Model model = test::fixture_model();
    ProcessState s = reference_initial_state();
    s.c_alpha = alpha_saturation(s.c_beta, Celsius{s.temperature});
    const Trajectory traj = snapshot_trajectory(model, s);
    ObjectiveSpec obj;
    obj.kind = ObjectiveKind::TerminalNucleation;
    CHECK(evaluate_objective(traj, model, obj) == 0.0);
}

TEST_CASE("moment match is exactly zero on a perfect match") {
    const Model model = test::fixture_model();
    const ProcessState s = reference_initial_state();
    const Trajectory traj = snapshot_trajectory(model, s);
    ObjectiveSpec obj;
    obj.kind = ObjectiveKind::MomentMatch;
    obj.target_moments.resize(6);
    for (int nu = 0; nu < 6; ++nu)
        obj.target_moments[nu] = s.moments[nu] / s.moments[3];
    CHECK(evaluate_objective(traj, model, obj) == 0.0);
    obj.target_moments[3] = 1.1;  // violates the normalization contract
    CHECK_THROWS_AS(evaluate_objective(traj, model, obj), ModelError);
}

TEST_CASE("lognormal target moments are normalized to nu3 = 1") {
    const std::vector<double> nu = lognormal_target_moments(5e-5, 0.3);
    CHECK(nu[3] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(nu[0] == doctest::Approx(5335814486867.795).epsilon(1e-12));
    CHECK(nu[5] == doctest::Approx(5.13608302660972e-09).epsilon(1e-12));
}

TEST_CASE("encode/decode round trip hits the policy at the knots") {
    const Model model = test::fixture_model();
    const OcpSpec spec = small_spec(ObjectiveKind::TerminalD43);
    ShootingProblem prob(model, spec, reference_initial_state());
    CHECK(prob.dimension() == 8);
    const ControlProfile lin = test::fixture_linear_policy(spec.horizon);
    const std::vector<double> x = prob.encode(lin);
    const auto dec = prob.decode(x);
    for (double t = 0.0; t <= spec.horizon; t += spec.horizon / 4.0)
        CHECK(dec.profile.sample(t).set_point ==
              doctest::Approx(lin.sample(t).set_point).epsilon(1e-9));
    CHECK(dec.tf == spec.horizon);
}

TEST_CASE("feasible evaluation: penalized cost equals the objective") {
    const Model model = test::fixture_model();
    const OcpSpec spec = small_spec(ObjectiveKind::TerminalD43);
    ShootingProblem prob(model, spec, reference_initial_state());
    const std::vector<double> x =
        prob.encode(test::fixture_constant_policy(spec.horizon));
    const PenaltyWeights w =
        PenaltyWeights::uniform(prob.constraint_count(), 100.0);
    const EvalResult r = prob.evaluate(x, w);
    REQUIRE(r.simulated);
    CHECK(r.max_violation() == 0.0);
    CHECK(r.cost == r.objective);
}

TEST_CASE("penalty term doubles with the weights and matches the monitor") {
    const Model model = test::fixture_model();
    OcpSpec spec = small_spec(ObjectiveKind::TerminalD43);
    spec.path_bounds.temp_max = 60.0;  // startup state violates this
    ShootingProblem prob(model, spec, reference_initial_state());
    const std::vector<double> x =
        prob.encode(test::fixture_constant_policy(spec.horizon));
    const PenaltyWeights w1 =
        PenaltyWeights::uniform(prob.constraint_count(), 100.0);
    const PenaltyWeights w2 =
        PenaltyWeights::uniform(prob.constraint_count(), 200.0);
    const EvalResult r1 = prob.evaluate(x, w1);
    const EvalResult r2 = prob.evaluate(x, w2);
    REQUIRE(r1.max_violation() > 0.0);
    const double p1 = r1.cost - r1.objective;
    const double p2 = r2.cost - r2.objective;
    CHECK(p2 == doctest::Approx(2.0 * p1).epsilon(1e-12));

    const Trajectory traj = prob.simulate(x);
    const ViolationReport rep =
        monitor_path_constraints(model, traj, spec.path_bounds);
    const double span = spec.path_bounds.temp_max - spec.path_bounds.temp_min;
    CHECK(p1 == doctest::Approx(100.0 *
                                std::pow(rep.temp_high.magnitude / span, 2))
                    .epsilon(1e-12));
}

TEST_CASE("unsimulatable decisions get the barrier value") {
    const Model model = test::fixture_model();
    OcpSpec spec = small_spec(ObjectiveKind::TerminalD43);
    spec.free_seed_moments = true;
    ShootingProblem prob(model, spec, reference_initial_state());
    std::vector<double> x(prob.dimension(), 0.5);
    // crush mu4 by a decade: mu3*mu5 >= mu4^2 still holds, but
    // mu2*mu4 >= mu3^2 fails -> the state is rejected at t = 0
    x[2 * 4 + 3] = 0.0;
    const PenaltyWeights w =
        PenaltyWeights::uniform(prob.constraint_count(), 100.0);
    const EvalResult r = prob.evaluate(x, w);
    CHECK_FALSE(r.simulated);
    CHECK(r.cost == doctest::Approx(1e12));
}

TEST_CASE("seed decoding pins the third moment and the seed mass") {
    const Model model = test::fixture_model();
    OcpSpec spec = small_spec(ObjectiveKind::TerminalD43);
    spec.free_seed_moments = true;
    ShootingProblem prob(model, spec, reference_initial_state());
    std::vector<double> x(prob.dimension(), 0.5);
    x[2 * 4 + 0] = 0.7;  // scale mu0 up
    x[2 * 4 + 4] = 0.3;  // scale mu5 down
    const auto dec = prob.decode(x);
    const ProcessState base = reference_initial_state();
    CHECK(dec.initial_state.moments[3] == base.moments[3]);
    CHECK(dec.initial_state.crystal_mass == base.crystal_mass);
    CHECK(dec.initial_state.moments[0] > base.moments[0]);
    CHECK(dec.initial_state.moments[5] < base.moments[5]);
    // neutral seed slots reproduce the base seed exactly
    std::vector<double> neutral(prob.dimension(), 0.5);
    CHECK(prob.decode(neutral).initial_state.moments == base.moments);
}

TEST_CASE("descent dominates both heuristic policies on a small problem") {
    const Model model = test::fixture_model();
    const OcpSpec spec = small_spec(ObjectiveKind::TerminalD43);
    ShootingProblem prob(model, spec, reference_initial_state());
    const PenaltyWeights w0 =
        PenaltyWeights::uniform(prob.constraint_count(), 0.0);
    const double obj_constant =
        prob.evaluate(prob.encode(test::fixture_constant_policy(spec.horizon)),
                      w0)
            .objective;
    const double obj_linear =
        prob.evaluate(prob.encode(test::fixture_linear_policy(spec.horizon)),
                      w0)
            .objective;

    const OcpSolution sol = solve_ocp(
        model, spec, reference_initial_state(),
        {test::fixture_constant_policy(spec.horizon),
         test::fixture_linear_policy(spec.horizon)});
    CHECK(sol.objective <= obj_constant);
    CHECK(sol.objective <= obj_linear);
    CHECK(sol.max_scaled_violation < spec.optimizer.feasibility_tol);
    CHECK(sol.converged);
}

TEST_CASE("reported objective is reproducible by re-simulation") {
    const Model model = test::fixture_model();
    const OcpSpec spec = small_spec(ObjectiveKind::TerminalCv);
    const OcpSolution sol = solve_ocp(
        model, spec, reference_initial_state(),
        {test::fixture_constant_policy(spec.horizon)});
    ShootingProblem prob(model, spec, reference_initial_state());
    const Trajectory traj = prob.simulate(sol.decision);
    const double replay = evaluate_objective(traj, model, spec.objective);
    CHECK(std::abs(replay - sol.objective) <=
          1e-9 * std::max(1.0, std::abs(sol.objective)));
}

TEST_CASE("missing starts raise InfeasibleStart") {
    const Model model = test::fixture_model();
    const OcpSpec spec = small_spec(ObjectiveKind::TerminalD43);
    CHECK_THROWS_AS(
        solve_ocp(model, spec, reference_initial_state(), {}),
        InfeasibleStart);
}

TEST_CASE("solution files round-trip the decision vector") {
    const Model model = test::fixture_model();
    OcpSpec spec = small_spec(ObjectiveKind::TerminalD43);
    spec.optimizer.max_inner = 2;
    const OcpSolution sol = solve_ocp(
        model, spec, reference_initial_state(),
        {test::fixture_constant_policy(spec.horizon)});
    const std::string path = "ocp_solution_test.txt";
    sol.save(path);
    const std::vector<double> loaded = OcpSolution::load_decision(path);
    REQUIRE(loaded.size() == sol.decision.size());
    for (std::size_t i = 0; i < loaded.size(); ++i)
        CHECK(loaded[i] == sol.decision[i]);
    std::remove(path.c_str());
}

TEST_CASE("central differences pass the Richardson step-halving check") {
    // smooth deterministic cost: fixed-step RK4 inside the merit function
    const Model model = test::fixture_model();
    OcpSpec spec = small_spec(ObjectiveKind::TerminalD43, 2000.0);
    spec.sim_options.method = IntegratorMethod::Rk4Fixed;
    spec.sim_options.fixed_dt = 2.0;
    ShootingProblem prob(model, spec, reference_initial_state());
    const PenaltyWeights w =
        PenaltyWeights::uniform(prob.constraint_count(), 100.0);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.3, 0.7);
    int tested = 0, excluded = 0;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> x(prob.dimension());
        std::vector<double> dir(prob.dimension());
        double norm = 0.0;
        for (auto& v : x) v = uni(rng);
        for (auto& v : dir) {
            v = uni(rng) - 0.5;
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (auto& v : dir) v /= norm;

        auto directional = [&](double h) {
            std::vector<double> xp = x, xm = x;
            for (std::size_t i = 0; i < x.size(); ++i) {
                xp[i] += h * dir[i];
                xm[i] -= h * dir[i];
            }
            return (prob.evaluate(xp, w).cost - prob.evaluate(xm, w).cost) /
                   (2.0 * h);
        };
        const double h = 0.04;
        const double d1 = directional(h);
        const double d2 = directional(h / 2.0);
        const double d4 = directional(h / 4.0);
        const double denom = d2 - d4;
        if (std::abs(denom) < 1e-13 * std::max(1.0, std::abs(d2))) {
            ++excluded;  // flat curvature along this direction
            continue;
        }
        const double ratio = (d1 - d2) / denom;
        CHECK(ratio == doctest::Approx(4.0).epsilon(0.10));
        ++tested;
    }
    CHECK(tested + excluded == 5);
    CHECK(tested >= 3);
}
