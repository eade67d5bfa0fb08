#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lactose/config.hpp"
#include "lactose/csv.hpp"
#include "test_helpers.hpp"

using namespace lactose;

TEST_CASE("reference config loads with the expected conversions") {
    const ExperimentConfig cfg =
        ExperimentConfig::from_file(REFERENCE_CONFIG_PATH);
    CHECK(cfg.kinetics.activation_energy == 1.6e5);
    CHECK(cfg.kinetics.growth_rate_coeff == 1e-7);
    CHECK(cfg.constants.heat_transfer_coeff ==
          doctest::Approx(300.0 * 1000.0 / 3600.0).epsilon(1e-14));
    CHECK(cfg.constants.crystallization_heat ==
          doctest::Approx(-43100.0).epsilon(1e-14));
    CHECK(cfg.control_bounds().feed_max ==
          doctest::Approx(0.1 / 3600.0).epsilon(1e-14));
    const ControlProfile p = cfg.make_policy_profile();
    CHECK(p.sample(0.0).feed_rate ==
          doctest::Approx(0.0056 / 3600.0).epsilon(1e-14));
    CHECK_NOTHROW(cfg.make_model());
}

TEST_CASE("resolved dump is canonical (round trip is a fixed point)") {
    const ExperimentConfig cfg =
        ExperimentConfig::from_file(REFERENCE_CONFIG_PATH);
    const std::string once = cfg.dump();
    const std::string twice = ExperimentConfig::from_text(once).dump();
    CHECK(once == twice);
}

TEST_CASE("schema violations carry line diagnostics") {
    CHECK_THROWS_WITH_AS(
        ExperimentConfig::from_text("[constants]\nbogus_key = 1\n", "cfg"),
        doctest::Contains("cfg:2"), ConfigError);
    CHECK_THROWS_WITH_AS(
        ExperimentConfig::from_text("[constants]\ncp_water = soup\n", "cfg"),
        doctest::Contains("expected a number"), ConfigError);
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_text("cp_water = 1\n", "cfg"),
                         doctest::Contains("outside any [section]"),
                         ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_text("[policy]\nkind = banana\n", "cfg"),
        ConfigError);
}

TEST_CASE("the activation energy must be provided") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    CHECK_THROWS_WITH_AS(cfg.make_model(),
                         doctest::Contains("activation_energy"), ConfigError);
    cfg.apply_override("kinetics.activation_energy=1.6e5");
    cfg.apply_override("kinetics.growth_rate_coeff=1e-7");
    CHECK_NOTHROW(cfg.make_model());
}

TEST_CASE("overrides validate their keys") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    CHECK_THROWS_AS(cfg.apply_override("nope.key=1"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("no_equals_sign"), ConfigError);
    cfg.apply_override("policy.set_point=20");
    CHECK(cfg.policy_set_point == 20.0);
}

TEST_CASE("initial-state options: swap flag and explicit crystal mass") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.swap_initial_concentrations = true;
    const ProcessState s = cfg.make_initial_state();
    CHECK(s.c_alpha == 0.521);
    CHECK(s.c_beta == 0.359);
    // crystal mass derived from the seed's third moment by default
    CHECK(s.crystal_mass == doctest::Approx(0.098531195238).epsilon(1e-12));
    ExperimentConfig cfg2 = ExperimentConfig::from_text(
        "[initial]\ncrystal_mass = 0.123\n", "cfg");
    CHECK(cfg2.make_initial_state().crystal_mass == 0.123);
}

TEST_CASE("feed unit declaration changes the conversion") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.apply_override("policy.feed_rate_unit=kg_per_second");
    CHECK(cfg.feed_unit_factor() == 1.0);
    cfg.apply_override("policy.feed_rate_unit=kg_per_hour");
    CHECK(cfg.feed_unit_factor() == doctest::Approx(1.0 / 3600.0));
}

TEST_CASE("scenario resolution picks the matching objective") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.apply_override("ocp.scenario=cv");
    CHECK(cfg.make_ocp_spec().objective.kind == ObjectiveKind::TerminalCv);
    cfg.apply_override("ocp.scenario=moment-match");
    const OcpSpec spec = cfg.make_ocp_spec();
    CHECK(spec.objective.kind == ObjectiveKind::MomentMatch);
    CHECK(spec.free_final_time);
    CHECK(spec.objective.target_moments[3] == doctest::Approx(1.0));
    cfg.apply_override("ocp.scenario=seed");
    CHECK(cfg.make_ocp_spec().free_seed_moments);
}

TEST_CASE("content hash is deterministic and text-sensitive") {
    CHECK(content_hash("abc") == content_hash("abc"));
    CHECK(content_hash("abc") != content_hash("abd"));
    CHECK(content_hash("abc") == "e71fa2190541574b");  // FNV-1a reference
}

TEST_CASE("csv round trip is lossless at 17 significant digits") {
    const std::string path = "csv_roundtrip_test.csv";
    const std::vector<double> values = {1.0 / 3.0, 1e-300, -2.5e17,
                                        0.1 + 0.2, 3.6094e-9, 0.0};
    {
        CsvWriter w(path, {"a", "b", "c", "d", "e", "f"});
        w.row(values);
    }
    const CsvTable t = CsvTable::load(path);
    REQUIRE(t.rows() == 1);
    for (std::size_t i = 0; i < values.size(); ++i)
        CHECK(t.columns[i][0] == values[i]);
    std::remove(path.c_str());
}

TEST_CASE("csv loader reports malformed rows") {
    const std::string path = "csv_bad_test.csv";
    {
        std::ofstream out(path);
        out << "a,b\n1.0\n";
    }
    CHECK_THROWS_WITH_AS(CsvTable::load(path), doctest::Contains("columns"),
                         ConfigError);
    std::remove(path.c_str());
}
