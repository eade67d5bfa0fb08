#pragma once

#include <string>
#include <vector>

#include "lactose/integrate.hpp"
#include "lactose/maxent.hpp"
#include "lactose/model.hpp"
#include "lactose/ocp.hpp"
#include "lactose/pbe.hpp"
#include "lactose/profile.hpp"

namespace lactose {

enum class PolicyKind { Constant, Linear, File };
enum class ScenarioKind { D43, Nucleation, Cv, Seed, MomentMatch };

/// Everything a run needs, resolved from the sectioned key-value config
/// file. Unknown keys are rejected with line diagnostics. Feed rates are
/// quoted in `feed_rate_unit` (kg_per_hour by default); the heat-transfer
/// coefficient in kJ/(m^2 h K) and the crystallization heat in kJ/kg, all
/// converted to SI on load.
struct ExperimentConfig {
    PhysicalConstants constants;  ///< SI (conversions applied on set)
    KineticParams kinetics;       ///< activation_energy must be provided
    ProcessState initial_state;
    bool initial_crystal_mass_auto = true;  ///< derive from k_v V0 rho mu3
    bool swap_initial_concentrations = false;

    PolicyKind policy = PolicyKind::Constant;
    double policy_set_point = 15.0;
    double policy_feed_rate_raw = 0.0056;  ///< in feed_rate_unit
    double policy_final_set_point = 0.0;
    double horizon = 11000.0;
    std::string profile_file;
    std::string feed_rate_unit = "kg_per_hour";

    IntegratorOptions integrator;
    OcpSpec ocp;
    double ocp_feed_max_raw = 0.1;  ///< in feed_rate_unit
    ScenarioKind scenario = ScenarioKind::D43;
    double target_median = 5e-5;
    double target_sigma_log = 0.3;

    MaxEntQuadrature maxent_quadrature;
    double maxent_tol = 1e-9;
    int maxent_max_iterations = 200;
    double maxent_support = 0.0;         ///< m, 0 = adaptive
    std::vector<double> maxent_targets;  ///< reconstruct command input

    int pbe_cells = 2000;
    double pbe_length_max = 2e-3;
    PbeOptions pbe;
    double validate_tol_low = 0.01;   ///< mu0..mu3
    double validate_tol_high = 0.03;  ///< mu4..mu5

    std::string output_dir = "out";

    static ExperimentConfig defaults();
    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_text(const std::string& text,
                                      const std::string& origin = "<config>");
    /// Apply a "section.key=value" override (CLI flags beat file values).
    void apply_override(const std::string& assignment);

    /// Canonical resolved text: every key, 17 significant digits.
    std::string dump() const;

    double feed_unit_factor() const;  ///< config unit -> kg/s
    Model make_model() const;
    ProcessState make_initial_state() const;
    ControlProfile make_policy_profile() const;
    ControlBounds control_bounds() const;
    /// OcpSpec with bounds, horizon, scenario objective and simulation
    /// options resolved.
    OcpSpec make_ocp_spec() const;
};

/// FNV-1a 64-bit content hash used for run provenance.
std::string content_hash(const std::string& text);

}  // namespace lactose
