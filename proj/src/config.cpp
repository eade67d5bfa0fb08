#include "lactose/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lactose/csv.hpp"
#include "lactose/errors.hpp"

namespace lactose {

namespace {

double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos])))
            ++pos;
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, const std::string& where) {
    const double d = parse_double(v, where);
    if (d != std::floor(d))
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    return static_cast<int>(d);
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(where + ": expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v,
                               const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = cell.find_last_not_of(" \t");
        out.push_back(parse_double(cell.substr(b, e - b + 1), where));
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

using Setter = std::function<void(ExperimentConfig&, const std::string&,
                                  const std::string&)>;

// one entry per recognized "section.key"
const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        auto dbl = [&m](const std::string& key, auto member) {
            m[key] = [member](ExperimentConfig& c, const std::string& v,
                              const std::string& w) {
                member(c) = parse_double(v, w);
            };
        };
        auto integer = [&m](const std::string& key, auto member) {
            m[key] = [member](ExperimentConfig& c, const std::string& v,
                              const std::string& w) {
                member(c) = parse_int(v, w);
            };
        };
        auto boolean = [&m](const std::string& key, auto member) {
            m[key] = [member](ExperimentConfig& c, const std::string& v,
                              const std::string& w) {
                member(c) = parse_bool(v, w);
            };
        };

        // [constants]
        dbl("constants.molar_mass_ratio",
            [](auto& c) -> double& { return c.constants.molar_mass_ratio; });
        dbl("constants.shape_factor",
            [](auto& c) -> double& { return c.constants.shape_factor; });
        dbl("constants.crystal_density",
            [](auto& c) -> double& { return c.constants.crystal_density; });
        dbl("constants.alpha_density",
            [](auto& c) -> double& { return c.constants.alpha_density; });
        dbl("constants.beta_density",
            [](auto& c) -> double& { return c.constants.beta_density; });
        dbl("constants.water_density",
            [](auto& c) -> double& { return c.constants.water_density; });
        m["constants.crystallization_heat"] = [](ExperimentConfig& c,
                                                 const std::string& v,
                                                 const std::string& w) {
            c.constants.crystallization_heat = parse_double(v, w) * 1000.0;
        };
        m["constants.heat_transfer_coeff"] = [](ExperimentConfig& c,
                                                const std::string& v,
                                                const std::string& w) {
            c.constants.heat_transfer_coeff =
                parse_double(v, w) * 1000.0 / 3600.0;
        };
        dbl("constants.reference_temperature", [](auto& c) -> double& {
            return c.constants.reference_temperature;
        });
        dbl("constants.cp_water",
            [](auto& c) -> double& { return c.constants.cp_water; });
        dbl("constants.cp_crystal",
            [](auto& c) -> double& { return c.constants.cp_crystal; });
        dbl("constants.cp_alpha",
            [](auto& c) -> double& { return c.constants.cp_alpha; });
        dbl("constants.cp_beta",
            [](auto& c) -> double& { return c.constants.cp_beta; });
        dbl("constants.feed_c_alpha",
            [](auto& c) -> double& { return c.constants.feed_c_alpha; });
        dbl("constants.feed_c_beta",
            [](auto& c) -> double& { return c.constants.feed_c_beta; });
        dbl("constants.feed_temperature",
            [](auto& c) -> double& { return c.constants.feed_temperature; });
        dbl("constants.initial_volume",
            [](auto& c) -> double& { return c.constants.initial_volume; });
        dbl("constants.max_volume",
            [](auto& c) -> double& { return c.constants.max_volume; });
        dbl("constants.jacket_rate",
            [](auto& c) -> double& { return c.constants.jacket_rate; });
        dbl("constants.vessel_diameter",
            [](auto& c) -> double& { return c.constants.vessel_diameter; });
        boolean("constants.p2_crystal_term_uses_cp_water", [](auto& c) -> bool& {
            return c.constants.p2_crystal_term_uses_cp_water;
        });

        // [kinetics]
        dbl("kinetics.mutarotation_prefactor", [](auto& c) -> double& {
            return c.kinetics.mutarotation_prefactor;
        });
        dbl("kinetics.activation_energy",
            [](auto& c) -> double& { return c.kinetics.activation_energy; });
        dbl("kinetics.gas_constant",
            [](auto& c) -> double& { return c.kinetics.gas_constant; });
        dbl("kinetics.nucleation_exponent", [](auto& c) -> double& {
            return c.kinetics.nucleation_exponent;
        });
        dbl("kinetics.birth_rate_coeff",
            [](auto& c) -> double& { return c.kinetics.birth_rate_coeff; });
        dbl("kinetics.growth_rate_coeff",
            [](auto& c) -> double& { return c.kinetics.growth_rate_coeff; });
        boolean("kinetics.allow_negative_growth", [](auto& c) -> bool& {
            return c.kinetics.allow_negative_growth;
        });

        // [initial]
        for (int nu = 0; nu < 6; ++nu) {
            m["initial.mu" + std::to_string(nu)] =
                [nu](ExperimentConfig& c, const std::string& v,
                     const std::string& w) {
                    c.initial_state.moments[nu] = parse_double(v, w);
                };
        }
        dbl("initial.water_mass",
            [](auto& c) -> double& { return c.initial_state.water_mass; });
        dbl("initial.c_alpha",
            [](auto& c) -> double& { return c.initial_state.c_alpha; });
        dbl("initial.c_beta",
            [](auto& c) -> double& { return c.initial_state.c_beta; });
        m["initial.crystal_mass"] = [](ExperimentConfig& c,
                                       const std::string& v,
                                       const std::string& w) {
            c.initial_state.crystal_mass = parse_double(v, w);
            c.initial_crystal_mass_auto = false;
        };
        dbl("initial.temperature",
            [](auto& c) -> double& { return c.initial_state.temperature; });
        dbl("initial.jacket_temperature", [](auto& c) -> double& {
            return c.initial_state.jacket_temperature;
        });
        boolean("initial.swap_concentrations", [](auto& c) -> bool& {
            return c.swap_initial_concentrations;
        });

        // [policy]
        m["policy.kind"] = [](ExperimentConfig& c, const std::string& v,
                              const std::string& w) {
            if (v == "constant") c.policy = PolicyKind::Constant;
            else if (v == "linear") c.policy = PolicyKind::Linear;
            else if (v == "file") c.policy = PolicyKind::File;
            else throw ConfigError(w + ": unknown policy '" + v + "'");
        };
        dbl("policy.set_point",
            [](auto& c) -> double& { return c.policy_set_point; });
        dbl("policy.feed_rate",
            [](auto& c) -> double& { return c.policy_feed_rate_raw; });
        dbl("policy.final_set_point",
            [](auto& c) -> double& { return c.policy_final_set_point; });
        dbl("policy.horizon", [](auto& c) -> double& { return c.horizon; });
        m["policy.profile_file"] = [](ExperimentConfig& c,
                                      const std::string& v,
                                      const std::string&) {
            c.profile_file = v;
        };
        m["policy.feed_rate_unit"] = [](ExperimentConfig& c,
                                        const std::string& v,
                                        const std::string& w) {
            if (v != "kg_per_hour" && v != "kg_per_second")
                throw ConfigError(w + ": feed_rate_unit must be kg_per_hour "
                                      "or kg_per_second");
            c.feed_rate_unit = v;
        };

        // [integrator]
        m["integrator.method"] = [](ExperimentConfig& c, const std::string& v,
                                    const std::string& w) {
            if (v == "rk45") c.integrator.method = IntegratorMethod::Rk45Adaptive;
            else if (v == "rk4") c.integrator.method = IntegratorMethod::Rk4Fixed;
            else throw ConfigError(w + ": unknown method '" + v + "'");
        };
        dbl("integrator.rel_tol",
            [](auto& c) -> double& { return c.integrator.rel_tol; });
        dbl("integrator.abs_tol",
            [](auto& c) -> double& { return c.integrator.abs_tol; });
        dbl("integrator.max_step",
            [](auto& c) -> double& { return c.integrator.max_step; });
        dbl("integrator.min_step",
            [](auto& c) -> double& { return c.integrator.min_step; });
        dbl("integrator.fixed_dt",
            [](auto& c) -> double& { return c.integrator.fixed_dt; });
        dbl("integrator.output_interval",
            [](auto& c) -> double& { return c.integrator.output_interval; });

        // [ocp]
        m["ocp.scenario"] = [](ExperimentConfig& c, const std::string& v,
                               const std::string& w) {
            if (v == "d43") c.scenario = ScenarioKind::D43;
            else if (v == "nucleation") c.scenario = ScenarioKind::Nucleation;
            else if (v == "cv") c.scenario = ScenarioKind::Cv;
            else if (v == "seed") c.scenario = ScenarioKind::Seed;
            else if (v == "moment-match") c.scenario = ScenarioKind::MomentMatch;
            else throw ConfigError(w + ": unknown scenario '" + v + "'");
        };
        integer("ocp.knots", [](auto& c) -> int& { return c.ocp.knots; });
        m["ocp.interpolation"] = [](ExperimentConfig& c, const std::string& v,
                                    const std::string& w) {
            if (v == "linear")
                c.ocp.interpolation = Interpolation::PiecewiseLinear;
            else if (v == "constant")
                c.ocp.interpolation = Interpolation::PiecewiseConstant;
            else throw ConfigError(w + ": unknown interpolation '" + v + "'");
        };
        dbl("ocp.set_point_min", [](auto& c) -> double& {
            return c.ocp.control_bounds.set_point_min;
        });
        dbl("ocp.set_point_max", [](auto& c) -> double& {
            return c.ocp.control_bounds.set_point_max;
        });
        dbl("ocp.feed_max",
            [](auto& c) -> double& { return c.ocp_feed_max_raw; });
        dbl("ocp.temp_min",
            [](auto& c) -> double& { return c.ocp.path_bounds.temp_min; });
        dbl("ocp.temp_max",
            [](auto& c) -> double& { return c.ocp.path_bounds.temp_max; });
        boolean("ocp.require_supersaturation", [](auto& c) -> bool& {
            return c.ocp.path_bounds.require_supersaturation;
        });
        m["ocp.engine"] = [](ExperimentConfig& c, const std::string& v,
                             const std::string& w) {
            if (v == "gradient")
                c.ocp.optimizer.engine =
                    OptimizerOptions::Engine::GradientDescent;
            else if (v == "nelder-mead")
                c.ocp.optimizer.engine = OptimizerOptions::Engine::NelderMead;
            else throw ConfigError(w + ": unknown engine '" + v + "'");
        };
        integer("ocp.max_outer",
                [](auto& c) -> int& { return c.ocp.optimizer.max_outer; });
        integer("ocp.max_inner",
                [](auto& c) -> int& { return c.ocp.optimizer.max_inner; });
        dbl("ocp.penalty_initial", [](auto& c) -> double& {
            return c.ocp.optimizer.penalty_initial;
        });
        dbl("ocp.penalty_growth", [](auto& c) -> double& {
            return c.ocp.optimizer.penalty_growth;
        });
        dbl("ocp.feasibility_tol", [](auto& c) -> double& {
            return c.ocp.optimizer.feasibility_tol;
        });
        dbl("ocp.fd_step",
            [](auto& c) -> double& { return c.ocp.optimizer.fd_step; });
        dbl("ocp.initial_step",
            [](auto& c) -> double& { return c.ocp.optimizer.initial_step; });
        integer("ocp.threads",
                [](auto& c) -> int& { return c.ocp.optimizer.threads; });
        dbl("ocp.t_max", [](auto& c) -> double& { return c.ocp.t_max; });
        dbl("ocp.t_min_fraction",
            [](auto& c) -> double& { return c.ocp.t_min_fraction; });
        dbl("ocp.seed_log_range",
            [](auto& c) -> double& { return c.ocp.seed_log_range; });
        boolean("ocp.integral_nucleation", [](auto& c) -> bool& {
            return c.ocp.objective.integral_nucleation;
        });
        dbl("ocp.target_median",
            [](auto& c) -> double& { return c.target_median; });
        dbl("ocp.target_sigma_log",
            [](auto& c) -> double& { return c.target_sigma_log; });
        dbl("ocp.inner_rel_tol",
            [](auto& c) -> double& { return c.ocp.sim_options.rel_tol; });
        dbl("ocp.inner_abs_tol",
            [](auto& c) -> double& { return c.ocp.sim_options.abs_tol; });
        dbl("ocp.inner_output_interval", [](auto& c) -> double& {
            return c.ocp.sim_options.output_interval;
        });

        // [maxent]
        dbl("maxent.tolerance", [](auto& c) -> double& { return c.maxent_tol; });
        integer("maxent.max_iterations",
                [](auto& c) -> int& { return c.maxent_max_iterations; });
        integer("maxent.panels",
                [](auto& c) -> int& { return c.maxent_quadrature.panels; });
        integer("maxent.panel_nodes", [](auto& c) -> int& {
            return c.maxent_quadrature.panel_nodes;
        });
        dbl("maxent.support_max",
            [](auto& c) -> double& { return c.maxent_support; });
        m["maxent.targets"] = [](ExperimentConfig& c, const std::string& v,
                                 const std::string& w) {
            c.maxent_targets = parse_list(v, w);
        };

        // [pbe]
        integer("pbe.cells", [](auto& c) -> int& { return c.pbe_cells; });
        dbl("pbe.length_max",
            [](auto& c) -> double& { return c.pbe_length_max; });
        m["pbe.scheme"] = [](ExperimentConfig& c, const std::string& v,
                             const std::string& w) {
            if (v == "minmod") c.pbe.scheme = PbeScheme::Minmod2;
            else if (v == "upwind") c.pbe.scheme = PbeScheme::Upwind1;
            else throw ConfigError(w + ": unknown scheme '" + v + "'");
        };
        dbl("pbe.cfl", [](auto& c) -> double& { return c.pbe.cfl; });
        dbl("pbe.max_dt", [](auto& c) -> double& { return c.pbe.max_dt; });
        dbl("pbe.fixed_dt", [](auto& c) -> double& { return c.pbe.fixed_dt; });
        dbl("pbe.output_interval",
            [](auto& c) -> double& { return c.pbe.output_interval; });
        m["pbe.snapshot_times"] = [](ExperimentConfig& c, const std::string& v,
                                     const std::string& w) {
            c.pbe.snapshot_times = parse_list(v, w);
        };
        dbl("pbe.tol_low", [](auto& c) -> double& { return c.validate_tol_low; });
        dbl("pbe.tol_high",
            [](auto& c) -> double& { return c.validate_tol_high; });

        // [output]
        m["output.directory"] = [](ExperimentConfig& c, const std::string& v,
                                   const std::string&) { c.output_dir = v; };
        return m;
    }();
    return table;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.initial_state = reference_initial_state();
    c.ocp.sim_options.rel_tol = 1e-7;
    c.ocp.sim_options.output_interval = 50.0;
    return c;
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text,
                                             const std::string& origin) {
    ExperimentConfig c = defaults();
    std::stringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(where + ": key outside any [section]");
        const std::string full = section + "." + key;
        const auto it = setters().find(full);
        if (it == setters().end())
            throw ConfigError(where + ": unknown key '" + full + "'");
        it->second(c, value, where);
    }
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str(), path);
}

void ExperimentConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment +
                          "' must look like section.key=value");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end())
        throw ConfigError("override: unknown key '" + key + "'");
    it->second(*this, value, "<override " + key + ">");
}

double ExperimentConfig::feed_unit_factor() const {
    return feed_rate_unit == "kg_per_hour" ? 1.0 / 3600.0 : 1.0;
}

ControlBounds ExperimentConfig::control_bounds() const {
    ControlBounds b = ocp.control_bounds;
    b.feed_max = ocp_feed_max_raw * feed_unit_factor();
    return b;
}

ProcessState ExperimentConfig::make_initial_state() const {
    ProcessState s = initial_state;
    if (swap_initial_concentrations) std::swap(s.c_alpha, s.c_beta);
    if (initial_crystal_mass_auto)
        s.crystal_mass = constants.shape_factor * constants.initial_volume *
                         constants.crystal_density * s.moments[3];
    return s;
}

Model ExperimentConfig::make_model() const {
    if (!(kinetics.activation_energy > 0.0))
        throw ConfigError(
            "kinetics.activation_energy is required (no tabulated value "
            "exists; pick one and document it)");
    return Model(constants, kinetics, make_initial_state());
}

ControlProfile ExperimentConfig::make_policy_profile() const {
    const ControlBounds b = control_bounds();
    const double q = policy_feed_rate_raw * feed_unit_factor();
    switch (policy) {
        case PolicyKind::Constant:
            return constant_policy(policy_set_point, q, horizon, b);
        case PolicyKind::Linear:
            return linear_cooling_policy(policy_set_point,
                                         policy_final_set_point, q, horizon,
                                         b);
        case PolicyKind::File:
            if (profile_file.empty())
                throw ConfigError("policy.kind = file needs policy.profile_file");
            return ControlProfile::load_csv(profile_file,
                                            Interpolation::PiecewiseLinear, b);
    }
    throw ConfigError("unknown policy kind");
}

OcpSpec ExperimentConfig::make_ocp_spec() const {
    OcpSpec spec = ocp;
    spec.control_bounds = control_bounds();
    spec.path_bounds.volume_max = constants.max_volume;
    spec.horizon = horizon;
    spec.free_seed_moments = scenario == ScenarioKind::Seed;
    spec.free_final_time = scenario == ScenarioKind::MomentMatch;
    switch (scenario) {
        case ScenarioKind::D43:
        case ScenarioKind::Seed:
            spec.objective.kind = ObjectiveKind::TerminalD43;
            break;
        case ScenarioKind::Nucleation:
            spec.objective.kind = ObjectiveKind::TerminalNucleation;
            break;
        case ScenarioKind::Cv:
            spec.objective.kind = ObjectiveKind::TerminalCv;
            break;
        case ScenarioKind::MomentMatch:
            spec.objective.kind = ObjectiveKind::MomentMatch;
            if (spec.objective.target_moments.empty())
                spec.objective.target_moments =
                    lognormal_target_moments(target_median, target_sigma_log);
            break;
    }
    return spec;
}

std::string ExperimentConfig::dump() const {
    std::ostringstream o;
    auto d = [&](const std::string& k, double v) {
        o << k << " = " << format_double(v) << "\n";
    };
    o << "# resolved configuration (all values in declared config units)\n";
    o << "[constants]\n";
    d("molar_mass_ratio", constants.molar_mass_ratio);
    d("shape_factor", constants.shape_factor);
    d("crystal_density", constants.crystal_density);
    d("alpha_density", constants.alpha_density);
    d("beta_density", constants.beta_density);
    d("water_density", constants.water_density);
    d("crystallization_heat", constants.crystallization_heat / 1000.0);
    d("heat_transfer_coeff", constants.heat_transfer_coeff * 3600.0 / 1000.0);
    d("reference_temperature", constants.reference_temperature);
    d("cp_water", constants.cp_water);
    d("cp_crystal", constants.cp_crystal);
    d("cp_alpha", constants.cp_alpha);
    d("cp_beta", constants.cp_beta);
    d("feed_c_alpha", constants.feed_c_alpha);
    d("feed_c_beta", constants.feed_c_beta);
    d("feed_temperature", constants.feed_temperature);
    d("initial_volume", constants.initial_volume);
    d("max_volume", constants.max_volume);
    d("jacket_rate", constants.jacket_rate);
    d("vessel_diameter", constants.vessel_diameter);
    o << "p2_crystal_term_uses_cp_water = "
      << bool_str(constants.p2_crystal_term_uses_cp_water) << "\n";
    o << "\n[kinetics]\n";
    d("mutarotation_prefactor", kinetics.mutarotation_prefactor);
    d("activation_energy", kinetics.activation_energy);
    d("gas_constant", kinetics.gas_constant);
    d("nucleation_exponent", kinetics.nucleation_exponent);
    d("birth_rate_coeff", kinetics.birth_rate_coeff);
    d("growth_rate_coeff", kinetics.growth_rate_coeff);
    o << "allow_negative_growth = " << bool_str(kinetics.allow_negative_growth)
      << "\n";
    o << "\n[initial]\n";
    for (int nu = 0; nu < 6; ++nu)
        d("mu" + std::to_string(nu), initial_state.moments[nu]);
    d("water_mass", initial_state.water_mass);
    d("c_alpha", initial_state.c_alpha);
    d("c_beta", initial_state.c_beta);
    if (!initial_crystal_mass_auto)
        d("crystal_mass", initial_state.crystal_mass);
    d("temperature", initial_state.temperature);
    d("jacket_temperature", initial_state.jacket_temperature);
    o << "swap_concentrations = " << bool_str(swap_initial_concentrations)
      << "\n";
    o << "\n[policy]\n";
    o << "kind = "
      << (policy == PolicyKind::Constant
              ? "constant"
              : policy == PolicyKind::Linear ? "linear" : "file")
      << "\n";
    d("set_point", policy_set_point);
    d("feed_rate", policy_feed_rate_raw);
    d("final_set_point", policy_final_set_point);
    d("horizon", horizon);
    if (!profile_file.empty()) o << "profile_file = " << profile_file << "\n";
    o << "feed_rate_unit = " << feed_rate_unit << "\n";
    o << "\n[integrator]\n";
    o << "method = "
      << (integrator.method == IntegratorMethod::Rk45Adaptive ? "rk45" : "rk4")
      << "\n";
    d("rel_tol", integrator.rel_tol);
    d("abs_tol", integrator.abs_tol);
    d("max_step", integrator.max_step);
    d("min_step", integrator.min_step);
    d("fixed_dt", integrator.fixed_dt);
    d("output_interval", integrator.output_interval);
    o << "\n[ocp]\n";
    o << "scenario = "
      << (scenario == ScenarioKind::D43
              ? "d43"
              : scenario == ScenarioKind::Nucleation
                    ? "nucleation"
                    : scenario == ScenarioKind::Cv
                          ? "cv"
                          : scenario == ScenarioKind::Seed ? "seed"
                                                           : "moment-match")
      << "\n";
    o << "knots = " << ocp.knots << "\n";
    o << "interpolation = "
      << (ocp.interpolation == Interpolation::PiecewiseLinear ? "linear"
                                                              : "constant")
      << "\n";
    d("set_point_min", ocp.control_bounds.set_point_min);
    d("set_point_max", ocp.control_bounds.set_point_max);
    d("feed_max", ocp_feed_max_raw);
    d("temp_min", ocp.path_bounds.temp_min);
    d("temp_max", ocp.path_bounds.temp_max);
    o << "require_supersaturation = "
      << bool_str(ocp.path_bounds.require_supersaturation) << "\n";
    o << "engine = "
      << (ocp.optimizer.engine == OptimizerOptions::Engine::GradientDescent
              ? "gradient"
              : "nelder-mead")
      << "\n";
    o << "max_outer = " << ocp.optimizer.max_outer << "\n";
    o << "max_inner = " << ocp.optimizer.max_inner << "\n";
    d("penalty_initial", ocp.optimizer.penalty_initial);
    d("penalty_growth", ocp.optimizer.penalty_growth);
    d("feasibility_tol", ocp.optimizer.feasibility_tol);
    d("fd_step", ocp.optimizer.fd_step);
    d("initial_step", ocp.optimizer.initial_step);
    o << "threads = " << ocp.optimizer.threads << "\n";
    d("t_max", ocp.t_max);
    d("t_min_fraction", ocp.t_min_fraction);
    d("seed_log_range", ocp.seed_log_range);
    o << "integral_nucleation = "
      << bool_str(ocp.objective.integral_nucleation) << "\n";
    d("target_median", target_median);
    d("target_sigma_log", target_sigma_log);
    d("inner_rel_tol", ocp.sim_options.rel_tol);
    d("inner_abs_tol", ocp.sim_options.abs_tol);
    d("inner_output_interval", ocp.sim_options.output_interval);
    o << "\n[maxent]\n";
    d("tolerance", maxent_tol);
    o << "max_iterations = " << maxent_max_iterations << "\n";
    o << "panels = " << maxent_quadrature.panels << "\n";
    o << "panel_nodes = " << maxent_quadrature.panel_nodes << "\n";
    d("support_max", maxent_support);
    if (!maxent_targets.empty()) {
        o << "targets =";
        for (std::size_t i = 0; i < maxent_targets.size(); ++i)
            o << (i ? ", " : " ") << format_double(maxent_targets[i]);
        o << "\n";
    }
    o << "\n[pbe]\n";
    o << "cells = " << pbe_cells << "\n";
    d("length_max", pbe_length_max);
    o << "scheme = "
      << (pbe.scheme == PbeScheme::Minmod2 ? "minmod" : "upwind") << "\n";
    d("cfl", pbe.cfl);
    d("max_dt", pbe.max_dt);
    d("fixed_dt", pbe.fixed_dt);
    d("output_interval", pbe.output_interval);
    if (!pbe.snapshot_times.empty()) {
        o << "snapshot_times =";
        for (std::size_t i = 0; i < pbe.snapshot_times.size(); ++i)
            o << (i ? ", " : " ") << format_double(pbe.snapshot_times[i]);
        o << "\n";
    }
    d("tol_low", validate_tol_low);
    d("tol_high", validate_tol_high);
    o << "\n[output]\n";
    o << "directory = " << output_dir << "\n";
    return o.str();
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace lactose
