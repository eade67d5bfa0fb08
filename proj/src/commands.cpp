#include "lactose/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lactose/csv.hpp"
#include "lactose/errors.hpp"

namespace fs = std::filesystem;

namespace lactose {

namespace {

const std::vector<std::string> kTrajectoryHeader = {
    "t",     "mu0",   "mu1",   "mu2",   "mu3",   "mu4",
    "mu5",   "m_H2O", "c_alpha", "c_beta", "m_cry", "T",
    "T_jacket", "T_sp", "q_H2O", "V",     "A",     "B",
    "G",     "c_sat", "d43",   "CV"};

std::string resolve_out_dir(const ExperimentConfig& cfg) {
    fs::path dir = cfg.output_dir;
    if (dir.is_relative()) {
        if (const char* root = std::getenv("CRYSTALLIZER_OUT_ROOT"))
            dir = fs::path(root) / dir;
    }
    return dir.string();
}

std::string prepare_run_dir(const ExperimentConfig& cfg) {
    const std::string dir = resolve_out_dir(cfg);
    fs::create_directories(dir);
    const std::string resolved = cfg.dump();
    std::ofstream out(fs::path(dir) / "resolved_config.ini");
    out << resolved;
    return dir;
}

void write_summary_line(std::ostream& o, const std::string& key,
                        double value) {
    o << key << " = " << format_double(value) << "\n";
}

void write_run_summary(const std::string& path, const ExperimentConfig& cfg,
                       const Model& model, const Trajectory& traj) {
    std::ofstream o(path);
    const ProcessState& fin = traj.final_state();
    const QualityMetrics q = quality_metrics(fin);
    const Celsius T{fin.temperature};
    o << "# run summary\n";
    o << "config_hash = " << content_hash(cfg.dump()) << "\n";
    write_summary_line(o, "t_final", traj.times.back());
    write_summary_line(o, "d43", q.d43);
    write_summary_line(o, "CV", q.cv);
    write_summary_line(
        o, "B", nucleation_rate(fin.c_alpha, fin.c_beta, T, model.kinetics));
    write_summary_line(
        o, "G", growth_rate(fin.c_alpha, fin.c_beta, T, model.kinetics));
    write_summary_line(o, "m_cry", fin.crystal_mass);
    write_summary_line(o, "V", slurry_volume(fin, model.constants));
    write_summary_line(o, "T", fin.temperature);
    const ConservationResiduals cons = conservation_residuals(model, traj);
    write_summary_line(o, "max_lactose_residual", cons.max_abs_lactose);
    write_summary_line(o, "max_water_residual", cons.max_abs_water);
    if (traj.event) {
        o << "event = "
          << (traj.event->kind == IntegrationEvent::Kind::VolumeOverflow
                  ? "volume_overflow"
                  : "packed_bed")
          << " at t = " << format_double(traj.event->time) << "\n";
    }
}

/// Reconstruct a seed density for the given moments and sample it onto the
/// PBE grid as cell averages.
SizeDistribution reconstruct_seed(const ExperimentConfig& cfg,
                                  const std::vector<double>& moments,
                                  MaxEntSolution* solution_out = nullptr) {
    MaxEntProblem prob;
    prob.moments = moments;
    prob.support_max = cfg.maxent_support;
    prob.quadrature = cfg.maxent_quadrature;
    MaxEntSolution sol =
        reconstruct(prob, cfg.maxent_tol, cfg.maxent_max_iterations);
    const SizeGrid grid = SizeGrid::uniform(cfg.pbe_length_max, cfg.pbe_cells);
    SizeDistribution seed = SizeDistribution::from_function(
        grid, [&](double L) { return sol.density(L); });
    if (solution_out) *solution_out = std::move(sol);
    return seed;
}

void write_distribution_csv(const std::string& path,
                            const SizeDistribution& d) {
    CsvWriter w(path, {"L", "n"});
    for (std::size_t i = 0; i < d.grid.cells(); ++i)
        w.row({d.grid.center(i), d.values[i]});
}

struct MomentComparison {
    std::vector<double> times;
    std::vector<std::array<double, 6>> relative;  // |pbe-ode|/|ode|
    std::array<double, 6> max_relative{};
};

MomentComparison compare_moments(const Trajectory& ode, const PbeResult& pbe) {
    MomentComparison cmp;
    std::size_t j = 0;
    for (std::size_t i = 0; i < ode.times.size(); ++i) {
        while (j < pbe.times.size() && pbe.times[j] < ode.times[i] - 1e-6) ++j;
        if (j >= pbe.times.size()) break;
        if (std::abs(pbe.times[j] - ode.times[i]) > 1e-6) continue;
        cmp.times.push_back(ode.times[i]);
        std::array<double, 6> rel{};
        for (int nu = 0; nu < 6; ++nu) {
            const double ref = ode.states[i].moments[nu];
            rel[nu] = std::abs(pbe.moments[j][nu] - ref) / std::abs(ref);
            cmp.max_relative[nu] = std::max(cmp.max_relative[nu], rel[nu]);
        }
        cmp.relative.push_back(rel);
    }
    return cmp;
}

void write_validation(const std::string& dir, const ExperimentConfig& cfg,
                      const MomentComparison& cmp, bool& pass) {
    CsvWriter w((fs::path(dir) / "validation.csv").string(),
                {"t", "rel_mu0", "rel_mu1", "rel_mu2", "rel_mu3", "rel_mu4",
                 "rel_mu5"});
    for (std::size_t i = 0; i < cmp.times.size(); ++i) {
        std::vector<double> row{cmp.times[i]};
        for (int nu = 0; nu < 6; ++nu) row.push_back(cmp.relative[i][nu]);
        w.row(row);
    }
    std::ofstream rep(fs::path(dir) / "validation.txt");
    pass = true;
    for (int nu = 0; nu < 6; ++nu) {
        const double tol =
            nu <= 3 ? cfg.validate_tol_low : cfg.validate_tol_high;
        const bool ok = cmp.max_relative[nu] <= tol;
        pass = pass && ok;
        rep << "mu" << nu << ": max relative discrepancy = "
            << format_double(cmp.max_relative[nu]) << " (tol "
            << format_double(tol) << ") " << (ok ? "[PASS]" : "[FAIL]")
            << "\n";
    }
}

ControlProfile heuristic_constant(const ExperimentConfig& cfg, double tf) {
    return constant_policy(cfg.policy_set_point,
                           cfg.policy_feed_rate_raw * cfg.feed_unit_factor(),
                           tf, cfg.control_bounds());
}

ControlProfile heuristic_linear(const ExperimentConfig& cfg, double tf) {
    return linear_cooling_policy(
        cfg.policy_set_point, cfg.policy_final_set_point,
        cfg.policy_feed_rate_raw * cfg.feed_unit_factor(), tf,
        cfg.control_bounds());
}

}  // namespace

ExperimentConfig load_config(const CommandOptions& opts) {
    ExperimentConfig cfg = opts.config_path.empty()
                               ? ExperimentConfig::defaults()
                               : ExperimentConfig::from_file(opts.config_path);
    for (const auto& ov : opts.overrides) cfg.apply_override(ov);
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (!opts.scenario.empty()) cfg.apply_override("ocp.scenario=" + opts.scenario);
    if (!opts.policy.empty()) cfg.apply_override("policy.kind=" + opts.policy);
    if (opts.seed_opt) cfg.scenario = ScenarioKind::Seed;
    return cfg;
}

void write_trajectory_csv(const std::string& path, const Model& model,
                          const Trajectory& traj) {
    const DerivedSeries der = compute_derived(model, traj);
    CsvWriter w(path, kTrajectoryHeader);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        w.row({traj.times[i], s.moments[0], s.moments[1], s.moments[2],
               s.moments[3], s.moments[4], s.moments[5], s.water_mass,
               s.c_alpha, s.c_beta, s.crystal_mass, s.temperature,
               s.jacket_temperature, traj.controls[i].set_point,
               traj.controls[i].feed_rate, der.volume[i], der.area[i],
               der.nucleation[i], der.growth[i], der.c_sat[i], der.d43[i],
               der.cv[i]});
    }
}

int cmd_simulate(const CommandOptions& opts) {
    ExperimentConfig cfg;
    std::string dir;
    try {
        cfg = load_config(opts);
        dir = prepare_run_dir(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const Model model = cfg.make_model();
        const ProcessState s0 = cfg.make_initial_state();
        const ControlProfile profile = cfg.make_policy_profile();
        const Trajectory traj =
            integrate(model, s0, profile, cfg.horizon, cfg.integrator);
        write_trajectory_csv((fs::path(dir) / "trajectory.csv").string(),
                             model, traj);
        profile.save_csv((fs::path(dir) / "profile.csv").string());
        write_run_summary((fs::path(dir) / "summary.txt").string(), cfg, model,
                          traj);
        std::cout << "simulate: wrote " << dir << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ModelError& e) {
        std::cerr << "simulation failed: " << e.what() << "\n";
        return kExitSimulation;
    }
}

int cmd_optimize(const CommandOptions& opts) {
    ExperimentConfig cfg;
    std::string dir;
    try {
        cfg = load_config(opts);
        dir = prepare_run_dir(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const Model model = cfg.make_model();
        const ProcessState s0 = cfg.make_initial_state();
        const OcpSpec spec = cfg.make_ocp_spec();

        const double tf = spec.free_final_time ? spec.t_max : spec.horizon;
        std::vector<ControlProfile> starts = {heuristic_constant(cfg, tf),
                                              heuristic_linear(cfg, tf)};
        std::optional<std::vector<double>> warm;
        if (!opts.warm_start.empty())
            warm = OcpSolution::load_decision(opts.warm_start);

        OcpSolution sol;
        if (cfg.scenario == ScenarioKind::Seed)
            sol = solve_scenario4(model, spec, s0, starts);
        else if (cfg.scenario == ScenarioKind::MomentMatch)
            sol = solve_scenario5(model, spec, s0, starts, warm);
        else
            sol = solve_ocp(model, spec, s0, starts, warm);

        sol.save((fs::path(dir) / "solution.txt").string());
        sol.profile.save_csv((fs::path(dir) / "optimal_profile.csv").string());
        {
            CsvWriter w((fs::path(dir) / "optimal_profile_dense.csv").string(),
                        {"t", "T_sp", "q_H2O"});
            const double dt = cfg.integrator.output_interval;
            for (double t = 0.0; t <= sol.tf + 1e-9; t += dt) {
                const ControlInput u = sol.profile.sample(std::min(t, sol.tf));
                w.row({t, u.set_point, u.feed_rate});
            }
        }

        // re-simulate the optimum at reference tolerances
        const Trajectory traj = integrate(model, sol.initial_state,
                                          sol.profile, sol.tf, cfg.integrator);
        write_trajectory_csv((fs::path(dir) / "trajectory.csv").string(),
                             model, traj);
        write_run_summary((fs::path(dir) / "summary.txt").string(), cfg, model,
                          traj);

        // dominance report against the heuristics under identical settings
        {
            std::ofstream o(fs::path(dir) / "summary.txt", std::ios::app);
            o << "objective = " << format_double(sol.objective) << "\n";
            o << "penalized_cost = " << format_double(sol.penalized_cost)
              << "\n";
            o << "max_scaled_violation = "
              << format_double(sol.max_scaled_violation) << "\n";
            o << "converged = " << (sol.converged ? 1 : 0) << "\n";
            o << "evaluations = " << sol.evaluations << "\n";
            ShootingProblem check(model, spec, s0);
            const PenaltyWeights w =
                PenaltyWeights::uniform(check.constraint_count(), 0.0);
            for (const char* name : {"constant", "linear"}) {
                const ControlProfile& h =
                    std::string(name) == "constant" ? starts[0] : starts[1];
                const EvalResult r = check.evaluate(check.encode(h), w);
                o << "heuristic_" << name
                  << "_objective = " << format_double(r.objective) << "\n";
                o << "dominates_" << name << " = "
                  << (sol.objective <= r.objective ? 1 : 0) << "\n";
            }
        }

        if (cfg.scenario == ScenarioKind::Seed) {
            // reconstruct the optimal seed and run the full-model check
            MaxEntSolution me;
            const SizeDistribution seed =
                reconstruct_seed(cfg, sol.initial_state.moments, &me);
            write_distribution_csv(
                (fs::path(dir) / "seed_reconstruction.csv").string(), seed);
            PbeOptions popts = cfg.pbe;
            popts.output_interval = cfg.integrator.output_interval;
            const PbeResult pbe = simulate_pbe(model, seed, sol.initial_state,
                                               sol.profile, sol.tf, popts);
            write_distribution_csv(
                (fs::path(dir) / "final_distribution.csv").string(),
                pbe.final_distribution);
            const MomentComparison cmp = compare_moments(traj, pbe);
            bool pass = false;
            write_validation(dir, cfg, cmp, pass);
        }

        std::cout << "optimize: wrote " << dir
                  << " (objective = " << format_double(sol.objective) << ")\n";
        return sol.converged ? kExitOk : kExitOptimizer;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InfeasibleStart& e) {
        std::cerr << "optimizer: " << e.what() << "\n";
        return kExitOptimizer;
    } catch (const ModelError& e) {
        std::cerr << "simulation failed: " << e.what() << "\n";
        return kExitSimulation;
    }
}

int cmd_reconstruct(const CommandOptions& opts) {
    ExperimentConfig cfg;
    std::string dir;
    try {
        cfg = load_config(opts);
        dir = prepare_run_dir(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const std::vector<double> targets = cfg.maxent_targets.empty()
                                                ? cfg.initial_state.moments
                                                : cfg.maxent_targets;
        MaxEntSolution sol;
        const SizeDistribution seed = reconstruct_seed(cfg, targets, &sol);
        write_distribution_csv(
            (fs::path(dir) / "seed_reconstruction.csv").string(), seed);
        std::ofstream o(fs::path(dir) / "reconstruction.txt");
        o << "converged = " << (sol.converged ? 1 : 0) << "\n";
        o << "iterations = " << sol.iterations << "\n";
        o << "support_max = " << format_double(sol.support_max) << "\n";
        o << "dual_value = " << format_double(sol.dual_value) << "\n";
        for (std::size_t nu = 0; nu < sol.residuals.size(); ++nu)
            o << "residual_mu" << nu << " = "
              << format_double(sol.residuals[nu]) << "\n";
        std::cout << "reconstruct: wrote " << dir << "\n";
        return kExitOk;
    } catch (const ModelError& e) {
        std::cerr << "reconstruction failed: " << e.what() << "\n";
        return kExitSimulation;
    }
}

int cmd_validate(const CommandOptions& opts) {
    ExperimentConfig cfg;
    std::string dir;
    try {
        cfg = load_config(opts);
        dir = prepare_run_dir(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const Model model = cfg.make_model();
        const ProcessState s0 = cfg.make_initial_state();
        const ControlProfile profile = cfg.make_policy_profile();

        IntegratorOptions iopts = cfg.integrator;
        iopts.output_interval = cfg.pbe.output_interval;
        const Trajectory ode =
            integrate(model, s0, profile, cfg.horizon, iopts);
        write_trajectory_csv((fs::path(dir) / "trajectory.csv").string(),
                             model, ode);

        const SizeDistribution seed = reconstruct_seed(cfg, s0.moments);
        const PbeResult pbe =
            simulate_pbe(model, seed, s0, profile, cfg.horizon, cfg.pbe);
        {
            CsvWriter w((fs::path(dir) / "pbe_trajectory.csv").string(),
                        {"t", "mu0", "mu1", "mu2", "mu3", "mu4", "mu5",
                         "m_H2O", "c_alpha", "c_beta", "m_cry", "T",
                         "T_jacket"});
            for (std::size_t i = 0; i < pbe.times.size(); ++i) {
                const auto& s = pbe.states[i];
                w.row({pbe.times[i], s.moments[0], s.moments[1], s.moments[2],
                       s.moments[3], s.moments[4], s.moments[5], s.water_mass,
                       s.c_alpha, s.c_beta, s.crystal_mass, s.temperature,
                       s.jacket_temperature});
            }
        }
        write_distribution_csv(
            (fs::path(dir) / "final_distribution.csv").string(),
            pbe.final_distribution);
        for (const auto& [t, snap] : pbe.snapshots) {
            std::ostringstream name;
            name << "distribution_t" << static_cast<long>(t) << ".csv";
            write_distribution_csv((fs::path(dir) / name.str()).string(),
                                   snap);
        }

        const MomentComparison cmp = compare_moments(ode, pbe);
        bool pass = false;
        write_validation(dir, cfg, cmp, pass);
        std::cout << "validate: wrote " << dir << " ("
                  << (pass ? "PASS" : "FAIL") << ")\n";
        return pass ? kExitOk : kExitValidation;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ModelError& e) {
        std::cerr << "validation failed: " << e.what() << "\n";
        return kExitSimulation;
    }
}

int cmd_compare(const std::vector<std::string>& run_dirs,
                const std::string& out_dir) {
    try {
        if (run_dirs.size() < 2)
            throw ConfigError("compare: need at least two run directories");
        std::vector<CsvTable> tables;
        std::vector<std::string> names;
        for (const auto& d : run_dirs) {
            const fs::path p = fs::path(d) / "trajectory.csv";
            if (!fs::exists(p))
                throw ConfigError("compare: missing " + p.string());
            tables.push_back(CsvTable::load(p.string()));
            names.push_back(fs::path(d).filename().string());
        }
        const auto& t0 = tables[0].column("t");
        for (std::size_t r = 1; r < tables.size(); ++r) {
            const auto& tr = tables[r].column("t");
            if (tr.size() != t0.size() ||
                std::abs(tr.back() - t0.back()) > 1e-6)
                throw ConfigError("compare: runs have mismatched horizons");
            for (const char* col : {"mu0", "m_H2O", "c_alpha", "T"}) {
                const double a = tables[r].column(col)[0];
                const double b = tables[0].column(col)[0];
                if (std::abs(a - b) >
                    1e-9 * std::max({std::abs(a), std::abs(b), 1.0}))
                    throw ConfigError(
                        "compare: runs start from different initial states");
            }
        }
        fs::create_directories(out_dir);
        for (const char* quantity :
             {"T", "B", "G", "m_cry", "CV", "V", "d43", "c_sat"}) {
            std::vector<std::string> header = {"t"};
            header.insert(header.end(), names.begin(), names.end());
            CsvWriter w(
                (fs::path(out_dir) / (std::string("compare_") + quantity +
                                      ".csv")).string(),
                header);
            for (std::size_t i = 0; i < t0.size(); ++i) {
                std::vector<double> row = {t0[i]};
                for (auto& tab : tables)
                    row.push_back(tab.column(quantity)[i]);
                w.row(row);
            }
        }
        std::ofstream table(fs::path(out_dir) / "comparison.txt");
        table << "run d43 CV B m_cry V\n";
        for (std::size_t r = 0; r < tables.size(); ++r) {
            const std::size_t last = t0.size() - 1;
            table << names[r];
            for (const char* col : {"d43", "CV", "B", "m_cry", "V"})
                table << ' ' << format_double(tables[r].column(col)[last]);
            table << "\n";
        }
        std::cout << "compare: wrote " << out_dir << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "compare error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace lactose
