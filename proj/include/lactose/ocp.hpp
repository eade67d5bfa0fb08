#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lactose/integrate.hpp"
#include "lactose/model.hpp"
#include "lactose/profile.hpp"

namespace lactose {

enum class ObjectiveKind {
    TerminalD43,
    TerminalNucleation,
    TerminalCv,
    MomentMatch,
};

/// Scalar figure of merit evaluated on a finished trajectory.
struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::TerminalD43;
    /// MomentMatch target moments nu_0..nu_N, normalized so nu_3 = 1.
    std::vector<double> target_moments;
    /// MomentMatch weights; empty selects w_i = (mu3(0) * nu_i)^-2 (with the
    /// largest nu substituted where nu_i = 0, keeping residuals dimensionless).
    std::vector<double> weights;
    /// Replace the terminal nucleation rate by its time integral (the
    /// terminal value is flat almost everywhere under the clamp).
    bool integral_nucleation = false;
};

double evaluate_objective(const Trajectory& traj, const Model& model,
                          const ObjectiveSpec& objective);

struct OptimizerOptions {
    enum class Engine { GradientDescent, NelderMead };
    Engine engine = Engine::GradientDescent;
    int max_outer = 8;       ///< penalty escalation rounds
    int max_inner = 40;      ///< descent iterations (x dim for Nelder-Mead)
    double penalty_initial = 100.0;
    double penalty_growth = 10.0;
    double feasibility_tol = 1e-6;  ///< on scaled violations
    double fd_step = 1e-4;          ///< central-difference step, scaled vars
    double initial_step = 0.1;      ///< first line-search step, scaled vars
    int threads = 1;                ///< concurrent objective evaluations
};

/// Full problem statement for the direct single-shooting solver.
struct OcpSpec {
    ObjectiveSpec objective;
    ControlBounds control_bounds;
    PathBounds path_bounds;
    int knots = 20;
    Interpolation interpolation = Interpolation::PiecewiseLinear;
    double horizon = 11000.0;  ///< s, fixed tf (ignored when tf is free)
    bool free_final_time = false;
    double t_max = 11000.0;
    double t_min_fraction = 0.1;  ///< tf >= t_min_fraction * t_max
    bool free_seed_moments = false;
    double seed_log_range = 1.0;  ///< decades around the reference seed
    OptimizerOptions optimizer;
    IntegratorOptions sim_options;

    void validate() const;
};

/// Per-constraint penalty weights; order matches EvalResult::violations.
struct PenaltyWeights {
    std::vector<double> rho;
    static PenaltyWeights uniform(std::size_t n, double value);
};

struct EvalResult {
    double cost = 0.0;       ///< objective + sum rho_j * violation_j^2
    double objective = 0.0;
    std::vector<double> violations;  ///< scaled, one per constraint
    bool simulated = false;  ///< false = barrier value (1e12) was returned
    double max_violation() const;
};

struct OcpSolution {
    std::vector<double> decision;  ///< scaled decision vector in [0,1]^dim
    ControlProfile profile;
    ProcessState initial_state;
    double tf = 0.0;
    double objective = 0.0;
    double penalized_cost = 0.0;
    double max_scaled_violation = 0.0;
    int outer_iterations = 0;
    long evaluations = 0;
    std::vector<double> penalty_history;
    bool converged = false;
    bool no_progress = false;
    bool realizability_ok = true;

    void save(const std::string& path) const;
    static std::vector<double> load_decision(const std::string& path);
};

/// Single-shooting transcription: decision vector <-> (profile, seed, tf),
/// plus the penalized merit function.
class ShootingProblem {
  public:
    ShootingProblem(const Model& model, const OcpSpec& spec,
                    const ProcessState& base_initial);

    std::size_t dimension() const;
    std::size_t constraint_count() const;

    std::vector<double> encode(const ControlProfile& profile) const;
    struct Decoded {
        ControlProfile profile;
        ProcessState initial_state;
        double tf;
    };
    Decoded decode(std::span<const double> x) const;

    EvalResult evaluate(std::span<const double> x,
                        const PenaltyWeights& weights) const;
    Trajectory simulate(std::span<const double> x) const;

    const Model& model() const { return model_; }
    const OcpSpec& spec() const { return spec_; }
    const ProcessState& base_initial() const { return base_; }
    mutable long evaluations = 0;

  private:
    Model model_;
    OcpSpec spec_;
    ProcessState base_;
};

/// Penalty-loop descent from the best of the provided starts. Guarantees a
/// penalized cost no worse than the best start (descent, not optimality).
OcpSolution solve_ocp(const Model& model, const OcpSpec& spec,
                      const ProcessState& initial_state,
                      const std::vector<ControlProfile>& starts,
                      const std::optional<std::vector<double>>& warm_decision =
                          std::nullopt);

/// Seed-moment co-optimization (spec.free_seed_moments forced on).
OcpSolution solve_scenario4(const Model& model, OcpSpec spec,
                            const ProcessState& initial_state,
                            const std::vector<ControlProfile>& starts);

/// Moment matching with free final time (spec.free_final_time forced on).
OcpSolution solve_scenario5(const Model& model, OcpSpec spec,
                            const ProcessState& initial_state,
                            const std::vector<ControlProfile>& starts,
                            const std::optional<std::vector<double>>&
                                warm_decision = std::nullopt);

/// Sequence of solves with increasing t_max, each warm-started from the
/// previous solution.
OcpSolution solve_with_tf_homotopy(const Model& model, OcpSpec spec,
                                   const ProcessState& initial_state,
                                   const std::vector<ControlProfile>& starts,
                                   const std::vector<double>& t_max_stages);

/// Normalized moments (nu_3 = 1) of a unit-mass log-normal density with the
/// given median and log-standard-deviation; the default matching target.
std::vector<double> lognormal_target_moments(double median, double sigma_log,
                                             int max_order = 5);

}  // namespace lactose
