#pragma once

#include <optional>
#include <vector>

#include "lactose/model.hpp"
#include "lactose/profile.hpp"

namespace lactose {

enum class IntegratorMethod { Rk4Fixed, Rk45Adaptive };

struct IntegratorOptions {
    IntegratorMethod method = IntegratorMethod::Rk45Adaptive;
    double rel_tol = 1e-8;
    double abs_tol = 1e-8;   ///< multiplied by per-component scales from y0
    double max_step = 50.0;  ///< s
    double min_step = 1e-10; ///< s, below this StepSizeUnderflow is thrown
    double fixed_dt = 1.0;   ///< s, Rk4Fixed step
    double output_interval = 10.0;  ///< s between stored trajectory points
};

/// Flagged early-stop conditions (not errors: the truncated trajectory is
/// still returned, with the event attached).
struct IntegrationEvent {
    enum class Kind { VolumeOverflow, PackedBed };
    Kind kind;
    double time;
};

/// Dense simulation output. Derived quantities (V, A, B, G, d43, CV) are
/// always recomputed from the stored states, never cached.
struct Trajectory {
    std::vector<double> times;
    std::vector<ProcessState> states;
    std::vector<ControlInput> controls;
    ControlProfile profile;
    std::optional<IntegrationEvent> event;
    long rhs_evaluations = 0;

    bool reached(double tf, double tol = 1e-9) const {
        return !times.empty() && times.back() >= tf - tol;
    }
    const ProcessState& final_state() const { return states.back(); }
};

Trajectory integrate(const Model& model, const ProcessState& initial,
                     const ControlProfile& profile, double tf,
                     const IntegratorOptions& opts);

/// Per-time derived quantities for reporting and objective evaluation.
struct DerivedSeries {
    std::vector<double> volume, area, nucleation, growth, c_sat, d43, cv;
};

DerivedSeries compute_derived(const Model& model, const Trajectory& traj);

/// Path-constraint block of the control problems.
struct PathBounds {
    double volume_min = 0.0;
    double volume_max = 0.01;
    double temp_min = 0.0;
    double temp_max = 70.0;
    bool require_supersaturation = true;  ///< c_alpha >= c_sat along the path
};

struct ConstraintViolation {
    double magnitude = 0.0;  ///< max over the trajectory, 0 if satisfied
    double first_time = -1.0;
};

struct ViolationReport {
    ConstraintViolation volume_high, volume_low;
    ConstraintViolation temp_high, temp_low;
    ConstraintViolation undersaturation;
    double max_scaled(const PathBounds& b) const;
};

ViolationReport monitor_path_constraints(const Model& model,
                                         const Trajectory& traj,
                                         const PathBounds& bounds);

/// Conservation diagnostics per output time: total lactose (dissolved alpha
/// + beta + anhydrous share of crystal) minus fed lactose, and water minus
/// fed water corrected for hydrate uptake. Both vanish along exact solutions.
struct ConservationResiduals {
    std::vector<double> lactose;  ///< kg
    std::vector<double> water;    ///< kg
    double max_abs_lactose = 0.0;
    double max_abs_water = 0.0;
};

ConservationResiduals conservation_residuals(const Model& model,
                                             const Trajectory& traj);

}  // namespace lactose
