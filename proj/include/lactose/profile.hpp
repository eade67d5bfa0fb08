#pragma once

#include <string>
#include <vector>

#include "lactose/state.hpp"

namespace lactose {

enum class Interpolation { PiecewiseConstant, PiecewiseLinear };

/// Piecewise control trajectory on [0, tf]. Knot values live at the
/// breakpoints; piecewise-constant profiles are left-continuous at
/// breakpoints (the value on (b_i, b_{i+1}] is the knot at b_i).
class ControlProfile {
  public:
    ControlProfile() = default;
    ControlProfile(std::vector<double> breakpoints,
                   std::vector<ControlInput> knots, Interpolation interp,
                   const ControlBounds& bounds);

    ControlInput sample(double t) const;
    /// Sample restricted to breakpoint interval i (stage evaluations inside
    /// an integration step never straddle a breakpoint).
    ControlInput sample_on(std::size_t interval, double t) const;

    /// Exact integral of the feed rate over [0, t].
    double feed_integral(double t) const;

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<ControlInput>& knots() const { return knots_; }
    Interpolation interpolation() const { return interp_; }
    double duration() const { return breakpoints_.back(); }
    std::size_t intervals() const { return breakpoints_.size() - 1; }
    int clipped_knots() const { return clipped_; }

    /// Same knot geometry, different horizon (used when tf is a decision
    /// variable): breakpoints are rescaled proportionally.
    ControlProfile rescaled(double new_duration) const;

    void save_csv(const std::string& path) const;
    static ControlProfile load_csv(const std::string& path,
                                   Interpolation interp,
                                   const ControlBounds& bounds);

  private:
    std::vector<double> breakpoints_;
    std::vector<ControlInput> knots_;
    Interpolation interp_ = Interpolation::PiecewiseLinear;
    int clipped_ = 0;
};

ControlProfile constant_policy(double set_point, double feed_rate, double tf,
                               const ControlBounds& bounds);

/// Set point ramps linearly from T_start down to T_end, feed constant.
ControlProfile linear_cooling_policy(double set_point_start,
                                     double set_point_end, double feed_rate,
                                     double tf, const ControlBounds& bounds);

/// Profile whose knots come from an optimizer decision vector laid out as
/// [set_points..., feed_rates...] with n_knots values each. Values outside
/// the box are clipped (count reported on the profile); NaN is an error.
ControlProfile parameterized_policy(std::span<const double> knot_values,
                                    std::size_t n_knots, Interpolation interp,
                                    double tf, const ControlBounds& bounds);

}  // namespace lactose
