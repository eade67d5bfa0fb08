#pragma once

#include <span>
#include <vector>

#include "lactose/constants.hpp"

namespace lactose {

/// Controls applied to the crystallizer at an instant.
struct ControlInput {
    double set_point = 0.0;  ///< jacket set-point temperature, degC
    double feed_rate = 0.0;  ///< water feed, kg/s
};

/// Box bounds on the controls.
struct ControlBounds {
    double set_point_min = 0.0;
    double set_point_max = 40.0;
    double feed_min = 0.0;
    double feed_max = 0.1 / 3600.0;  ///< kg/s

    ControlInput clip(ControlInput u) const;
    bool contains(const ControlInput& u, double tol = 1e-12) const;
};

/// Full state of the moment-reduced model: moments of orders 0..N of the
/// crystal size distribution plus the liquid/thermal scalars. Moment nu has
/// units m^nu / m^3 slurry.
struct ProcessState {
    std::vector<double> moments = std::vector<double>(6, 0.0);
    double water_mass = 0.0;          ///< kg
    double c_alpha = 0.0;             ///< kg per kg water
    double c_beta = 0.0;              ///< kg per kg water
    double crystal_mass = 0.0;        ///< kg
    double temperature = 0.0;         ///< degC
    double jacket_temperature = 0.0;  ///< degC

    std::size_t moment_count() const { return moments.size(); }
    std::size_t dimension() const { return moments.size() + 6; }

    void to_flat(std::span<double> y) const;
    static ProcessState from_flat(std::span<const double> y,
                                  std::size_t n_moments);
    std::vector<double> flat() const;

    /// Throws StateInvariantViolated naming the offending component.
    /// Checks moment non-negativity, packing k_v*mu3 < 1, positive water
    /// mass, and the Cauchy-Schwarz moment inequalities (with slack).
    void validate(const PhysicalConstants& c) const;
};

/// Per-second rates, same layout as ProcessState.
using StateDerivative = ProcessState;

/// Reference (startup) state used as the default and in tests.
ProcessState reference_initial_state();

}  // namespace lactose
