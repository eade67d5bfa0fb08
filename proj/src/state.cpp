#include "lactose/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lactose/errors.hpp"

namespace lactose {

ControlInput ControlBounds::clip(ControlInput u) const {
    u.set_point = std::clamp(u.set_point, set_point_min, set_point_max);
    u.feed_rate = std::clamp(u.feed_rate, feed_min, feed_max);
    return u;
}

bool ControlBounds::contains(const ControlInput& u, double tol) const {
    return u.set_point >= set_point_min - tol &&
           u.set_point <= set_point_max + tol &&
           u.feed_rate >= feed_min - tol && u.feed_rate <= feed_max + tol;
}

void ProcessState::to_flat(std::span<double> y) const {
    const std::size_t n = moments.size();
    for (std::size_t i = 0; i < n; ++i) y[i] = moments[i];
    y[n] = water_mass;
    y[n + 1] = c_alpha;
    y[n + 2] = c_beta;
    y[n + 3] = crystal_mass;
    y[n + 4] = temperature;
    y[n + 5] = jacket_temperature;
}

ProcessState ProcessState::from_flat(std::span<const double> y,
                                     std::size_t n_moments) {
    ProcessState s;
    s.moments.assign(y.begin(), y.begin() + n_moments);
    s.water_mass = y[n_moments];
    s.c_alpha = y[n_moments + 1];
    s.c_beta = y[n_moments + 2];
    s.crystal_mass = y[n_moments + 3];
    s.temperature = y[n_moments + 4];
    s.jacket_temperature = y[n_moments + 5];
    return s;
}

std::vector<double> ProcessState::flat() const {
    std::vector<double> y(dimension());
    to_flat(y);
    return y;
}

void ProcessState::validate(const PhysicalConstants& c) const {
    for (std::size_t i = 0; i < moments.size(); ++i) {
        if (!(moments[i] >= 0.0) || !std::isfinite(moments[i]))
            throw StateInvariantViolated(
                "mu" + std::to_string(i),
                "moment mu" + std::to_string(i) + " negative or non-finite: " +
                    std::to_string(moments[i]));
    }
    if (!(water_mass > 0.0))
        throw StateInvariantViolated("water_mass",
                                     "water mass must stay positive");
    if (c_alpha < 0.0 || c_beta < 0.0)
        throw StateInvariantViolated("concentration",
                                     "dissolved concentrations negative");
    if (crystal_mass < 0.0)
        throw StateInvariantViolated("crystal_mass", "crystal mass negative");
    if (!(temperature > -273.15) || !(jacket_temperature > -273.15))
        throw StateInvariantViolated("temperature",
                                     "temperature below absolute zero");
    if (moments.size() > 3 && c.shape_factor * moments[3] >= 1.0)
        throw StateInvariantViolated(
            "mu3", "crystal packing fraction k_v*mu3 reached 1");
    // Cauchy-Schwarz for moments of a non-negative density, with slack for
    // roundoff on near-degenerate (monodisperse) states.
    constexpr double slack = 1e-9;
    auto hankel = [&](std::size_t k) {
        return moments[k] * moments[k + 2] >=
               moments[k + 1] * moments[k + 1] * (1.0 - slack);
    };
    if (moments.size() >= 3 && !hankel(0))
        throw StateInvariantViolated("mu0..mu2",
                                     "moment inequality mu0*mu2 >= mu1^2 violated");
    if (moments.size() >= 6 && !hankel(3))
        throw StateInvariantViolated("mu3..mu5",
                                     "moment inequality mu3*mu5 >= mu4^2 violated");
}

ProcessState reference_initial_state() {
    ProcessState s;
    s.moments = {1.2405e10, 2.1767e6, 409.2491, 0.0812, 1.6812e-5, 3.6094e-9};
    s.water_mass = 0.92;
    s.c_alpha = 0.359;
    s.c_beta = 0.521;
    s.temperature = 70.0;
    s.jacket_temperature = 20.0;
    // seed mass consistent with the seed's third moment
    const PhysicalConstants c;
    s.crystal_mass =
        c.shape_factor * c.initial_volume * c.crystal_density * s.moments[3];
    return s;
}

}  // namespace lactose
