#include "lactose/model.hpp"

#include <cmath>
#include <string>

#include "lactose/errors.hpp"

namespace lactose {

void PhysicalConstants::validate() const {
    if (!(molar_mass_ratio > 1.0))
        throw ModelError("constants: molar_mass_ratio must exceed 1");
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(shape_factor) || !positive(crystal_density) ||
        !positive(alpha_density) || !positive(beta_density) ||
        !positive(water_density))
        throw ModelError("constants: densities and shape factor must be > 0");
    if (!positive(heat_transfer_coeff) || !positive(cp_water) ||
        !positive(cp_crystal) || !positive(cp_alpha) || !positive(cp_beta))
        throw ModelError("constants: heat capacities and U must be > 0");
    if (!(initial_volume < max_volume))
        throw ModelError("constants: initial_volume must be below max_volume");
    if (!positive(vessel_diameter) || !positive(jacket_rate))
        throw ModelError("constants: vessel_diameter and jacket_rate must be > 0");
}

double slurry_volume(const ProcessState& s, const PhysicalConstants& c) {
    const double packing = c.shape_factor * s.moments[3];
    if (packing >= 1.0)
        throw StateInvariantViolated(
            "mu3", "slurry_volume: packing fraction k_v*mu3 = " +
                       std::to_string(packing) + " >= 1");
    const double specific = s.c_alpha / c.alpha_density +
                            s.c_beta / c.beta_density + 1.0 / c.water_density;
    return s.water_mass / (1.0 - packing) * specific;
}

double contact_surface(double volume, const PhysicalConstants& c) {
    return 4.0 * volume / c.vessel_diameter;
}

void moment_rhs(std::span<const double> moments, double growth,
                double nucleation, double dilution_rate,
                std::span<double> d_moments) {
    d_moments[0] = nucleation - dilution_rate * moments[0];
    for (std::size_t nu = 1; nu < moments.size(); ++nu)
        d_moments[nu] = static_cast<double>(nu) * growth * moments[nu - 1] -
                        dilution_rate * moments[nu];
}

double water_rhs(double crystal_mass_rate, double feed_rate,
                 const PhysicalConstants& c) {
    return (1.0 / c.molar_mass_ratio - 1.0) * crystal_mass_rate + feed_rate;
}

double crystal_mass_rhs(const ProcessState& s, double growth, double volume,
                        const PhysicalConstants& c) {
    return 3.0 * c.shape_factor * c.crystal_density * growth * volume *
           s.moments[2];
}

double c_alpha_rhs(const ProcessState& s, double crystal_mass_rate,
                   double feed_rate, const MutarotationRates& k,
                   const PhysicalConstants& c) {
    if (!(s.water_mass > 0.0))
        throw StateInvariantViolated("water_mass",
                                     "c_alpha_rhs: water mass <= 0");
    const double inv_r = 1.0 / c.molar_mass_ratio;
    return (s.c_alpha * (1.0 - inv_r) - inv_r) * crystal_mass_rate /
               s.water_mass -
           k.alpha_to_beta * s.c_alpha + k.beta_to_alpha * s.c_beta +
           (c.feed_c_alpha - s.c_alpha) * feed_rate / s.water_mass;
}

double c_beta_rhs(const ProcessState& s, double crystal_mass_rate,
                  double feed_rate, const MutarotationRates& k,
                  const PhysicalConstants& c) {
    if (!(s.water_mass > 0.0))
        throw StateInvariantViolated("water_mass",
                                     "c_beta_rhs: water mass <= 0");
    const double inv_r = 1.0 / c.molar_mass_ratio;
    return s.c_beta * (1.0 - inv_r) * crystal_mass_rate / s.water_mass +
           k.alpha_to_beta * s.c_alpha - k.beta_to_alpha * s.c_beta +
           (c.feed_c_beta - s.c_beta) * feed_rate / s.water_mass;
}

EnergyRates energy_rhs(const ProcessState& s, const EnergyRhsInputs& in,
                       const PhysicalConstants& c) {
    const double m_alpha = s.c_alpha * s.water_mass;
    const double m_beta = s.c_beta * s.water_mass;
    const double heat_capacity = s.water_mass * c.cp_water +
                                 m_alpha * c.cp_alpha + m_beta * c.cp_beta +
                                 s.crystal_mass * c.cp_crystal;
    if (!(heat_capacity > 0.0))
        throw StateInvariantViolated("heat_capacity",
                                     "energy_rhs: total heat capacity <= 0");
    const double m_alpha_rate =
        in.c_alpha_rate * s.water_mass + s.c_alpha * in.water_mass_rate;
    const double m_beta_rate =
        in.c_beta_rate * s.water_mass + s.c_beta * in.water_mass_rate;
    const double cp_crystal_term =
        c.p2_crystal_term_uses_cp_water ? c.cp_water : c.cp_crystal;
    const double cp_flux = in.water_mass_rate * c.cp_water +
                           m_alpha_rate * c.cp_alpha + m_beta_rate * c.cp_beta +
                           in.crystal_mass_rate * cp_crystal_term;
    const double feed_enthalpy =
        in.feed_rate *
        (c.cp_water + c.cp_alpha * in.feed_c_alpha +
         c.cp_beta * in.feed_c_beta) *
        (c.feed_temperature - c.reference_temperature);
    EnergyRates out;
    out.temperature_rate =
        (-cp_flux * (s.temperature - c.reference_temperature) -
         c.crystallization_heat * in.crystal_mass_rate +
         c.heat_transfer_coeff * in.contact_area *
             (s.jacket_temperature - s.temperature) +
         feed_enthalpy) /
        heat_capacity;
    out.jacket_rate = -c.jacket_rate * (s.jacket_temperature - in.set_point);
    return out;
}

Model::Model(PhysicalConstants pc, KineticParams kp,
             const ProcessState& initial)
    : constants(pc),
      kinetics(kp),
      enthalpy_c_alpha(initial.c_alpha),
      enthalpy_c_beta(initial.c_beta) {
    constants.validate();
    kinetics.validate();
}

StateDerivative Model::rhs(const ProcessState& s, const ControlInput& u,
                           RateSnapshot* snap) const {
    const Celsius T{s.temperature};
    const MutarotationRates k = mutarotation_rates(T, kinetics);
    const double c_sat = alpha_saturation(s.c_beta, T);
    const double growth = growth_rate(s.c_alpha, s.c_beta, T, kinetics);
    const double nucleation = nucleation_rate(s.c_alpha, s.c_beta, T, kinetics);

    const double volume = slurry_volume(s, constants);
    const double area = contact_surface(volume, constants);

    const double dm_cry = crystal_mass_rhs(s, growth, volume, constants);
    const double dm_w = water_rhs(dm_cry, u.feed_rate, constants);
    const double dca = c_alpha_rhs(s, dm_cry, u.feed_rate, k, constants);
    const double dcb = c_beta_rhs(s, dm_cry, u.feed_rate, k, constants);

    // volume rate, expanded so the moment dilution term is not circular
    const double specific = s.c_alpha / constants.alpha_density +
                            s.c_beta / constants.beta_density +
                            1.0 / constants.water_density;
    const double dv = 3.0 * constants.shape_factor * growth * volume *
                          s.moments[2] +
                      dm_w * specific +
                      s.water_mass * (dca / constants.alpha_density +
                                      dcb / constants.beta_density);
    const double dilution = dv / volume;

    StateDerivative d;
    d.moments.resize(s.moments.size());
    moment_rhs(s.moments, growth, nucleation, dilution, d.moments);
    d.water_mass = dm_w;
    d.c_alpha = dca;
    d.c_beta = dcb;
    d.crystal_mass = dm_cry;

    EnergyRhsInputs ein;
    ein.crystal_mass_rate = dm_cry;
    ein.water_mass_rate = dm_w;
    ein.c_alpha_rate = dca;
    ein.c_beta_rate = dcb;
    ein.contact_area = area;
    ein.feed_rate = u.feed_rate;
    ein.set_point = u.set_point;
    ein.feed_c_alpha = enthalpy_c_alpha;
    ein.feed_c_beta = enthalpy_c_beta;
    const EnergyRates er = energy_rhs(s, ein, constants);
    d.temperature = er.temperature_rate;
    d.jacket_temperature = er.jacket_rate;

    if (snap) {
        snap->k1 = k.alpha_to_beta;
        snap->k2 = k.beta_to_alpha;
        snap->c_sat = c_sat;
        snap->growth = growth;
        snap->nucleation = nucleation;
        snap->volume = volume;
        snap->area = area;
        snap->volume_rate = dv;
        snap->dilution_rate = dilution;
        snap->crystal_mass_rate = dm_cry;
    }
    return d;
}

void Model::rhs_flat(std::span<const double> y, const ControlInput& u,
                     std::span<double> dy, std::size_t n_moments) const {
    const ProcessState s = ProcessState::from_flat(y, n_moments);
    rhs(s, u).to_flat(dy);
}

QualityMetrics quality_metrics(const ProcessState& s) {
    if (!(s.moments[3] > 0.0) || !(s.moments[4] > 0.0))
        throw ModelError("quality_metrics: mu3 and mu4 must be positive");
    QualityMetrics q;
    q.d43 = s.moments[4] / s.moments[3];
    q.cv = s.moments[3] * s.moments[5] / (s.moments[4] * s.moments[4]) - 1.0;
    return q;
}

}  // namespace lactose
