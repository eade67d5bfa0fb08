#pragma once

namespace lactose {

/// Process constants in strict SI (seconds, J, kg, m). Config values quoted
/// in mixed units (kJ/m^2/h/K heat transfer, kg/h feed rates) are converted
/// at load time by the config layer, never here.
struct PhysicalConstants {
    double molar_mass_ratio = 1.0525;     ///< solid/liquid molar mass ratio, > 1
    double shape_factor = 0.523598;       ///< volumic shape factor k_v
    double crystal_density = 1545.0;      ///< kg/m^3 (monohydrate)
    double alpha_density = 1545.0;        ///< kg/m^3 (dissolved alpha)
    double beta_density = 1590.0;         ///< kg/m^3 (dissolved beta)
    double water_density = 1000.0;        ///< kg/m^3
    double crystallization_heat = -43.1e3;  ///< J/kg, exothermic
    double heat_transfer_coeff = 300.0 * 1000.0 / 3600.0;  ///< J/(m^2 s K)
    double reference_temperature = 25.0;  ///< degC
    double cp_water = 4180.5;             ///< J/(kg K)
    double cp_crystal = 1251.0;           ///< J/(kg K)
    double cp_alpha = 1193.0;             ///< J/(kg K)
    double cp_beta = 1193.0;              ///< J/(kg K)
    double feed_c_alpha = 0.521;          ///< kg per kg water in feed
    double feed_c_beta = 0.359;           ///< kg per kg water in feed
    double feed_temperature = 25.0;       ///< degC
    double initial_volume = 0.0015;       ///< m^3
    double max_volume = 0.01;             ///< m^3
    double jacket_rate = 0.0019;          ///< 1/s, first-order jacket lag
    double vessel_diameter = 0.1;         ///< m, closes the A(V) relation
    /// The printed cp-flux expression multiplies the crystal-mass rate by
    /// the water heat capacity; switch to cp_crystal here if desired.
    bool p2_crystal_term_uses_cp_water = true;

    void validate() const;
};

}  // namespace lactose
