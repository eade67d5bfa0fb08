#pragma once

#include <cmath>

#include "lactose/errors.hpp"

namespace lactose {

/// Temperature in degrees Celsius. The model is formulated in °C throughout;
/// kelvin() is only used inside the Arrhenius and nucleation exponents.
struct Celsius {
    double value = 0.0;

    constexpr Celsius() = default;
    constexpr explicit Celsius(double c) : value(c) {}

    constexpr double kelvin() const { return value + 273.15; }
    bool valid() const { return value > -273.15 && std::isfinite(value); }
};

/// Rate-law parameters. All strictly positive. `activation_energy` has no
/// tabulated default and must be set explicitly before use.
struct KineticParams {
    double mutarotation_prefactor = 2.25e8;  ///< 1/s
    double activation_energy = 0.0;          ///< J/mol, mandatory (0 = unset)
    double gas_constant = 18.314;            ///< J/(K mol), as tabulated
    double nucleation_exponent = 5.83;       ///< dimensionless
    double birth_rate_coeff = 1.18e-7;       ///< #/(m^3 s)
    double growth_rate_coeff = 10e10;        ///< m/s per unit supersaturation
    /// Keep the raw (possibly negative) growth/birth laws below saturation
    /// instead of clamping to zero. Off by default.
    bool allow_negative_growth = false;

    void validate() const;
};

/// alpha<->beta interconversion rates at temperature T.
struct MutarotationRates {
    double alpha_to_beta = 0.0;  ///< k1, 1/s
    double beta_to_alpha = 0.0;  ///< k2, 1/s
};

/// Equilibrium ratio c_beta/c_alpha of the mutarotation reaction.
double mutarotation_ratio(Celsius T);

/// Arrhenius beta->alpha rate and the derived alpha->beta rate.
MutarotationRates mutarotation_rates(Celsius T, const KineticParams& p);

/// Saturation concentration of alpha-lactose at mutarotation equilibrium
/// (kg per kg water).
double equilibrium_saturation(Celsius T);

/// Saturation concentration of alpha-lactose at the actual beta content;
/// reduces to equilibrium_saturation when c_beta sits at the mutarotation
/// equilibrium value.
double alpha_saturation(double c_beta, Celsius T);

/// Primary nucleation rate, #/(m^3 s). Zero at or below saturation.
double nucleation_rate(double c_alpha, double c_beta, Celsius T,
                       const KineticParams& p);

/// Linear crystal growth speed, m/s. Clamped at zero below saturation
/// unless p.allow_negative_growth is set.
double growth_rate(double c_alpha, double c_beta, Celsius T,
                   const KineticParams& p);

}  // namespace lactose
