#pragma once

#include <span>

#include "lactose/constants.hpp"
#include "lactose/kinetics.hpp"
#include "lactose/state.hpp"

namespace lactose {

/// Total slurry volume, m^3. Faults when the crystal packing fraction
/// k_v*mu3 reaches 1 (model breakdown).
double slurry_volume(const ProcessState& s, const PhysicalConstants& c);

/// Jacket contact surface for a vertical cylindrical vessel: A = 4 V / D.
double contact_surface(double volume, const PhysicalConstants& c);

/// Moment rates: dmu0 = B - r*mu0, dmu_nu = nu*G*mu_{nu-1} - r*mu_nu,
/// with r = V'/V the dilution rate.
void moment_rhs(std::span<const double> moments, double growth,
                double nucleation, double dilution_rate,
                std::span<double> d_moments);

/// Water mass rate: hydrate water uptake (negative) plus feed.
double water_rhs(double crystal_mass_rate, double feed_rate,
                 const PhysicalConstants& c);

/// Crystal mass rate, kg/s (non-negative under the growth clamp).
double crystal_mass_rhs(const ProcessState& s, double growth, double volume,
                        const PhysicalConstants& c);

/// Dissolved alpha-lactose concentration rate, 1/s.
double c_alpha_rhs(const ProcessState& s, double crystal_mass_rate,
                   double feed_rate, const MutarotationRates& k,
                   const PhysicalConstants& c);

/// Dissolved beta-lactose concentration rate, 1/s.
double c_beta_rhs(const ProcessState& s, double crystal_mass_rate,
                  double feed_rate, const MutarotationRates& k,
                  const PhysicalConstants& c);

/// Inputs the energy balance needs from the already-evaluated mass balances.
struct EnergyRhsInputs {
    double crystal_mass_rate = 0.0;
    double water_mass_rate = 0.0;
    double c_alpha_rate = 0.0;
    double c_beta_rate = 0.0;
    double contact_area = 0.0;
    double feed_rate = 0.0;
    double set_point = 0.0;
    double feed_c_alpha = 0.0;  ///< lactose content of the feed enthalpy term
    double feed_c_beta = 0.0;
};

struct EnergyRates {
    double temperature_rate = 0.0;
    double jacket_rate = 0.0;
};

EnergyRates energy_rhs(const ProcessState& s, const EnergyRhsInputs& in,
                       const PhysicalConstants& c);

/// One evaluated snapshot of the rate laws and dependent quantities, shared
/// between the moment model, the PBE validator, and the CSV writers.
struct RateSnapshot {
    double k1 = 0.0, k2 = 0.0;
    double c_sat = 0.0;
    double growth = 0.0;
    double nucleation = 0.0;
    double volume = 0.0;
    double area = 0.0;
    double volume_rate = 0.0;
    double dilution_rate = 0.0;
    double crystal_mass_rate = 0.0;
};

/// The assembled process model: constants + kinetics + the concentrations
/// entering the feed enthalpy term (fixed at their initial values).
class Model {
  public:
    PhysicalConstants constants;
    KineticParams kinetics;
    /// Concentrations used in the feed enthalpy term of the energy balance.
    double enthalpy_c_alpha = 0.359;
    double enthalpy_c_beta = 0.521;

    Model() = default;
    Model(PhysicalConstants pc, KineticParams kp, const ProcessState& initial);

    /// Full 12-state derivative. Deterministic and side-effect free;
    /// optionally reports the intermediate rate snapshot.
    StateDerivative rhs(const ProcessState& s, const ControlInput& u,
                        RateSnapshot* snap = nullptr) const;

    /// Flat-buffer variant used by the integrator hot path.
    void rhs_flat(std::span<const double> y, const ControlInput& u,
                  std::span<double> dy, std::size_t n_moments) const;
};

/// Mass-weighted mean size d43 = mu4/mu3 and spread CV = mu3*mu5/mu4^2 - 1.
struct QualityMetrics {
    double d43 = 0.0;  ///< m
    double cv = 0.0;   ///< dimensionless
};

QualityMetrics quality_metrics(const ProcessState& s);

}  // namespace lactose
