#include "lactose/kinetics.hpp"

#include <string>

namespace lactose {

namespace {
// Relative supersaturation below which the nucleation exponent is treated as
// -inf; avoids overflow of 1/ln^2(s) just above s = 1.
constexpr double kSupersatEps = 1e-12;
}  // namespace

void KineticParams::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(mutarotation_prefactor))
        throw ModelError("kinetics: mutarotation_prefactor must be > 0");
    if (!positive(activation_energy))
        throw ModelError(
            "kinetics: activation_energy is required and must be > 0 "
            "(no tabulated default exists)");
    if (!positive(gas_constant))
        throw ModelError("kinetics: gas_constant must be > 0");
    if (!positive(nucleation_exponent))
        throw ModelError("kinetics: nucleation_exponent must be > 0");
    if (!positive(birth_rate_coeff))
        throw ModelError("kinetics: birth_rate_coeff must be > 0");
    if (!positive(growth_rate_coeff))
        throw ModelError("kinetics: growth_rate_coeff must be > 0");
}

double mutarotation_ratio(Celsius T) { return 1.64 - 0.0027 * T.value; }

MutarotationRates mutarotation_rates(Celsius T, const KineticParams& p) {
    const double k2 = p.mutarotation_prefactor *
                      std::exp(-p.activation_energy /
                               (p.gas_constant * T.kelvin()));
    return {k2 * mutarotation_ratio(T), k2};
}

double equilibrium_saturation(Celsius T) {
    const double km = mutarotation_ratio(T);
    if (1.0 + km <= 0.0)
        throw ModelError("equilibrium_saturation: 1 + k_m(T) <= 0 at T = " +
                         std::to_string(T.value));
    return 10.9109 * std::exp(0.02804 * T.value) / (100.0 * (1.0 + km));
}

double alpha_saturation(double c_beta, Celsius T) {
    const double eq = equilibrium_saturation(T);
    const double f = 0.0187 * std::exp(0.0236 * T.value);
    return eq - f * (c_beta - mutarotation_ratio(T) * eq);
}

double nucleation_rate(double c_alpha, double c_beta, Celsius T,
                       const KineticParams& p) {
    const double c_sat = alpha_saturation(c_beta, T);
    if (c_sat <= 0.0)
        throw ModelError("nucleation_rate: saturation concentration <= 0");
    const double s = c_alpha / c_sat;
    if (s < 1.0 + kSupersatEps) return 0.0;
    const double log_s = std::log(s);
    const double tk = T.kelvin();
    return p.birth_rate_coeff *
           std::exp(-p.nucleation_exponent / (tk * tk * tk * log_s * log_s));
}

double growth_rate(double c_alpha, double c_beta, Celsius T,
                   const KineticParams& p) {
    const double drive = c_alpha - alpha_saturation(c_beta, T);
    if (!p.allow_negative_growth && drive < 0.0) return 0.0;
    return p.growth_rate_coeff * drive;
}

}  // namespace lactose
