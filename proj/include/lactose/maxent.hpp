#pragma once

#include <span>
#include <vector>

namespace lactose {

/// Quadrature description for the dual integrals: composite Gauss-Legendre
/// with `panels` panels of `panel_nodes` nodes each.
struct MaxEntQuadrature {
    int panels = 13;
    int panel_nodes = 16;  // ~200 nodes total by default
};

/// Moment problem for a non-negative seed density on [0, support_max].
struct MaxEntProblem {
    std::vector<double> moments;  ///< target raw moments mu*_0..mu*_N
    /// Upper support bound in meters; 0 requests the adaptive choice
    /// (doubled until the reconstructed tail mass is negligible).
    double support_max = 0.0;
    /// Nondimensionalisation length; 0 selects mu1/mu0 (the mean size).
    double length_scale = 0.0;
    MaxEntQuadrature quadrature;
};

/// Exponential-family solution n(L) = exp(-1 - sum_nu lambda_nu L^nu).
struct MaxEntSolution {
    std::vector<double> lambda;
    std::vector<double> achieved_moments;
    std::vector<double> residuals;  ///< achieved - target
    double dual_value = 0.0;
    int iterations = 0;
    bool converged = false;        ///< false = MaxIterExceeded, best effort
    bool convexity_ok = true;      ///< Newton decrement stayed non-negative
    double support_max = 0.0;
    double length_scale = 1.0;
    double tail_mass_fraction = 0.0;  ///< mass in the top 10% of the support
    std::vector<double> residual_history;  ///< max scaled residual per iterate

    double density(double length) const;
    double max_relative_residual() const;
};

/// Solve the dual problem by damped Newton. Throws NotRealizable when the
/// target moments violate the Cauchy-Schwarz conditions or the dual Hessian
/// is irreparably singular; iteration exhaustion returns the best iterate
/// with converged = false.
MaxEntSolution reconstruct(const MaxEntProblem& problem, double tol = 1e-9,
                           int max_iterations = 200);

/// Nondimensionalise moments: m_hat_nu = mu_nu / (mu_0 * length_scale^nu).
std::vector<double> scale_moments(std::span<const double> moments,
                                  double length_scale);

/// Map dual coefficients of the scaled problem back to physical units:
/// lambda_nu -> lambda_hat_nu / length_scale^nu, with a lambda_0 shift of
/// -log(mu_0 / length_scale) so the density magnitude is restored.
std::vector<double> unscale_lambda(std::span<const double> lambda_hat,
                                   double length_scale, double mass);

/// Condition number (eigenvalue ratio) of the dual Hessian at the flat
/// start; diagnostic for the effect of scaling.
double dual_hessian_condition(std::span<const double> moments,
                              double support_max, double length_scale,
                              const MaxEntQuadrature& quad);

}  // namespace lactose
