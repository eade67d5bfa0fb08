#include "lactose/maxent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "lactose/errors.hpp"

namespace lactose {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

struct Quadrature {
    std::vector<double> x, w;  // absolute nodes/weights on [0, upper]

    Quadrature(double upper, const MaxEntQuadrature& q) {
        std::vector<double> gx, gw;
        gauss_legendre(q.panel_nodes, gx, gw);
        const double h = upper / q.panels;
        x.reserve(q.panels * q.panel_nodes);
        w.reserve(q.panels * q.panel_nodes);
        for (int p = 0; p < q.panels; ++p) {
            const double a = p * h;
            for (int k = 0; k < q.panel_nodes; ++k) {
                x.push_back(a + 0.5 * h * (1.0 + gx[k]));
                w.push_back(0.5 * h * gw[k]);
            }
        }
    }
};

double density_at(std::span<const double> lambda, double x) {
    double poly = 0.0;
    for (std::size_t nu = lambda.size(); nu-- > 0;)
        poly = poly * x + lambda[nu];
    return std::exp(-1.0 - poly);
}

// Moments of exp(-1 - sum lambda x^nu) up to max_order, plus the plain mass
// integral in slot 0.
std::vector<double> quad_moments(std::span<const double> lambda,
                                 const Quadrature& q, int max_order) {
    std::vector<double> m(max_order + 1, 0.0);
    for (std::size_t i = 0; i < q.x.size(); ++i) {
        const double f = q.w[i] * density_at(lambda, q.x[i]);
        double p = 1.0;
        for (int nu = 0; nu <= max_order; ++nu) {
            m[nu] += f * p;
            p *= q.x[i];
        }
    }
    return m;
}

double dual_value(std::span<const double> lambda,
                  std::span<const double> targets, const Quadrature& q) {
    double mass = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i)
        mass += q.w[i] * density_at(lambda, q.x[i]);
    double d = mass;
    for (std::size_t nu = 0; nu < lambda.size(); ++nu)
        d += lambda[nu] * targets[nu];
    return d;
}

void check_realizable(std::span<const double> mu) {
    if (mu.empty() || !(mu[0] > 0.0))
        throw NotRealizable("maxent: mu0 must be positive");
    for (double m : mu)
        if (!(m >= 0.0) || !std::isfinite(m))
            throw NotRealizable("maxent: moments must be finite and >= 0");
    constexpr double slack = 1e-12;
    for (std::size_t k = 0; k + 2 < mu.size(); ++k)
        if (mu[k] * mu[k + 2] < mu[k + 1] * mu[k + 1] * (1.0 - slack))
            throw NotRealizable(
                "maxent: Cauchy-Schwarz violated at orders " +
                std::to_string(k) + ".." + std::to_string(k + 2));
}

struct NewtonOutcome {
    bool converged = false;
    bool convexity_ok = true;
    int iterations = 0;
    double dual = 0.0;
    std::vector<double> residual_history;
};

double max_residual(std::span<const double> lambda,
                    std::span<const double> targets, const Quadrature& q) {
    const std::vector<double> m =
        quad_moments(lambda, q, static_cast<int>(targets.size()) - 1);
    double r = 0.0;
    for (std::size_t nu = 0; nu < targets.size(); ++nu)
        r = std::max(r, std::abs(targets[nu] - m[nu]) /
                            std::max(targets[nu], 1.0));
    return r;
}

// Damped Newton on the scaled dual; lambda is updated in place. Near the
// conditioning floor (tiny Newton decrement) the line search on the dual is
// noise-bound, so full steps are accepted on residual decrease instead.
NewtonOutcome newton_solve(std::vector<double>& lambda,
                           std::span<const double> targets,
                           const Quadrature& q, double tol,
                           int max_iterations) {
    const int n = static_cast<int>(targets.size());
    NewtonOutcome out;
    Eigen::VectorXd grad(n), step(n);
    Eigen::MatrixXd hess(n, n);
    double d_curr = dual_value(lambda, targets, q);
    for (out.iterations = 0; out.iterations < max_iterations;
         ++out.iterations) {
        const std::vector<double> m = quad_moments(lambda, q, 2 * (n - 1));
        double max_res = 0.0;
        for (int nu = 0; nu < n; ++nu) {
            grad(nu) = targets[nu] - m[nu];
            max_res = std::max(max_res, std::abs(grad(nu)) /
                                            std::max(targets[nu], 1.0));
        }
        out.residual_history.push_back(max_res);
        if (max_res < tol) {
            out.converged = true;
            break;
        }
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) hess(j, k) = m[j + k];

        Eigen::LLT<Eigen::MatrixXd> llt(hess);
        if (llt.info() != Eigen::Success) {
            // ridge fallback for a barely indefinite Hessian
            hess.diagonal().array() += 1e-13 * hess.trace();
            llt.compute(hess);
            if (llt.info() != Eigen::Success) {
                out.convexity_ok = false;
                throw NotRealizable(
                    "maxent: dual Hessian singular (moments on the boundary "
                    "of the realizable set)");
            }
        }
        step = -llt.solve(grad);
        const double decrement_sq = -grad.dot(step);
        if (decrement_sq < 0.0) out.convexity_ok = false;

        std::vector<double> trial(lambda.size());
        auto take = [&](double s) {
            for (int nu = 0; nu < n; ++nu)
                trial[nu] = lambda[nu] + s * step(nu);
        };

        if (std::abs(decrement_sq) <= 1e-13 * (1.0 + std::abs(d_curr))) {
            take(1.0);
            if (max_residual(trial, targets, q) < max_res) {
                lambda = trial;
                d_curr = dual_value(lambda, targets, q);
                continue;
            }
            break;  // numerical floor reached
        }

        // Armijo backtracking on the dual
        double s = 1.0;
        const double slope = grad.dot(step);
        bool accepted = false;
        while (s > 1e-14) {
            take(s);
            const double d_trial = dual_value(trial, targets, q);
            if (std::isfinite(d_trial) &&
                d_trial <= d_curr + 1e-4 * s * slope) {
                lambda = trial;
                d_curr = d_trial;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break;  // stalled; report best effort
    }
    out.dual = d_curr;
    return out;
}

}  // namespace

std::vector<double> scale_moments(std::span<const double> moments,
                                  double length_scale) {
    if (!(length_scale > 0.0))
        throw ModelError("scale_moments: length scale must be > 0");
    std::vector<double> out(moments.size());
    double p = 1.0;
    for (std::size_t nu = 0; nu < moments.size(); ++nu) {
        out[nu] = moments[nu] / (moments[0] * p);
        p *= length_scale;
    }
    return out;
}

std::vector<double> unscale_lambda(std::span<const double> lambda_hat,
                                   double length_scale, double mass) {
    std::vector<double> out(lambda_hat.begin(), lambda_hat.end());
    double p = 1.0;
    for (std::size_t nu = 0; nu < out.size(); ++nu) {
        out[nu] /= p;
        p *= length_scale;
    }
    out[0] -= std::log(mass / length_scale);
    return out;
}

double MaxEntSolution::density(double length) const {
    return density_at(lambda, length);
}

double MaxEntSolution::max_relative_residual() const {
    double r = 0.0;
    for (std::size_t nu = 0; nu < residuals.size(); ++nu)
        r = std::max(r, std::abs(residuals[nu]) /
                            std::max(std::abs(achieved_moments[nu] -
                                              residuals[nu]),
                                     1e-300));
    return r;
}

MaxEntSolution reconstruct(const MaxEntProblem& problem, double tol,
                           int max_iterations) {
    check_realizable(problem.moments);
    const std::size_t n = problem.moments.size();

    double length_scale = problem.length_scale;
    if (length_scale <= 0.0) {
        if (n >= 2 && problem.moments[1] > 0.0)
            length_scale = problem.moments[1] / problem.moments[0];
        else if (problem.support_max > 0.0)
            length_scale = problem.support_max;
        else
            throw ModelError(
                "maxent: cannot infer a length scale (give support_max)");
    }
    const std::vector<double> targets =
        scale_moments(problem.moments, length_scale);

    const bool adaptive = problem.support_max <= 0.0;
    double upper = adaptive ? 8.0 : problem.support_max / length_scale;

    std::vector<double> lambda(n, 0.0);
    auto reset_lambda = [&](double up) {
        std::fill(lambda.begin(), lambda.end(), 0.0);
        lambda[0] = std::log(up / targets[0]) - 1.0;
    };
    reset_lambda(upper);

    MaxEntQuadrature quad = problem.quadrature;
    NewtonOutcome outcome;
    double tail = 0.0;
    int total_iterations = 0;

    // Best converged solve so far; truncated exponential families with a
    // negative leading coefficient stop converging once the support reaches
    // the rising branch, in which case the last stable support wins.
    struct Best {
        std::vector<double> lambda;
        NewtonOutcome outcome;
        double upper = 0.0, tail = 0.0;
        MaxEntQuadrature quad;
        bool valid = false;
    } best;

    for (int doubling = 0; doubling <= 6; ++doubling) {
        reset_lambda(upper);
        Quadrature q(upper, quad);
        outcome = newton_solve(lambda, targets, q, tol, max_iterations);
        total_iterations += outcome.iterations;

        // refine quadrature until the dual stabilises
        for (int refine = 0; refine < 4 && outcome.converged; ++refine) {
            MaxEntQuadrature finer = quad;
            finer.panels *= 2;
            Quadrature qf(upper, finer);
            const double d_fine = dual_value(lambda, targets, qf);
            if (std::abs(d_fine - outcome.dual) <=
                1e-12 * std::max(1.0, std::abs(outcome.dual)))
                break;
            quad = finer;
            Quadrature q2(upper, quad);
            const NewtonOutcome again =
                newton_solve(lambda, targets, q2, tol, max_iterations);
            total_iterations += again.iterations;
            outcome.converged = again.converged;
            outcome.convexity_ok =
                outcome.convexity_ok && again.convexity_ok;
            outcome.dual = again.dual;
            if (!again.residual_history.empty())
                outcome.residual_history = again.residual_history;
        }

        // mass sitting in the top 10% of the support
        Quadrature qt(upper, quad);
        double tail_mass = 0.0, mass = 0.0;
        for (std::size_t i = 0; i < qt.x.size(); ++i) {
            const double f = qt.w[i] * density_at(lambda, qt.x[i]);
            mass += f;
            if (qt.x[i] > 0.9 * upper) tail_mass += f;
        }
        tail = mass > 0.0 ? tail_mass / mass : 0.0;

        if (outcome.converged && (!best.valid || tail < best.tail)) {
            best = {lambda, outcome, upper, tail, quad, true};
        }
        if (!adaptive) break;
        if (outcome.converged && tail < 1e-10) break;
        if (!outcome.converged && best.valid) break;  // stability reached
        upper *= 2.0;
    }
    if (best.valid) {
        lambda = best.lambda;
        outcome = best.outcome;
        upper = best.upper;
        tail = best.tail;
        quad = best.quad;
    }

    MaxEntSolution sol;
    sol.length_scale = length_scale;
    sol.support_max = upper * length_scale;
    sol.converged = outcome.converged;
    sol.convexity_ok = outcome.convexity_ok;
    sol.iterations = total_iterations;
    sol.dual_value = outcome.dual;
    sol.residual_history = outcome.residual_history;
    sol.tail_mass_fraction = tail;
    sol.lambda = unscale_lambda(lambda, length_scale, problem.moments[0]);

    Quadrature q(upper, quad);
    const std::vector<double> m =
        quad_moments(lambda, q, static_cast<int>(n) - 1);
    sol.achieved_moments.resize(n);
    sol.residuals.resize(n);
    double p = 1.0;
    for (std::size_t nu = 0; nu < n; ++nu) {
        sol.achieved_moments[nu] = m[nu] * problem.moments[0] * p;
        sol.residuals[nu] = sol.achieved_moments[nu] - problem.moments[nu];
        p *= length_scale;
    }
    return sol;
}

double dual_hessian_condition(std::span<const double> moments,
                              double support_max, double length_scale,
                              const MaxEntQuadrature& quad) {
    const std::vector<double> targets = scale_moments(moments, length_scale);
    const double upper = support_max / length_scale;
    std::vector<double> lambda(moments.size(), 0.0);
    lambda[0] = std::log(upper / targets[0]) - 1.0;
    Quadrature q(upper, quad);
    const int n = static_cast<int>(moments.size());
    const std::vector<double> m = quad_moments(lambda, q, 2 * (n - 1));
    Eigen::MatrixXd hess(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) hess(j, k) = m[j + k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    const auto& ev = es.eigenvalues();
    const double lo = std::max(std::abs(ev(0)), 1e-300);
    return std::abs(ev(n - 1)) / lo;
}

}  // namespace lactose
