#include "lactose/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>

#include "lactose/csv.hpp"
#include "lactose/errors.hpp"

namespace lactose {

namespace {
constexpr double kBarrier = 1e12;
// seed decision slots cover moment orders {0,1,2,4,5}; mu3 stays pinned
constexpr int kFreeSeedOrders[5] = {0, 1, 2, 4, 5};
}  // namespace

double evaluate_objective(const Trajectory& traj, const Model& model,
                          const ObjectiveSpec& objective) {
    const ProcessState& final = traj.final_state();
    switch (objective.kind) {
        case ObjectiveKind::TerminalD43:
            return quality_metrics(final).d43;
        case ObjectiveKind::TerminalCv:
            return quality_metrics(final).cv;
        case ObjectiveKind::TerminalNucleation: {
            if (!objective.integral_nucleation)
                return nucleation_rate(final.c_alpha, final.c_beta,
                                       Celsius{final.temperature},
                                       model.kinetics);
            double integral = 0.0;
            double prev_b = 0.0, prev_t = 0.0;
            for (std::size_t i = 0; i < traj.times.size(); ++i) {
                const auto& s = traj.states[i];
                const double b = nucleation_rate(
                    s.c_alpha, s.c_beta, Celsius{s.temperature},
                    model.kinetics);
                if (i > 0)
                    integral += 0.5 * (b + prev_b) * (traj.times[i] - prev_t);
                prev_b = b;
                prev_t = traj.times[i];
            }
            return integral;
        }
        case ObjectiveKind::MomentMatch: {
            const auto& nu = objective.target_moments;
            if (nu.size() < 4 || std::abs(nu[3] - 1.0) > 1e-12)
                throw ModelError(
                    "moment-match objective: targets must have nu3 = 1");
            const double mu3_ref = traj.states.front().moments[3];
            const double nu_max =
                *std::max_element(nu.begin(), nu.end());
            double cost = 0.0;
            for (std::size_t i = 0;
                 i < nu.size() && i < final.moments.size(); ++i) {
                double w;
                if (i < objective.weights.size()) {
                    w = objective.weights[i];
                } else {
                    const double base = nu[i] != 0.0 ? nu[i] : nu_max;
                    w = 1.0 / ((mu3_ref * base) * (mu3_ref * base));
                }
                const double r = final.moments[i] - final.moments[3] * nu[i];
                cost += w * r * r;
            }
            return cost;
        }
    }
    throw ModelError("evaluate_objective: unknown objective kind");
}

void OcpSpec::validate() const {
    if (knots < 2) throw ModelError("ocp: need at least 2 control knots");
    if (free_final_time) {
        if (!(t_max > 0.0) || !(t_min_fraction > 0.0) || t_min_fraction >= 1.0)
            throw ModelError("ocp: free final time needs 0 < t_min_fraction < 1");
    } else if (!(horizon > 0.0)) {
        throw ModelError("ocp: horizon must be positive");
    }
    if (objective.kind == ObjectiveKind::MomentMatch) {
        if (objective.target_moments.size() < 4 ||
            std::abs(objective.target_moments[3] - 1.0) > 1e-12)
            throw ModelError("ocp: moment-match targets must satisfy nu3 = 1");
        bool any = false;
        for (double w : objective.weights) {
            if (w < 0.0) throw ModelError("ocp: weights must be >= 0");
            any = any || w > 0.0;
        }
        if (!objective.weights.empty() && !any)
            throw ModelError("ocp: weights must not all be zero");
    }
}

PenaltyWeights PenaltyWeights::uniform(std::size_t n, double value) {
    PenaltyWeights w;
    w.rho.assign(n, value);
    return w;
}

double EvalResult::max_violation() const {
    double m = 0.0;
    for (double v : violations) m = std::max(m, v);
    return m;
}

ShootingProblem::ShootingProblem(const Model& model, const OcpSpec& spec,
                                 const ProcessState& base_initial)
    : model_(model), spec_(spec), base_(base_initial) {
    spec_.validate();
    base_.validate(model_.constants);
}

std::size_t ShootingProblem::dimension() const {
    std::size_t d = 2 * static_cast<std::size_t>(spec_.knots);
    if (spec_.free_seed_moments) d += 5;
    if (spec_.free_final_time) d += 1;
    return d;
}

std::size_t ShootingProblem::constraint_count() const {
    // volume hi/lo, temperature hi/lo, supersaturation, 4 realizability
    return spec_.free_seed_moments ? 9 : 5;
}

std::vector<double> ShootingProblem::encode(
    const ControlProfile& profile) const {
    const auto& b = spec_.control_bounds;
    const std::size_t k = static_cast<std::size_t>(spec_.knots);
    std::vector<double> x(dimension(), 0.5);
    const double tf = spec_.free_final_time
                          ? std::min(profile.duration(), spec_.t_max)
                          : spec_.horizon;
    for (std::size_t i = 0; i < k; ++i) {
        const double t = tf * static_cast<double>(i) /
                         static_cast<double>(k - 1);
        const ControlInput u = profile.sample(t);
        x[i] = (u.set_point - b.set_point_min) /
               (b.set_point_max - b.set_point_min);
        x[k + i] = (u.feed_rate - b.feed_min) / (b.feed_max - b.feed_min);
    }
    if (spec_.free_final_time) {
        const double t_min = spec_.t_min_fraction * spec_.t_max;
        x.back() = (tf - t_min) / (spec_.t_max - t_min);
    }
    // free seed slots (if any) default to the base seed: ratio 1 -> x = 0.5
    for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
    return x;
}

ShootingProblem::Decoded ShootingProblem::decode(
    std::span<const double> x) const {
    if (x.size() != dimension())
        throw ModelError("ocp: decision vector has wrong dimension");
    for (double v : x)
        if (std::isnan(v)) throw ModelError("ocp: NaN in decision vector");
    const auto& b = spec_.control_bounds;
    const std::size_t k = static_cast<std::size_t>(spec_.knots);

    Decoded out{ControlProfile{}, base_, spec_.horizon};
    if (spec_.free_final_time) {
        const double t_min = spec_.t_min_fraction * spec_.t_max;
        const double xf = std::clamp(x.back(), 0.0, 1.0);
        out.tf = t_min + xf * (spec_.t_max - t_min);
    }
    std::vector<double> knot_values(2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        knot_values[i] = b.set_point_min +
                         std::clamp(x[i], 0.0, 1.0) *
                             (b.set_point_max - b.set_point_min);
        knot_values[k + i] =
            b.feed_min +
            std::clamp(x[k + i], 0.0, 1.0) * (b.feed_max - b.feed_min);
    }
    out.profile = parameterized_policy(knot_values, k, spec_.interpolation,
                                       out.tf, b);
    if (spec_.free_seed_moments) {
        for (int j = 0; j < 5; ++j) {
            const double xs = std::clamp(x[2 * k + j], 0.0, 1.0);
            const double decades = (2.0 * xs - 1.0) * spec_.seed_log_range;
            const int order = kFreeSeedOrders[j];
            out.initial_state.moments[order] =
                base_.moments[order] * std::pow(10.0, decades);
        }
    }
    return out;
}

Trajectory ShootingProblem::simulate(std::span<const double> x) const {
    const Decoded d = decode(x);
    return integrate(model_, d.initial_state, d.profile, d.tf,
                     spec_.sim_options);
}

EvalResult ShootingProblem::evaluate(std::span<const double> x,
                                     const PenaltyWeights& weights) const {
    ++evaluations;
    EvalResult res;
    res.violations.assign(constraint_count(), 0.0);
    Decoded dec{ControlProfile{}, base_, 0.0};
    Trajectory traj;
    try {
        dec = decode(x);
        traj = integrate(model_, dec.initial_state, dec.profile, dec.tf,
                         spec_.sim_options);
        if (traj.event || !traj.reached(dec.tf)) {
            res.cost = kBarrier;
            return res;
        }
    } catch (const ModelError&) {
        res.cost = kBarrier;
        return res;
    }
    res.simulated = true;
    res.objective = evaluate_objective(traj, model_, spec_.objective);

    const auto& pb = spec_.path_bounds;
    const ViolationReport rep =
        monitor_path_constraints(model_, traj, pb);
    const double t_span = std::max(pb.temp_max - pb.temp_min, 1.0);
    res.violations[0] = rep.volume_high.magnitude / pb.volume_max;
    res.violations[1] = rep.volume_low.magnitude / pb.volume_max;
    res.violations[2] = rep.temp_high.magnitude / t_span;
    res.violations[3] = rep.temp_low.magnitude / t_span;
    res.violations[4] = rep.undersaturation.magnitude / 0.3;
    if (spec_.free_seed_moments) {
        const auto& mu = dec.initial_state.moments;
        for (int kidx = 0; kidx < 4; ++kidx) {
            const double lhs = mu[kidx + 1] * mu[kidx + 1];
            const double rhs = mu[kidx] * mu[kidx + 2];
            const double ref =
                base_.moments[kidx + 1] * base_.moments[kidx + 1];
            res.violations[5 + kidx] = std::max(0.0, (lhs - rhs) / ref);
        }
    }
    res.cost = res.objective;
    for (std::size_t j = 0; j < res.violations.size(); ++j)
        res.cost += weights.rho[j] * res.violations[j] * res.violations[j];
    return res;
}

namespace {

using CostFn = std::function<double(std::span<const double>)>;

std::vector<double> fd_gradient(const CostFn& f, std::vector<double> x,
                                double h, int threads) {
    const std::size_t n = x.size();
    std::vector<double> g(n);
    auto component = [&](std::size_t i) {
        std::vector<double> xp = x, xm = x;
        xp[i] = std::min(1.0, x[i] + h);
        xm[i] = std::max(0.0, x[i] - h);
        const double span = xp[i] - xm[i];
        if (span <= 0.0) return 0.0;
        return (f(xp) - f(xm)) / span;
    };
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) g[i] = component(i);
        return g;
    }
    std::vector<std::future<double>> futures(n);
    for (std::size_t i = 0; i < n; ++i)
        futures[i] = std::async(std::launch::async, component, i);
    for (std::size_t i = 0; i < n; ++i) g[i] = futures[i].get();
    return g;
}

void clamp01(std::vector<double>& x) {
    for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
}

// Projected steepest descent with backtracking; never accepts an increase.
std::vector<double> gradient_descent(const CostFn& f, std::vector<double> x,
                                     const OptimizerOptions& opt) {
    double fx = f(x);
    double alpha = opt.initial_step;
    for (int it = 0; it < opt.max_inner; ++it) {
        std::vector<double> g =
            fd_gradient(f, x, opt.fd_step, opt.threads);
        double gmax = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            // drop components pushing against an active bound
            if ((x[i] <= 0.0 && g[i] > 0.0) || (x[i] >= 1.0 && g[i] < 0.0))
                g[i] = 0.0;
            gmax = std::max(gmax, std::abs(g[i]));
        }
        if (gmax == 0.0) break;

        bool accepted = false;
        double a = std::min(alpha * 2.0, 0.5);
        while (a > 1e-7) {
            std::vector<double> xn = x;
            double predicted = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                xn[i] = x[i] - a * g[i] / gmax;
            clamp01(xn);
            for (std::size_t i = 0; i < x.size(); ++i)
                predicted += g[i] * (xn[i] - x[i]);
            const double fn = f(xn);
            if (fn <= fx + 1e-4 * predicted) {
                const double improvement = fx - fn;
                x = std::move(xn);
                fx = fn;
                alpha = a;
                accepted = true;
                if (improvement <=
                    1e-10 * std::max(1.0, std::abs(fx)))
                    return x;  // converged to line-search resolution
                break;
            }
            a *= 0.5;
        }
        if (!accepted) break;
    }
    return x;
}

// Nelder-Mead with box clamping; standard coefficients.
std::vector<double> nelder_mead(const CostFn& f, std::vector<double> x0,
                                const OptimizerOptions& opt) {
    const std::size_t n = x0.size();
    const int max_iter = opt.max_inner * static_cast<int>(n);
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] = std::clamp(x0[i] + 0.05, 0.0, 1.0);
        if (simplex[i + 1][i] == x0[i])
            simplex[i + 1][i] = std::clamp(x0[i] - 0.05, 0.0, 1.0);
    }
    for (std::size_t i = 0; i <= n; ++i) fs[i] = f(simplex[i]);

    auto order = [&]() {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
            return fs[a] < fs[b];
        });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (auto i : idx) {
            s2.push_back(simplex[i]);
            f2.push_back(fs[i]);
        }
        simplex = std::move(s2);
        fs = std::move(f2);
    };
    order();

    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fs[n] - fs[0]) <=
            1e-12 * std::max(1.0, std::abs(fs[0])))
            break;
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                centroid[j] += simplex[i][j] / static_cast<double>(n);
        auto blend = [&](double coeff) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = std::clamp(
                    centroid[j] + coeff * (centroid[j] - simplex[n][j]), 0.0,
                    1.0);
            return p;
        };
        std::vector<double> xr = blend(1.0);
        const double fr = f(xr);
        if (fr < fs[0]) {
            std::vector<double> xe = blend(2.0);
            const double fe = f(xe);
            if (fe < fr) {
                simplex[n] = std::move(xe);
                fs[n] = fe;
            } else {
                simplex[n] = std::move(xr);
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            simplex[n] = std::move(xr);
            fs[n] = fr;
        } else {
            std::vector<double> xc = blend(fr < fs[n] ? 0.5 : -0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fs[n])) {
                simplex[n] = std::move(xc);
                fs[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] =
                            0.5 * (simplex[i][j] + simplex[0][j]);
                    fs[i] = f(simplex[i]);
                }
            }
        }
        order();
    }
    return simplex[0];
}

}  // namespace

OcpSolution solve_ocp(const Model& model, const OcpSpec& spec,
                      const ProcessState& initial_state,
                      const std::vector<ControlProfile>& starts,
                      const std::optional<std::vector<double>>& warm_decision) {
    ShootingProblem problem(model, spec, initial_state);
    const std::size_t nc = problem.constraint_count();
    PenaltyWeights weights =
        PenaltyWeights::uniform(nc, spec.optimizer.penalty_initial);

    // collect candidate starting vectors
    std::vector<std::vector<double>> candidates;
    for (const auto& p : starts) candidates.push_back(problem.encode(p));
    if (warm_decision) {
        if (warm_decision->size() != problem.dimension())
            throw ModelError("ocp: warm start has wrong dimension");
        candidates.push_back(*warm_decision);
    }
    if (candidates.empty())
        throw InfeasibleStart("ocp: no starting point provided");

    std::vector<double> best;
    double best_cost = kBarrier;
    for (const auto& c : candidates) {
        const EvalResult r = problem.evaluate(c, weights);
        if (r.simulated && r.cost < best_cost) {
            best_cost = r.cost;
            best = c;
        }
    }
    if (best.empty())
        throw InfeasibleStart("ocp: no starting point could be simulated");

    OcpSolution sol;
    const double initial_cost = best_cost;
    std::vector<double> x = best;
    for (int outer = 0; outer < spec.optimizer.max_outer; ++outer) {
        sol.penalty_history.push_back(weights.rho[0]);
        CostFn f = [&](std::span<const double> v) {
            return problem.evaluate(v, weights).cost;
        };
        x = spec.optimizer.engine == OptimizerOptions::Engine::GradientDescent
                ? gradient_descent(f, x, spec.optimizer)
                : nelder_mead(f, x, spec.optimizer);
        const EvalResult r = problem.evaluate(x, weights);
        sol.outer_iterations = outer + 1;
        if (r.max_violation() < spec.optimizer.feasibility_tol) {
            sol.converged = true;
            break;
        }
        for (auto& rho : weights.rho) rho *= spec.optimizer.penalty_growth;
    }

    // descent guarantee at the final penalty weights
    const EvalResult r_final = problem.evaluate(x, weights);
    const EvalResult r_start = problem.evaluate(best, weights);
    if (!r_final.simulated || r_start.cost < r_final.cost) x = best;

    const EvalResult r = problem.evaluate(x, weights);
    const ShootingProblem::Decoded dec = problem.decode(x);
    sol.decision = x;
    sol.profile = dec.profile;
    sol.initial_state = dec.initial_state;
    sol.tf = dec.tf;
    sol.objective = r.objective;
    sol.penalized_cost = r.cost;
    sol.max_scaled_violation = r.max_violation();
    sol.evaluations = problem.evaluations;
    sol.no_progress =
        r.cost >= initial_cost - 1e-14 * std::max(1.0, std::abs(initial_cost));
    if (spec.free_seed_moments) {
        const auto& mu = dec.initial_state.moments;
        for (int k = 0; k < 4; ++k)
            if (mu[k] * mu[k + 2] < mu[k + 1] * mu[k + 1] * (1.0 - 1e-12))
                sol.realizability_ok = false;
    }
    return sol;
}

OcpSolution solve_scenario4(const Model& model, OcpSpec spec,
                            const ProcessState& initial_state,
                            const std::vector<ControlProfile>& starts) {
    spec.free_seed_moments = true;
    return solve_ocp(model, spec, initial_state, starts);
}

OcpSolution solve_scenario5(const Model& model, OcpSpec spec,
                            const ProcessState& initial_state,
                            const std::vector<ControlProfile>& starts,
                            const std::optional<std::vector<double>>&
                                warm_decision) {
    spec.free_final_time = true;
    if (spec.objective.kind != ObjectiveKind::MomentMatch)
        throw ModelError("scenario 5 requires the moment-match objective");
    return solve_ocp(model, spec, initial_state, starts, warm_decision);
}

OcpSolution solve_with_tf_homotopy(const Model& model, OcpSpec spec,
                                   const ProcessState& initial_state,
                                   const std::vector<ControlProfile>& starts,
                                   const std::vector<double>& t_max_stages) {
    if (t_max_stages.empty())
        throw ModelError("tf homotopy: need at least one stage");
    std::optional<std::vector<double>> warm;
    OcpSolution sol;
    for (double t_max : t_max_stages) {
        OcpSpec stage = spec;
        stage.free_final_time = true;
        stage.t_max = t_max;
        sol = solve_ocp(model, stage, initial_state, starts, warm);
        // re-encode tf for the next stage's scaling
        warm = sol.decision;
    }
    return sol;
}

std::vector<double> lognormal_target_moments(double median, double sigma_log,
                                             int max_order) {
    std::vector<double> m(max_order + 1);
    for (int nu = 0; nu <= max_order; ++nu)
        m[nu] = std::pow(median, nu) *
                std::exp(0.5 * nu * nu * sigma_log * sigma_log);
    const double m3 = m[3];
    for (auto& v : m) v /= m3;
    return m;
}

void OcpSolution::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "# optimal control solution\n";
    out << "objective = " << format_double(objective) << "\n";
    out << "penalized_cost = " << format_double(penalized_cost) << "\n";
    out << "max_scaled_violation = " << format_double(max_scaled_violation)
        << "\n";
    out << "tf = " << format_double(tf) << "\n";
    out << "converged = " << (converged ? 1 : 0) << "\n";
    out << "no_progress = " << (no_progress ? 1 : 0) << "\n";
    out << "realizability_ok = " << (realizability_ok ? 1 : 0) << "\n";
    out << "outer_iterations = " << outer_iterations << "\n";
    out << "evaluations = " << evaluations << "\n";
    out << "penalty_history =";
    for (double r : penalty_history) out << ' ' << format_double(r);
    out << "\n";
    out << "seed_moments =";
    for (double m : initial_state.moments) out << ' ' << format_double(m);
    out << "\n";
    out << "decision =";
    for (double v : decision) out << ' ' << format_double(v);
    out << "\n";
}

std::vector<double> OcpSolution::load_decision(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("decision =", 0) == 0) {
            std::stringstream ss(line.substr(10));
            std::vector<double> x;
            double v;
            while (ss >> v) x.push_back(v);
            return x;
        }
    }
    throw ConfigError("'" + path + "' has no decision vector");
}

}  // namespace lactose
