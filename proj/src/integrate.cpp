#include "lactose/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "lactose/errors.hpp"

namespace lactose {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                 e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Stepper {
    const Model& model;
    std::size_t n_moments;
    std::size_t dim;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp;
    long evals = 0;

    Stepper(const Model& m, std::size_t nm)
        : model(m), n_moments(nm), dim(nm + 6) {
        for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp})
            v->assign(dim, 0.0);
    }

    void eval(std::span<const double> y, const ControlInput& u,
              std::span<double> dy) {
        model.rhs_flat(y, u, dy, n_moments);
        ++evals;
    }

    // One DP45 attempt; fills ynew and err. The control is sampled from the
    // profile interval that contains [t, t+h].
    void dp45(const ControlProfile& p, std::size_t interval, double t,
              double h, std::span<const double> y, std::span<double> ynew,
              std::span<double> err, bool have_k1) {
        auto u = [&](double tau) { return p.sample_on(interval, tau); };
        if (!have_k1) eval(y, u(t), k1);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * a21 * k1[i];
        eval(ytmp, u(t + c2 * h), k2);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(ytmp, u(t + c3 * h), k3);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(ytmp, u(t + c4 * h), k4);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                  a54 * k4[i]);
        eval(ytmp, u(t + c5 * h), k5);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        eval(ytmp, u(t + h), k6);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                  b5 * k5[i] + b6 * k6[i]);
        eval(ynew, u(t + h), k7);  // FSAL
        for (std::size_t i = 0; i < dim; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                          e6 * k6[i] + e7 * k7[i]);
    }

    void rk4(const ControlProfile& p, std::size_t interval, double t, double h,
             std::span<const double> y, std::span<double> ynew) {
        auto u = [&](double tau) { return p.sample_on(interval, tau); };
        eval(y, u(t), k1);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + 0.5 * h * k1[i];
        eval(ytmp, u(t + 0.5 * h), k2);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + 0.5 * h * k2[i];
        eval(ytmp, u(t + 0.5 * h), k3);
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * k3[i];
        eval(ytmp, u(t + h), k4);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] =
                y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
};

std::optional<IntegrationEvent> check_events(const Model& model,
                                             const ProcessState& s, double t) {
    const double packing = model.constants.shape_factor * s.moments[3];
    if (packing >= 1.0)
        return IntegrationEvent{IntegrationEvent::Kind::PackedBed, t};
    if (slurry_volume(s, model.constants) > model.constants.max_volume)
        return IntegrationEvent{IntegrationEvent::Kind::VolumeOverflow, t};
    return std::nullopt;
}

}  // namespace

Trajectory integrate(const Model& model, const ProcessState& initial,
                     const ControlProfile& profile, double tf,
                     const IntegratorOptions& opts) {
    if (!(tf >= 0.0) || tf > profile.duration() + 1e-9)
        throw ModelError("integrate: profile does not cover [0, tf]");
    initial.validate(model.constants);

    const std::size_t nm = initial.moment_count();
    Stepper st(model, nm);
    std::vector<double> y = initial.flat();
    std::vector<double> ynew(st.dim), err(st.dim);

    // error weights: abs_tol scaled per component by the initial magnitudes
    std::vector<double> scale(st.dim);
    for (std::size_t i = 0; i < st.dim; ++i)
        scale[i] = std::max(std::abs(y[i]), 1e-12);

    Trajectory traj;
    traj.profile = profile;
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(ProcessState::from_flat(y, nm));
        traj.controls.push_back(profile.sample(t));
    };
    record(0.0);
    if (tf == 0.0) {
        traj.rhs_evaluations = st.evals;
        return traj;
    }

    const auto& bp = profile.breakpoints();
    double t = 0.0;
    double h = std::min(opts.max_step,
                        opts.method == IntegratorMethod::Rk4Fixed
                            ? opts.fixed_dt
                            : opts.max_step);
    bool stopped = false;

    for (std::size_t iv = 0; iv + 1 < bp.size() && !stopped; ++iv) {
        const double seg_end = std::min(bp[iv + 1], tf);
        if (seg_end <= t + 1e-12) continue;
        bool have_k1 = false;  // fresh derivative after every restart
        double next_output =
            (std::floor(t / opts.output_interval) + 1.0) * opts.output_interval;

        while (t < seg_end - 1e-9 * std::max(1.0, seg_end)) {
            double target = std::min(seg_end, next_output);
            if (target <= t + 1e-12) {
                next_output += opts.output_interval;
                continue;
            }
            double step = std::min(h, target - t);
            if (opts.method == IntegratorMethod::Rk4Fixed) {
                step = std::min(opts.fixed_dt, target - t);
                st.rk4(profile, iv, t, step, y, ynew);
                std::swap(y, ynew);
                t += step;
            } else {
                bool accepted = false;
                while (!accepted) {
                    st.dp45(profile, iv, t, step, y, ynew, err, have_k1);
                    have_k1 = true;
                    double norm2 = 0.0;
                    for (std::size_t i = 0; i < st.dim; ++i) {
                        const double w =
                            opts.abs_tol * scale[i] +
                            opts.rel_tol *
                                std::max(std::abs(y[i]), std::abs(ynew[i]));
                        const double r = err[i] / w;
                        norm2 += r * r;
                    }
                    const double err_norm =
                        std::sqrt(norm2 / static_cast<double>(st.dim));
                    if (err_norm <= 1.0) {
                        accepted = true;
                        t += step;
                        std::swap(y, ynew);
                        std::swap(st.k1, st.k7);  // FSAL
                        const double grow =
                            err_norm > 0.0
                                ? 0.9 * std::pow(err_norm, -0.2)
                                : 5.0;
                        h = std::min(opts.max_step,
                                     step * std::clamp(grow, 0.2, 5.0));
                    } else {
                        const double shrink =
                            std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
                        step *= shrink;
                        have_k1 = true;  // k1 still valid at unchanged t
                        if (step < opts.min_step)
                            throw StepSizeUnderflow(
                                "integrate: step underflow at t = " +
                                std::to_string(t));
                    }
                }
            }

            const bool at_target = t >= target - 1e-9 * std::max(1.0, target);
            if (at_target) {
                record(t);
                if (t >= next_output - 1e-9)
                    next_output += opts.output_interval;
                const ProcessState& s = traj.states.back();
                s.validate(model.constants);
                if (auto ev = check_events(model, s, t)) {
                    traj.event = ev;
                    stopped = true;
                    break;
                }
            }
        }
        if (seg_end >= tf - 1e-9) break;
    }
    traj.rhs_evaluations = st.evals;
    return traj;
}

DerivedSeries compute_derived(const Model& model, const Trajectory& traj) {
    DerivedSeries d;
    const std::size_t n = traj.times.size();
    for (auto* v : {&d.volume, &d.area, &d.nucleation, &d.growth, &d.c_sat,
                    &d.d43, &d.cv})
        v->reserve(n);
    for (const auto& s : traj.states) {
        const Celsius T{s.temperature};
        const double v = slurry_volume(s, model.constants);
        d.volume.push_back(v);
        d.area.push_back(contact_surface(v, model.constants));
        d.nucleation.push_back(
            nucleation_rate(s.c_alpha, s.c_beta, T, model.kinetics));
        d.growth.push_back(growth_rate(s.c_alpha, s.c_beta, T, model.kinetics));
        d.c_sat.push_back(alpha_saturation(s.c_beta, T));
        const QualityMetrics q = quality_metrics(s);
        d.d43.push_back(q.d43);
        d.cv.push_back(q.cv);
    }
    return d;
}

double ViolationReport::max_scaled(const PathBounds& b) const {
    const double temp_span = std::max(b.temp_max - b.temp_min, 1.0);
    double m = 0.0;
    m = std::max(m, volume_high.magnitude / b.volume_max);
    m = std::max(m, volume_low.magnitude / b.volume_max);
    m = std::max(m, temp_high.magnitude / temp_span);
    m = std::max(m, temp_low.magnitude / temp_span);
    // saturation concentrations are O(0.1); scale keeps violations comparable
    m = std::max(m, undersaturation.magnitude / 0.3);
    return m;
}

ViolationReport monitor_path_constraints(const Model& model,
                                         const Trajectory& traj,
                                         const PathBounds& bounds) {
    ViolationReport rep;
    auto update = [](ConstraintViolation& v, double mag, double t) {
        if (mag <= 0.0) return;
        if (v.first_time < 0.0) v.first_time = t;
        v.magnitude = std::max(v.magnitude, mag);
    };
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        const double t = traj.times[i];
        const double v = slurry_volume(s, model.constants);
        update(rep.volume_high, v - bounds.volume_max, t);
        update(rep.volume_low, bounds.volume_min - v, t);
        update(rep.temp_high, s.temperature - bounds.temp_max, t);
        update(rep.temp_low, bounds.temp_min - s.temperature, t);
        if (bounds.require_supersaturation) {
            const double c_sat =
                alpha_saturation(s.c_beta, Celsius{s.temperature});
            update(rep.undersaturation, c_sat - s.c_alpha, t);
        }
    }
    return rep;
}

ConservationResiduals conservation_residuals(const Model& model,
                                             const Trajectory& traj) {
    ConservationResiduals out;
    const auto& c = model.constants;
    const double inv_r = 1.0 / c.molar_mass_ratio;
    const auto& s0 = traj.states.front();
    const double lactose0 =
        (s0.c_alpha + s0.c_beta) * s0.water_mass + inv_r * s0.crystal_mass;
    const double feed_fraction = c.feed_c_alpha + c.feed_c_beta;
    out.lactose.reserve(traj.times.size());
    out.water.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        const double fed_water = traj.profile.feed_integral(traj.times[i]);
        const double lactose =
            (s.c_alpha + s.c_beta) * s.water_mass + inv_r * s.crystal_mass;
        const double rl = lactose - lactose0 - fed_water * feed_fraction;
        const double rw = s.water_mass - s0.water_mass - fed_water -
                          (inv_r - 1.0) * (s.crystal_mass - s0.crystal_mass);
        out.lactose.push_back(rl);
        out.water.push_back(rw);
        out.max_abs_lactose = std::max(out.max_abs_lactose, std::abs(rl));
        out.max_abs_water = std::max(out.max_abs_water, std::abs(rw));
    }
    return out;
}

}  // namespace lactose
