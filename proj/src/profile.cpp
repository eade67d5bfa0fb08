#include "lactose/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lactose/csv.hpp"
#include "lactose/errors.hpp"

namespace lactose {

ControlProfile::ControlProfile(std::vector<double> breakpoints,
                               std::vector<ControlInput> knots,
                               Interpolation interp,
                               const ControlBounds& bounds)
    : breakpoints_(std::move(breakpoints)),
      knots_(std::move(knots)),
      interp_(interp) {
    if (breakpoints_.size() < 2 || breakpoints_.size() != knots_.size())
        throw ModelError("ControlProfile: need matching breakpoints/knots, >= 2");
    if (breakpoints_.front() != 0.0)
        throw ModelError("ControlProfile: first breakpoint must be 0");
    if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end()) ||
        std::adjacent_find(breakpoints_.begin(), breakpoints_.end()) !=
            breakpoints_.end())
        throw ModelError("ControlProfile: breakpoints must strictly increase");
    for (auto& k : knots_) {
        if (std::isnan(k.set_point) || std::isnan(k.feed_rate))
            throw ModelError("ControlProfile: NaN knot value");
        const ControlInput clipped = bounds.clip(k);
        if (clipped.set_point != k.set_point ||
            clipped.feed_rate != k.feed_rate)
            ++clipped_;
        k = clipped;
    }
}

ControlInput ControlProfile::sample_on(std::size_t i, double t) const {
    if (interp_ == Interpolation::PiecewiseConstant) return knots_[i];
    const double t0 = breakpoints_[i], t1 = breakpoints_[i + 1];
    const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    return {knots_[i].set_point +
                w * (knots_[i + 1].set_point - knots_[i].set_point),
            knots_[i].feed_rate +
                w * (knots_[i + 1].feed_rate - knots_[i].feed_rate)};
}

ControlInput ControlProfile::sample(double t) const {
    if (t <= breakpoints_.front()) return knots_.front();
    if (t >= breakpoints_.back()) {
        return interp_ == Interpolation::PiecewiseConstant
                   ? knots_[knots_.size() - 2]
                   : knots_.back();
    }
    // left-continuous: interval (b_i, b_{i+1}] belongs to knot i
    const auto it =
        std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin());
    if (*it >= t) --i;  // t <= b_{i+1}
    return sample_on(i, t);
}

double ControlProfile::feed_integral(double t) const {
    t = std::clamp(t, 0.0, duration());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
        const double t0 = breakpoints_[i];
        const double t1 = std::min(breakpoints_[i + 1], t);
        if (t1 <= t0) break;
        if (interp_ == Interpolation::PiecewiseConstant) {
            total += knots_[i].feed_rate * (t1 - t0);
        } else {
            const double q1 = sample_on(i, t1).feed_rate;
            total += 0.5 * (knots_[i].feed_rate + q1) * (t1 - t0);
        }
    }
    return total;
}

ControlProfile ControlProfile::rescaled(double new_duration) const {
    if (!(new_duration > 0.0))
        throw ModelError("ControlProfile::rescaled: duration must be > 0");
    ControlProfile out = *this;
    const double factor = new_duration / duration();
    for (auto& b : out.breakpoints_) b *= factor;
    out.breakpoints_.back() = new_duration;  // exact endpoint
    return out;
}

void ControlProfile::save_csv(const std::string& path) const {
    CsvWriter w(path, {"t", "T_sp", "q_H2O"});
    for (std::size_t i = 0; i < breakpoints_.size(); ++i)
        w.row({breakpoints_[i], knots_[i].set_point, knots_[i].feed_rate});
}

ControlProfile ControlProfile::load_csv(const std::string& path,
                                        Interpolation interp,
                                        const ControlBounds& bounds) {
    CsvTable table = CsvTable::load(path);
    const auto& t = table.column("t");
    const auto& sp = table.column("T_sp");
    const auto& q = table.column("q_H2O");
    std::vector<ControlInput> knots(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) knots[i] = {sp[i], q[i]};
    return ControlProfile(t, knots, interp, bounds);
}

ControlProfile constant_policy(double set_point, double feed_rate, double tf,
                               const ControlBounds& bounds) {
    if (!bounds.contains({set_point, feed_rate}))
        throw ModelError("constant_policy: controls outside bounds");
    return ControlProfile({0.0, tf}, {{set_point, feed_rate},
                                      {set_point, feed_rate}},
                          Interpolation::PiecewiseConstant, bounds);
}

ControlProfile linear_cooling_policy(double set_point_start,
                                     double set_point_end, double feed_rate,
                                     double tf, const ControlBounds& bounds) {
    if (set_point_start < set_point_end)
        throw ModelError("linear_cooling_policy: start must be >= end");
    if (!bounds.contains({set_point_start, feed_rate}) ||
        !bounds.contains({set_point_end, feed_rate}))
        throw ModelError("linear_cooling_policy: controls outside bounds");
    return ControlProfile({0.0, tf}, {{set_point_start, feed_rate},
                                      {set_point_end, feed_rate}},
                          Interpolation::PiecewiseLinear, bounds);
}

ControlProfile parameterized_policy(std::span<const double> knot_values,
                                    std::size_t n_knots, Interpolation interp,
                                    double tf, const ControlBounds& bounds) {
    if (knot_values.size() != 2 * n_knots || n_knots < 2)
        throw ModelError("parameterized_policy: expected 2*n_knots values");
    std::vector<double> breakpoints(n_knots);
    std::vector<ControlInput> knots(n_knots);
    for (std::size_t i = 0; i < n_knots; ++i) {
        breakpoints[i] =
            tf * static_cast<double>(i) / static_cast<double>(n_knots - 1);
        knots[i] = {knot_values[i], knot_values[n_knots + i]};
    }
    breakpoints.back() = tf;
    return ControlProfile(std::move(breakpoints), std::move(knots), interp,
                          bounds);
}

}  // namespace lactose
