#include "lactose/pbe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lactose/errors.hpp"

namespace lactose {

namespace {

// 5-point Gauss-Legendre on [-1, 1]
constexpr double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                          0.5384693101056831, 0.9061798459386640};
constexpr double gw[5] = {0.2369268850561891, 0.4786286704993665,
                          0.5688888888888889, 0.4786286704993665,
                          0.2369268850561891};

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

SizeGrid SizeGrid::uniform(double length_max, int cells) {
    if (cells < 100)
        throw ModelError("SizeGrid: at least 100 cells required");
    SizeGrid g;
    g.edges.resize(cells + 1);
    for (int i = 0; i <= cells; ++i)
        g.edges[i] = length_max * static_cast<double>(i) / cells;
    return g;
}

SizeGrid SizeGrid::with_log_tail(double length_cut, double length_max,
                                 int linear_cells, int tail_cells) {
    if (linear_cells + tail_cells < 100)
        throw ModelError("SizeGrid: at least 100 cells required");
    if (!(0.0 < length_cut && length_cut < length_max))
        throw ModelError("SizeGrid: need 0 < length_cut < length_max");
    SizeGrid g;
    g.edges.reserve(linear_cells + tail_cells + 1);
    for (int i = 0; i <= linear_cells; ++i)
        g.edges.push_back(length_cut * static_cast<double>(i) / linear_cells);
    const double ratio = std::pow(length_max / length_cut,
                                  1.0 / static_cast<double>(tail_cells));
    double edge = length_cut;
    for (int i = 1; i <= tail_cells; ++i) {
        edge *= ratio;
        g.edges.push_back(edge);
    }
    g.edges.back() = length_max;
    return g;
}

double SizeGrid::min_width() const {
    double w = edges[1] - edges[0];
    for (std::size_t i = 1; i < cells(); ++i) w = std::min(w, width(i));
    return w;
}

SizeDistribution SizeDistribution::from_function(
    const SizeGrid& grid, const std::function<double(double)>& density,
    bool cell_average) {
    SizeDistribution d;
    d.grid = grid;
    d.values.resize(grid.cells());
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        if (cell_average) {
            const double a = grid.edges[i], b = grid.edges[i + 1];
            double sum = 0.0;
            for (int k = 0; k < 5; ++k)
                sum += gw[k] * density(0.5 * (a + b) + 0.5 * (b - a) * gx[k]);
            d.values[i] = 0.5 * sum;  // mean over the cell
        } else {
            d.values[i] = density(grid.center(i));
        }
        d.values[i] = std::max(d.values[i], 0.0);
    }
    return d;
}

std::vector<double> SizeDistribution::moments(int max_order) const {
    // exact \int L^nu dL over each cell against the piecewise-constant value
    std::vector<double> mu(max_order + 1, 0.0);
    std::vector<double> lo(max_order + 2), hi(max_order + 2);
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        const double a = grid.edges[i], b = grid.edges[i + 1];
        double pa = a, pb = b;
        for (int nu = 0; nu <= max_order; ++nu) {
            mu[nu] += values[i] * (pb - pa) / (nu + 1.0);
            pa *= a;
            pb *= b;
        }
    }
    return mu;
}

double SizeDistribution::total_number() const {
    double n = 0.0;
    for (std::size_t i = 0; i < grid.cells(); ++i)
        n += values[i] * grid.width(i);
    return n;
}

std::vector<double> seed_from_moments_check(const SizeDistribution& seed,
                                            std::span<const double> targets) {
    const std::vector<double> mu =
        seed.moments(static_cast<int>(targets.size()) - 1);
    std::vector<double> res(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        res[i] = mu[i] - targets[i];
    return res;
}

namespace {

struct PbeWorkspace {
    const Model& model;
    const SizeGrid& grid;
    std::size_t cells;
    std::vector<double> flux;    // cells+1 face fluxes
    std::vector<double> slope;   // limited slopes (minmod scheme)
    PbeScheme scheme;

    PbeWorkspace(const Model& m, const SizeGrid& g, PbeScheme sch)
        : model(m), grid(g), cells(g.cells()), flux(cells + 1, 0.0),
          slope(cells, 0.0), scheme(sch) {}

    // Derivative of [n_0..n_{C-1}, m_w, ca, cb, m_cry, T, Tj]; returns the
    // outflow number flux for bookkeeping.
    double rhs(std::span<const double> y, const ControlInput& u,
               std::span<double> dy) {
        std::span<const double> n(y.data(), cells);

        // quadrature moments 0..3 (only mu2, mu3 enter the balances)
        double mu2 = 0.0, mu3 = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            const double a = grid.edges[i], b = grid.edges[i + 1];
            const double a2 = a * a, b2 = b * b;
            mu2 += n[i] * (b * b2 - a * a2) / 3.0;
            mu3 += n[i] * (b2 * b2 - a2 * a2) / 4.0;
        }

        ProcessState s;
        s.moments = {0.0, 0.0, mu2, mu3, 0.0, 0.0};
        s.water_mass = y[cells];
        s.c_alpha = y[cells + 1];
        s.c_beta = y[cells + 2];
        s.crystal_mass = y[cells + 3];
        s.temperature = y[cells + 4];
        s.jacket_temperature = y[cells + 5];

        const Celsius T{s.temperature};
        const auto& c = model.constants;
        const MutarotationRates k = mutarotation_rates(T, model.kinetics);
        const double growth = growth_rate(s.c_alpha, s.c_beta, T, model.kinetics);
        const double nucleation =
            nucleation_rate(s.c_alpha, s.c_beta, T, model.kinetics);
        const double volume = slurry_volume(s, c);
        const double area = contact_surface(volume, c);

        const double dm_cry = crystal_mass_rhs(s, growth, volume, c);
        const double dm_w = water_rhs(dm_cry, u.feed_rate, c);
        const double dca = c_alpha_rhs(s, dm_cry, u.feed_rate, k, c);
        const double dcb = c_beta_rhs(s, dm_cry, u.feed_rate, k, c);
        const double specific = s.c_alpha / c.alpha_density +
                                s.c_beta / c.beta_density +
                                1.0 / c.water_density;
        const double dv = 3.0 * c.shape_factor * growth * volume * mu2 +
                          dm_w * specific +
                          s.water_mass * (dca / c.alpha_density +
                                          dcb / c.beta_density);
        const double dilution = dv / volume;

        // face fluxes; G >= 0 so upwinding is always left-biased
        flux[0] = nucleation;  // number influx, the well-posed form of B/G
        if (scheme == PbeScheme::Minmod2) {
            slope[0] = slope[cells - 1] = 0.0;
            for (std::size_t i = 1; i + 1 < cells; ++i) {
                const double dl = (n[i] - n[i - 1]) /
                                  (grid.center(i) - grid.center(i - 1));
                const double dr = (n[i + 1] - n[i]) /
                                  (grid.center(i + 1) - grid.center(i));
                slope[i] = minmod(dl, dr);
            }
            for (std::size_t f = 1; f <= cells; ++f) {
                const std::size_t up = f - 1;
                const double face_val =
                    n[up] + slope[up] * (grid.edges[f] - grid.center(up));
                flux[f] = growth * std::max(face_val, 0.0);
            }
        } else {
            for (std::size_t f = 1; f <= cells; ++f)
                flux[f] = growth * n[f - 1];
        }

        for (std::size_t i = 0; i < cells; ++i)
            dy[i] = -(flux[i + 1] - flux[i]) / grid.width(i) -
                    dilution * n[i];

        dy[cells] = dm_w;
        dy[cells + 1] = dca;
        dy[cells + 2] = dcb;
        dy[cells + 3] = dm_cry;

        EnergyRhsInputs ein;
        ein.crystal_mass_rate = dm_cry;
        ein.water_mass_rate = dm_w;
        ein.c_alpha_rate = dca;
        ein.c_beta_rate = dcb;
        ein.contact_area = area;
        ein.feed_rate = u.feed_rate;
        ein.set_point = u.set_point;
        ein.feed_c_alpha = model.enthalpy_c_alpha;
        ein.feed_c_beta = model.enthalpy_c_beta;
        const EnergyRates er = energy_rhs(s, ein, c);
        dy[cells + 4] = er.temperature_rate;
        dy[cells + 5] = er.jacket_rate;
        return flux[cells];
    }

    double growth_now(std::span<const double> y) const {
        return growth_rate(y[cells + 1], y[cells + 2], Celsius{y[cells + 4]},
                           model.kinetics);
    }
};

}  // namespace

PbeResult simulate_pbe(const Model& model, const SizeDistribution& seed,
                       const ProcessState& scalars, const ControlProfile& u,
                       double tf, const PbeOptions& opts) {
    const SizeGrid& grid = seed.grid;
    const std::size_t cells = grid.cells();
    PbeWorkspace ws(model, grid, opts.scheme);
    const double cfl =
        opts.cfl > 0.0 ? opts.cfl
                       : (opts.scheme == PbeScheme::Upwind1 ? 0.9 : 0.45);
    const double min_width = grid.min_width();

    std::vector<double> y(cells + 6);
    std::copy(seed.values.begin(), seed.values.end(), y.begin());
    y[cells] = scalars.water_mass;
    y[cells + 1] = scalars.c_alpha;
    y[cells + 2] = scalars.c_beta;
    y[cells + 3] = scalars.crystal_mass;
    y[cells + 4] = scalars.temperature;
    y[cells + 5] = scalars.jacket_temperature;

    std::vector<double> k1(y.size()), k2(y.size()), ymid(y.size());

    PbeResult out;
    double lost_number = 0.0;
    auto snapshot_of = [&]() {
        SizeDistribution d;
        d.grid = grid;
        d.values.assign(y.begin(), y.begin() + cells);
        return d;
    };
    auto record = [&](double t) {
        SizeDistribution d = snapshot_of();
        out.times.push_back(t);
        out.moments.push_back(d.moments(5));
        ProcessState s;
        s.moments = out.moments.back();
        s.water_mass = y[cells];
        s.c_alpha = y[cells + 1];
        s.c_beta = y[cells + 2];
        s.crystal_mass = y[cells + 3];
        s.temperature = y[cells + 4];
        s.jacket_temperature = y[cells + 5];
        out.states.push_back(std::move(s));
    };
    record(0.0);

    std::vector<double> snapshot_times = opts.snapshot_times;
    std::sort(snapshot_times.begin(), snapshot_times.end());
    std::size_t next_snap = 0;

    const auto& bp = u.breakpoints();
    double t = 0.0;
    for (std::size_t iv = 0; iv + 1 < bp.size(); ++iv) {
        const double seg_end = std::min(bp[iv + 1], tf);
        if (seg_end <= t + 1e-12) continue;
        double next_output =
            (std::floor(t / opts.output_interval) + 1.0) *
            opts.output_interval;
        while (t < seg_end - 1e-9) {
            const double growth = ws.growth_now(y);
            const double cfl_dt =
                growth > 0.0 ? cfl * min_width / growth
                             : std::numeric_limits<double>::infinity();
            double dt = std::min(opts.max_dt, cfl_dt);
            if (opts.fixed_dt > 0.0) {
                if (opts.fixed_dt > cfl_dt)
                    throw CflViolation(
                        "simulate_pbe: fixed dt " +
                            std::to_string(opts.fixed_dt) +
                            " s exceeds the CFL limit; use dt <= " +
                            std::to_string(cfl_dt) + " s",
                        cfl_dt);
                dt = opts.fixed_dt;
            }
            double target = std::min(seg_end, next_output);
            if (next_snap < snapshot_times.size())
                target = std::min(target, snapshot_times[next_snap]);
            dt = std::min(dt, target - t);
            if (dt <= 0.0) {
                next_output += opts.output_interval;
                continue;
            }

            const ControlInput uc = u.sample_on(iv, t + 0.5 * dt);
            if (opts.scheme == PbeScheme::Upwind1) {
                const double fout = ws.rhs(y, uc, k1);
                for (std::size_t i = 0; i < y.size(); ++i)
                    y[i] += dt * k1[i];
                lost_number += dt * fout;
            } else {
                // Heun (SSP-RK2)
                const double f1 = ws.rhs(y, uc, k1);
                for (std::size_t i = 0; i < y.size(); ++i)
                    ymid[i] = y[i] + dt * k1[i];
                const double f2 = ws.rhs(ymid, uc, k2);
                for (std::size_t i = 0; i < y.size(); ++i)
                    y[i] += 0.5 * dt * (k1[i] + k2[i]);
                lost_number += 0.5 * dt * (f1 + f2);
            }
            for (std::size_t i = 0; i < cells; ++i)
                y[i] = std::max(y[i], 0.0);
            t += dt;
            ++out.steps;

            if (next_snap < snapshot_times.size() &&
                t >= snapshot_times[next_snap] - 1e-9) {
                out.snapshots.emplace_back(t, snapshot_of());
                ++next_snap;
            }
            if (t >= next_output - 1e-9) {
                record(t);
                next_output += opts.output_interval;
            }
        }
        if (seg_end >= tf - 1e-9) break;
    }
    if (out.times.back() < tf - 1e-9) record(t);

    out.final_distribution = snapshot_of();
    const double total = out.final_distribution.total_number() + lost_number;
    out.outflow_number_fraction = total > 0.0 ? lost_number / total : 0.0;
    return out;
}

}  // namespace lactose
