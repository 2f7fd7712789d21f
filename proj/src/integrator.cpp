#include "nicholson/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nicholson {

namespace {

constexpr scalar_t kOverflowLimit = 1e150;
constexpr scalar_t kDelayFitTolerance = 1e-9;

}  // namespace

ComponentHistory ComponentHistory::constant(scalar_t value) {
    ComponentHistory h;
    h.constant_kind_ = true;
    h.value_ = value;
    return h;
}

ComponentHistory ComponentHistory::samples(std::vector<scalar_t> grid, std::vector<scalar_t> values) {
    if (grid.size() != values.size() || grid.size() < 2) {
        throw std::invalid_argument("history samples: need >= 2 matching grid/value entries");
    }
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) {
            throw std::invalid_argument("history samples: grid must be strictly increasing");
        }
    }
    ComponentHistory h;
    h.constant_kind_ = false;
    h.grid_ = std::move(grid);
    h.values_ = std::move(values);
    // Centered finite-difference slopes, one-sided at the ends.
    const std::size_t m = h.grid_.size();
    h.slopes_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (k == 0) {
            h.slopes_[k] = (h.values_[1] - h.values_[0]) / (h.grid_[1] - h.grid_[0]);
        } else if (k == m - 1) {
            h.slopes_[k] = (h.values_[m - 1] - h.values_[m - 2]) / (h.grid_[m - 1] - h.grid_[m - 2]);
        } else {
            h.slopes_[k] = (h.values_[k + 1] - h.values_[k - 1]) / (h.grid_[k + 1] - h.grid_[k - 1]);
        }
    }
    return h;
}

scalar_t ComponentHistory::eval(scalar_t t) const {
    if (constant_kind_) return value_;
    if (t <= grid_.front()) {
        if (t < grid_.front() - 1e-9) {
            throw std::out_of_range("history eval: time before sampled range");
        }
        return values_.front();
    }
    if (t >= grid_.back()) return values_.back();
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const scalar_t width = grid_[k + 1] - grid_[k];
    const scalar_t xi = (t - grid_[k]) / width;
    return detail::hermite_eval(values_[k], slopes_[k], values_[k + 1], slopes_[k + 1], width, xi);
}

void ComponentHistory::minmax(scalar_t lo, scalar_t hi, scalar_t& mn, scalar_t& mx) const {
    if (constant_kind_) {
        mn = std::min(mn, value_);
        mx = std::max(mx, value_);
        return;
    }
    lo = std::max(lo, grid_.front());
    hi = std::min(hi, grid_.back());
    if (!(lo <= hi)) return;
    for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
        const scalar_t a = std::max(lo, grid_[k]);
        const scalar_t b = std::min(hi, grid_[k + 1]);
        if (!(a <= b)) continue;
        const scalar_t width = grid_[k + 1] - grid_[k];
        detail::hermite_minmax(values_[k], slopes_[k], values_[k + 1], slopes_[k + 1], width,
                               (a - grid_[k]) / width, (b - grid_[k]) / width, mn, mx);
    }
}

scalar_t ComponentHistory::min_value() const {
    if (constant_kind_) return value_;
    scalar_t mn = std::numeric_limits<scalar_t>::infinity();
    scalar_t mx = -mn;
    minmax(grid_.front(), grid_.back(), mn, mx);
    return mn;
}

scalar_t ComponentHistory::coverage_from() const {
    return constant_kind_ ? -std::numeric_limits<scalar_t>::infinity() : grid_.front();
}

scalar_t ComponentHistory::coverage_to() const {
    return constant_kind_ ? std::numeric_limits<scalar_t>::infinity() : grid_.back();
}

InitialHistory InitialHistory::constant(int n, scalar_t value) {
    InitialHistory phi;
    phi.components.assign(static_cast<std::size_t>(n), ComponentHistory::constant(value));
    return phi;
}

InitialHistory InitialHistory::constants(const std::vector<scalar_t>& values) {
    InitialHistory phi;
    phi.components.reserve(values.size());
    for (scalar_t v : values) phi.components.push_back(ComponentHistory::constant(v));
    return phi;
}

IntegrationOverflow::IntegrationOverflow(scalar_t time)
    : std::runtime_error("integration overflow: knot magnitude exceeded 1e150 at t = " +
                         std::to_string(time) + "; renormalize the run"),
      t(time) {}

StepGrid fit_step_to_delays(const std::vector<scalar_t>& delays, scalar_t h_request) {
    if (!(h_request > 0.0)) throw std::invalid_argument("step must be positive");
    scalar_t h = h_request;
    for (int pass = 0; pass < 64; ++pass) {
        bool ok = true;
        for (scalar_t tau : delays) {
            const scalar_t m = std::round(tau / h);
            if (m >= 1.0 && std::abs(tau - m * h) <= kDelayFitTolerance * std::max(1.0, tau)) {
                continue;
            }
            h = tau / std::ceil(tau / h - 1e-12);
            ok = false;
        }
        if (ok) {
            StepGrid grid;
            grid.h = h;
            grid.delay_steps.reserve(delays.size());
            for (scalar_t tau : delays) grid.delay_steps.push_back(std::lround(tau / h));
            return grid;
        }
    }
    throw std::runtime_error("no step compatible with all delays near the requested value");
}

scalar_t default_step(const std::vector<scalar_t>& delays) {
    scalar_t tau_min = std::numeric_limits<scalar_t>::infinity();
    for (scalar_t tau : delays) tau_min = std::min(tau_min, tau);
    return std::min(0.01, tau_min / 8.0);
}

namespace detail {

scalar_t hermite_eval(scalar_t y0, scalar_t m0, scalar_t y1, scalar_t m1, scalar_t h, scalar_t xi) {
    const scalar_t xi2 = xi * xi;
    const scalar_t xi3 = xi2 * xi;
    return (2.0 * xi3 - 3.0 * xi2 + 1.0) * y0 + (xi3 - 2.0 * xi2 + xi) * h * m0 +
           (-2.0 * xi3 + 3.0 * xi2) * y1 + (xi3 - xi2) * h * m1;
}

void hermite_minmax(scalar_t y0, scalar_t m0, scalar_t y1, scalar_t m1, scalar_t h,
                    scalar_t xi_lo, scalar_t xi_hi, scalar_t& mn, scalar_t& mx) {
    const auto consider = [&](scalar_t xi) {
        const scalar_t v = hermite_eval(y0, m0, y1, m1, h, xi);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    };
    consider(xi_lo);
    consider(xi_hi);
    // H'(xi)/h in local coordinates is a quadratic a xi^2 + b xi + c.
    const scalar_t a = 6.0 * (y0 - y1) + 3.0 * h * (m0 + m1);
    const scalar_t b = 6.0 * (y1 - y0) - 2.0 * h * (2.0 * m0 + m1);
    const scalar_t c = h * m0;
    if (a == 0.0) {
        if (b != 0.0) {
            const scalar_t xi = -c / b;
            if (xi > xi_lo && xi < xi_hi) consider(xi);
        }
        return;
    }
    const scalar_t disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return;
    const scalar_t sq = std::sqrt(disc);
    // Numerically stable quadratic roots.
    const scalar_t q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    const scalar_t r1 = q / a;
    const scalar_t r2 = (q != 0.0) ? c / q : r1;
    if (r1 > xi_lo && r1 < xi_hi) consider(r1);
    if (r2 > xi_lo && r2 < xi_hi) consider(r2);
}

}  // namespace detail

namespace detail {

/// Write access to trajectory internals for the stepper.
struct TrajectoryBuilder {
    Trajectory traj;

    void init(int n, scalar_t h, long steps, const std::vector<scalar_t>& delays,
              const InitialHistory& phi) {
        traj.n_ = n;
        traj.h_ = h;
        traj.steps_ = steps;
        traj.t_end_ = static_cast<scalar_t>(steps) * h;
        traj.delays_ = delays;
        traj.history_ = phi;
        traj.values_.resize(steps + 1, n);
        traj.derivs_.resize(steps + 1, n);
    }
    matrix_t& values() { return traj.values_; }
    matrix_t& derivs() { return traj.derivs_; }
    void record_clamp(scalar_t magnitude) {
        ++traj.clamp_events_;
        traj.max_clamp_magnitude_ = std::max(traj.max_clamp_magnitude_, magnitude);
    }
};

}  // namespace detail

namespace {

/// Unchecked right-hand side used inside the stepper; `nonlinear` is null for
/// linear systems, in which case the delayed value enters as is.
struct RhsCore {
    int n = 0;
    const std::vector<QuasiPeriodicSignal>* d = nullptr;
    const std::vector<QuasiPeriodicSignal>* a = nullptr;
    const std::vector<QuasiPeriodicSignal>* beta = nullptr;
    const DelaySystem* nonlinear = nullptr;

    void eval(scalar_t t, const vector_t& y, const vector_t& yd, vector_t& out) const {
        for (int i = 0; i < n; ++i) {
            scalar_t acc = -(*d)[static_cast<std::size_t>(i)].eval(t) * y[i];
            for (int j = 0; j < n; ++j) {
                const QuasiPeriodicSignal& aij = (*a)[static_cast<std::size_t>(i) * n + j];
                if (aij.is_identically_zero()) continue;
                acc += aij.eval(t) * y[j];
            }
            const scalar_t g = nonlinear != nullptr
                                   ? nonlinearity_value(*nonlinear, i, t, std::max(yd[i], 0.0))
                                   : yd[i];
            acc += (*beta)[static_cast<std::size_t>(i)].eval(t) * g;
            out[i] = acc;
        }
    }
};

void check_history(const InitialHistory& phi, const std::vector<scalar_t>& delays, bool nonnegative) {
    if (phi.components.size() != delays.size()) {
        throw std::invalid_argument("initial history size does not match the system dimension");
    }
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const ComponentHistory& comp = phi.components[i];
        if (comp.coverage_from() > -delays[i] + 1e-9 || comp.coverage_to() < -1e-9) {
            throw std::invalid_argument("initial history does not cover [-tau_i, 0]");
        }
        if (nonnegative && comp.min_value() < 0.0) {
            throw std::invalid_argument("initial history must be nonnegative for nonlinear runs");
        }
    }
}

Trajectory integrate_core(const RhsCore& core, const std::vector<scalar_t>& delays,
                          const InitialHistory& phi, scalar_t T, scalar_t h_request, bool clamp) {
    if (!(T > 0.0)) throw std::invalid_argument("integration horizon must be positive");
    scalar_t tau_min = std::numeric_limits<scalar_t>::infinity();
    for (scalar_t tau : delays) tau_min = std::min(tau_min, tau);
    if (h_request <= 0.0) h_request = default_step(delays);
    if (h_request > tau_min / 4.0 + 1e-15) {
        throw std::invalid_argument("step must satisfy h <= min tau_i / 4");
    }
    const StepGrid grid = fit_step_to_delays(delays, h_request);
    const scalar_t h = grid.h;
    const long S = static_cast<long>(std::ceil(T / h - 1e-9));

    detail::TrajectoryBuilder builder;
    builder.init(core.n, h, S, delays, phi);
    matrix_t& values = builder.values();
    matrix_t& derivs = builder.derivs();

    const auto knot_or_history = [&](long q, int i) -> scalar_t {
        if (q >= 0) return values(q, i);
        return phi.eval(i, static_cast<scalar_t>(q) * h);
    };
    // Delayed value of component i at stage time (s - m_i + frac) * h, with
    // frac in {0, 1/2, 1}; every needed segment is already complete because
    // m_i >= 4.
    const auto delayed_at = [&](long s, int i, int stage) -> scalar_t {
        const long q = s - grid.delay_steps[static_cast<std::size_t>(i)];
        switch (stage) {
            case 0:
                return knot_or_history(q, i);
            case 2:
                return knot_or_history(q + 1, i);
            default: {
                if (q < 0) return phi.eval(i, (static_cast<scalar_t>(q) + 0.5) * h);
                // Hermite midpoint of segment [q, q+1].
                return 0.5 * (values(q, i) + values(q + 1, i)) +
                       0.125 * h * (derivs(q, i) - derivs(q + 1, i));
            }
        }
    };

    vector_t y(core.n), yd(core.n), k1(core.n), k2(core.n), k3(core.n), k4(core.n), ytmp(core.n);
    for (int i = 0; i < core.n; ++i) {
        y[i] = phi.eval(i, 0.0);
        yd[i] = delayed_at(0, i, 0);
    }
    values.row(0) = y.transpose();
    core.eval(0.0, y, yd, k1);
    derivs.row(0) = k1.transpose();

    for (long s = 0; s < S; ++s) {
        const scalar_t t = static_cast<scalar_t>(s) * h;
        y = values.row(s).transpose();
        k1 = derivs.row(s).transpose();

        for (int i = 0; i < core.n; ++i) yd[i] = delayed_at(s, i, 1);
        ytmp = y + (0.5 * h) * k1;
        core.eval(t + 0.5 * h, ytmp, yd, k2);
        ytmp = y + (0.5 * h) * k2;
        core.eval(t + 0.5 * h, ytmp, yd, k3);

        for (int i = 0; i < core.n; ++i) yd[i] = delayed_at(s, i, 2);
        ytmp = y + h * k3;
        core.eval(t + h, ytmp, yd, k4);

        ytmp = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (clamp) {
            for (int i = 0; i < core.n; ++i) {
                if (ytmp[i] < 0.0) {
                    builder.record_clamp(-ytmp[i]);
                    ytmp[i] = 0.0;
                }
            }
        }
        for (int i = 0; i < core.n; ++i) {
            if (!(std::abs(ytmp[i]) <= kOverflowLimit)) throw IntegrationOverflow(t + h);
        }
        values.row(s + 1) = ytmp.transpose();
        core.eval(t + h, ytmp, yd, k1);
        derivs.row(s + 1) = k1.transpose();
    }
    return std::move(builder.traj);
}

}  // namespace

Trajectory integrate(const DelaySystem& sys, const InitialHistory& phi, scalar_t T, scalar_t h) {
    check_structure(sys);
    const bool nonlinear = sys.nonlinearity.kind != NonlinearityKind::Linear;
    check_history(phi, sys.delays, nonlinear);
    RhsCore core;
    core.n = sys.n;
    core.d = &sys.d;
    core.a = &sys.a;
    core.beta = &sys.beta;
    core.nonlinear = nonlinear ? &sys : nullptr;
    return integrate_core(core, sys.delays, phi, T, h, nonlinear);
}

Trajectory integrate(const LinearDelaySystem& sys, const InitialHistory& phi, scalar_t T, scalar_t h) {
    check_structure(sys);
    check_history(phi, sys.delays, false);
    RhsCore core;
    core.n = sys.n;
    core.d = &sys.d;
    core.a = &sys.a;
    core.beta = &sys.beta;
    return integrate_core(core, sys.delays, phi, T, h, false);
}

scalar_t Trajectory::eval(scalar_t t, int i) const {
    if (i < 0 || i >= n_) throw std::out_of_range("trajectory eval: bad component");
    if (t < 0.0) {
        if (t < -delays_[static_cast<std::size_t>(i)] - 1e-9) {
            throw std::out_of_range("trajectory eval: time before -tau_i");
        }
        return history_.eval(i, t);
    }
    if (t > t_end_ + 1e-9) throw std::out_of_range("trajectory eval: time past the end");
    const scalar_t ratio = t / h_;
    const long nearest = std::lround(ratio);
    if (std::abs(ratio - static_cast<scalar_t>(nearest)) < 1e-9 && nearest >= 0 &&
        nearest <= steps_) {
        return values_(nearest, i);  // exact at knots
    }
    const long s = std::clamp(static_cast<long>(ratio), 0l, steps_ - 1);
    const scalar_t xi = ratio - static_cast<scalar_t>(s);
    return detail::hermite_eval(values_(s, i), derivs_(s, i), values_(s + 1, i), derivs_(s + 1, i), h_,
                                xi);
}

void Trajectory::minmax_on(int i, scalar_t lo, scalar_t hi, scalar_t& mn, scalar_t& mx) const {
    if (lo < 0.0) {
        history_.components[static_cast<std::size_t>(i)].minmax(
            std::max(lo, -delays_[static_cast<std::size_t>(i)]), std::min(hi, 0.0), mn, mx);
        lo = 0.0;
        if (hi < lo) return;
    }
    const long first = std::max<long>(0, static_cast<long>(lo / h_));
    for (long s = first; s < steps_; ++s) {
        const scalar_t seg_lo = static_cast<scalar_t>(s) * h_;
        if (seg_lo > hi) break;
        const scalar_t a = std::max(lo, seg_lo);
        const scalar_t b = std::min(hi, seg_lo + h_);
        if (!(a <= b)) continue;
        detail::hermite_minmax(values_(s, i), derivs_(s, i), values_(s + 1, i), derivs_(s + 1, i), h_,
                               a / h_ - static_cast<scalar_t>(s), b / h_ - static_cast<scalar_t>(s),
                               mn, mx);
    }
    if (hi >= t_end_) {
        mn = std::min(mn, values_(steps_, i));
        mx = std::max(mx, values_(steps_, i));
    }
}

scalar_t Trajectory::abs_max(int i, scalar_t lo, scalar_t hi) const {
    scalar_t mn = std::numeric_limits<scalar_t>::infinity();
    scalar_t mx = -mn;
    minmax_on(i, lo, hi, mn, mx);
    return std::max(std::abs(mn), std::abs(mx));
}

scalar_t Trajectory::min(int i, scalar_t lo, scalar_t hi) const {
    scalar_t mn = std::numeric_limits<scalar_t>::infinity();
    scalar_t mx = -mn;
    minmax_on(i, lo, hi, mn, mx);
    return mn;
}

scalar_t Trajectory::max(int i, scalar_t lo, scalar_t hi) const {
    scalar_t mn = std::numeric_limits<scalar_t>::infinity();
    scalar_t mx = -mn;
    minmax_on(i, lo, hi, mn, mx);
    return mx;
}

scalar_t segment_norm(const Trajectory& traj, scalar_t t) {
    if (t < 0.0) throw std::out_of_range("segment_norm: t must be >= 0");
    if (t > traj.t_end() + 1e-9) throw std::out_of_range("segment_norm: time past the end");
    scalar_t acc = 0.0;
    for (int i = 0; i < traj.n(); ++i) {
        acc += traj.abs_max(i, t - traj.delay(i), t);
    }
    return acc;
}

}  // namespace nicholson
