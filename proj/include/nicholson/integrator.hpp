#pragma once

#include <stdexcept>
#include <vector>

#include "nicholson/model.hpp"
#include "nicholson/types.hpp"

namespace nicholson {

/** Initial data for one component on [-tau_i, 0]. */
class ComponentHistory {
  public:
    static ComponentHistory constant(scalar_t value);
    /// Cubic interpolation through (grid, values); grid strictly increasing.
    static ComponentHistory samples(std::vector<scalar_t> grid, std::vector<scalar_t> values);

    bool is_constant() const { return constant_kind_; }
    scalar_t eval(scalar_t t) const;
    /// Extrema of the interpolant over [lo, hi] (clipped to the grid span).
    void minmax(scalar_t lo, scalar_t hi, scalar_t& mn, scalar_t& mx) const;
    scalar_t min_value() const;
    scalar_t coverage_from() const;  // leftmost defined time (-inf for constants)
    scalar_t coverage_to() const;    // rightmost defined time (+inf for constants)

  private:
    bool constant_kind_ = true;
    scalar_t value_ = 0.0;
    std::vector<scalar_t> grid_;
    std::vector<scalar_t> values_;
    std::vector<scalar_t> slopes_;
};

struct InitialHistory {
    std::vector<ComponentHistory> components;

    static InitialHistory constant(int n, scalar_t value);
    static InitialHistory constants(const std::vector<scalar_t>& values);

    int size() const { return static_cast<int>(components.size()); }
    scalar_t eval(int i, scalar_t t) const { return components[static_cast<std::size_t>(i)].eval(t); }
};

struct IntegrationOverflow : std::runtime_error {
    explicit IntegrationOverflow(scalar_t time);
    scalar_t t;
};

/** Fixed step grid with every delay an exact multiple of the step. */
struct StepGrid {
    scalar_t h = 0.0;
    std::vector<long> delay_steps;  // tau_i / h
};

/// Largest step <= h_request such that every delay is an integer multiple of
/// the step; throws std::runtime_error when no compatible step is found.
StepGrid fit_step_to_delays(const std::vector<scalar_t>& delays, scalar_t h_request);

/// Default step: min(0.01, min tau_i / 8).
scalar_t default_step(const std::vector<scalar_t>& delays);

namespace detail {
struct TrajectoryBuilder;
}

/**
 * Dense solution history: cubic Hermite segments (value + derivative at the
 * knots) over [0, t_end], backed by the initial history for t < 0.
 * Immutable after construction.
 */
class Trajectory {
  public:
    int n() const { return n_; }
    scalar_t step() const { return h_; }
    long steps() const { return steps_; }
    scalar_t t_end() const { return t_end_; }
    scalar_t delay(int i) const { return delays_[static_cast<std::size_t>(i)]; }
    const std::vector<scalar_t>& delays() const { return delays_; }
    long clamp_events() const { return clamp_events_; }
    scalar_t max_clamp_magnitude() const { return max_clamp_magnitude_; }
    const matrix_t& knot_values() const { return values_; }
    const InitialHistory& initial_history() const { return history_; }

    /// Value of component i at time t in [-tau_i, t_end]; exact at knots.
    scalar_t eval(scalar_t t, int i) const;

    /// max over [lo, hi] of |component i|, exact per cubic segment.
    scalar_t abs_max(int i, scalar_t lo, scalar_t hi) const;
    /// min over [lo, hi] of component i.
    scalar_t min(int i, scalar_t lo, scalar_t hi) const;
    /// max over [lo, hi] of component i.
    scalar_t max(int i, scalar_t lo, scalar_t hi) const;

  private:
    friend struct detail::TrajectoryBuilder;

    void minmax_on(int i, scalar_t lo, scalar_t hi, scalar_t& mn, scalar_t& mx) const;

    int n_ = 0;
    scalar_t h_ = 0.0;
    long steps_ = 0;
    scalar_t t_end_ = 0.0;
    std::vector<scalar_t> delays_;
    matrix_t values_;  // (steps + 1) x n
    matrix_t derivs_;
    InitialHistory history_;
    long clamp_events_ = 0;
    scalar_t max_clamp_magnitude_ = 0.0;
};

/**
 * Method of steps with classical RK4; delayed values are read from the cubic
 * Hermite interpolant of the already computed history (delays >= 4h keep the
 * scheme explicit). For nonlinear kinds the initial data must be nonnegative
 * and negative round-off is clamped at 0 with the events counted.
 *
 * h <= min tau_i / 4 required; pass h <= 0 for the default step. The step
 * actually used (after fitting to the delays) is Trajectory::step().
 */
Trajectory integrate(const DelaySystem& sys, const InitialHistory& phi, scalar_t T, scalar_t h = -1.0);
Trajectory integrate(const LinearDelaySystem& sys, const InitialHistory& phi, scalar_t T, scalar_t h = -1.0);

/// Phase-space norm of the solution segment at time t: sum_i max over
/// [t - tau_i, t] of |y_i|.
scalar_t segment_norm(const Trajectory& traj, scalar_t t);

namespace detail {

/// Hermite basis evaluation on a segment of width h, local coordinate xi in [0, 1].
scalar_t hermite_eval(scalar_t y0, scalar_t m0, scalar_t y1, scalar_t m1, scalar_t h, scalar_t xi);

/// Extrema of the Hermite cubic over xi in [xi_lo, xi_hi].
void hermite_minmax(scalar_t y0, scalar_t m0, scalar_t y1, scalar_t m1, scalar_t h,
                    scalar_t xi_lo, scalar_t xi_hi, scalar_t& mn, scalar_t& mx);

}  // namespace detail

}  // namespace nicholson
