#pragma once

#include <cstdint>
#include <vector>

#include "nicholson/signal.hpp"

namespace nicholson {

/**
 * Hull translation study for y' = f(t) y with f zero-mean almost periodic:
 * the base equation keeps its running integral F positive while translated
 * copies return near zero, losing uniform persistence in practice. The
 * recurrence flag is a finite-horizon approximation of "recurrent at
 * infinity": min of F_sigma over the second half of [0, T] below the
 * tolerance.
 */
struct TranslateResult {
    scalar_t shift = 0.0;
    scalar_t min_F_second_half = 0.0;
    bool recurrent = false;
};

struct HullDemoReport {
    int N = 0;
    scalar_t T = 0.0;
    scalar_t recurrence_tol = 0.1;
    std::vector<scalar_t> base_checkpoints;  // times of the base profile
    std::vector<scalar_t> base_F;            // F(t) at those times
    scalar_t base_min_positive_range = 0.0;  // min of F over [1, T] on the grid
    std::vector<TranslateResult> translates;
    scalar_t recurrent_fraction = 0.0;       // over the translates list
};

struct RecurrenceScanResult {
    std::vector<TranslateResult> translates;
    scalar_t recurrent_fraction = 0.0;
    std::uint64_t seed = 0;
};

/// min over the sampled second half [T/2, T] of integral(f_sigma, 0, t),
/// with f_sigma the hull translate of f by sigma.
scalar_t min_integral_second_half(const QuasiPeriodicSignal& f, scalar_t shift, scalar_t T);

/// Truncated zero-mean demo: f = conley_miller(N), closed-form F along a
/// dense grid, one recurrence flag per requested shift.
HullDemoReport hull_demo(int N, scalar_t T, const std::vector<scalar_t>& shifts,
                         scalar_t recurrence_tol = 0.1);

/// Seeded scan over shifts drawn uniformly from one period of the slowest
/// mode; deterministic and bit-exact for equal seeds.
RecurrenceScanResult recurrence_scan(const QuasiPeriodicSignal& f, scalar_t T, int num_shifts,
                                     std::uint64_t seed, scalar_t recurrence_tol = 0.1);

}  // namespace nicholson
