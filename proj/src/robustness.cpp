#include "nicholson/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nicholson {

namespace {

constexpr scalar_t kTwoPi = 6.283185307179586476925286766559;

/// Sampling step fine enough that a true sub-tolerance dip cannot be missed:
/// |F'| = |f| <= |constant| + sum |amplitudes|.
scalar_t scan_step(const QuasiPeriodicSignal& f, scalar_t T, scalar_t tol) {
    const scalar_t sum_amp = f.hull_sup() - f.constant();
    const scalar_t slope = std::max(1.0, std::abs(f.constant()) + sum_amp);
    scalar_t step = 0.25 * tol / slope;
    step = std::min(step, T / 1000.0);
    return std::max(step, T / 4e6);  // cap the work for very long horizons
}

}  // namespace

scalar_t min_integral_second_half(const QuasiPeriodicSignal& f, scalar_t shift, scalar_t T) {
    if (!(T > 0.0)) throw std::invalid_argument("min_integral_second_half: T must be positive");
    const QuasiPeriodicSignal g = translate(f, shift);
    const scalar_t step = scan_step(f, T, 0.1);
    const long first = static_cast<long>(std::floor(0.5 * T / step));
    const long last = static_cast<long>(std::ceil(T / step));
    scalar_t mn = std::numeric_limits<scalar_t>::infinity();
    for (long k = first; k <= last; ++k) {
        const scalar_t t = std::min(static_cast<scalar_t>(k) * step, T);
        mn = std::min(mn, g.integral(0.0, t));
    }
    return mn;
}

HullDemoReport hull_demo(int N, scalar_t T, const std::vector<scalar_t>& shifts,
                         scalar_t recurrence_tol) {
    if (N < 1) throw std::invalid_argument("hull_demo: N must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("hull_demo: T must be positive");
    const QuasiPeriodicSignal f = conley_miller(N);

    HullDemoReport report;
    report.N = N;
    report.T = T;
    report.recurrence_tol = recurrence_tol;

    // Base growth profile on a coarse grid plus a fine minimum over [1, T].
    const int profile_points = 400;
    for (int k = 0; k <= profile_points; ++k) {
        const scalar_t t = T * static_cast<scalar_t>(k) / profile_points;
        report.base_checkpoints.push_back(t);
        report.base_F.push_back(f.integral(0.0, t));
    }
    const scalar_t step = scan_step(f, T, recurrence_tol);
    scalar_t mn = std::numeric_limits<scalar_t>::infinity();
    for (scalar_t t = 1.0; t <= T; t += step) mn = std::min(mn, f.integral(0.0, t));
    mn = std::min(mn, f.integral(0.0, T));
    report.base_min_positive_range = mn;

    int recurrent = 0;
    for (scalar_t sigma : shifts) {
        TranslateResult tr;
        tr.shift = sigma;
        tr.min_F_second_half = min_integral_second_half(f, sigma, T);
        tr.recurrent = tr.min_F_second_half < recurrence_tol;
        if (tr.recurrent) ++recurrent;
        report.translates.push_back(tr);
    }
    report.recurrent_fraction =
        shifts.empty() ? 0.0 : static_cast<scalar_t>(recurrent) / static_cast<scalar_t>(shifts.size());
    return report;
}

RecurrenceScanResult recurrence_scan(const QuasiPeriodicSignal& f, scalar_t T, int num_shifts,
                                     std::uint64_t seed, scalar_t recurrence_tol) {
    if (num_shifts < 1) throw std::invalid_argument("recurrence_scan: num_shifts must be >= 1");
    RecurrenceScanResult result;
    result.seed = seed;
    std::mt19937_64 rng(seed);
    // One period of the slowest mode parameterizes the distinct translates.
    const scalar_t span = kTwoPi / f.min_frequency(1.0);
    std::uniform_real_distribution<scalar_t> dist(0.0, span);
    int recurrent = 0;
    for (int k = 0; k < num_shifts; ++k) {
        TranslateResult tr;
        tr.shift = dist(rng);
        tr.min_F_second_half = min_integral_second_half(f, tr.shift, T);
        tr.recurrent = tr.min_F_second_half < recurrence_tol;
        if (tr.recurrent) ++recurrent;
        result.translates.push_back(tr);
    }
    result.recurrent_fraction = static_cast<scalar_t>(recurrent) / static_cast<scalar_t>(num_shifts);
    return result;
}

}  // namespace nicholson
