#pragma once

#include <map>

#include "nicholson/integrator.hpp"
#include "nicholson/model.hpp"
#include "nicholson/structure.hpp"

namespace nicholson {

/// Thrown by analysis entry points when hypotheses (a1)-(a6) fail.
struct ValidationFailure : std::runtime_error {
    explicit ValidationFailure(ValidationReport r);
    ValidationReport report;
};

enum class SegmentNormKind {
    SupSum,  // sum_i sup |phi_i| over the delay window (phase-space norm)
    L2       // sqrt(|phi(0)|^2 + integral of |phi|^2): equivalent norm, diagnostic
};

enum class ConvergenceStatus { Converged, Uncertain };

struct LyapunovOptions {
    scalar_t T = -1.0;              // <= 0: max(1000, 100 * max tau)
    scalar_t h = -1.0;              // <= 0: default_step
    scalar_t renorm_period = -1.0;  // <= 0: max(1, max tau); snapped to a step multiple
    scalar_t slope_tol = 1e-3;
    scalar_t T_cap = 1e4;           // horizon cap when extending
    bool extend = true;             // double T until converged or capped
    SegmentNormKind norm = SegmentNormKind::SupSum;
    const InitialHistory* initial = nullptr;  // default: the all-ones map
};

struct LyapunovEstimate {
    scalar_t value = 0.0;  // log-norm growth rate per unit time
    scalar_t T = 0.0;      // horizon actually used
    std::vector<scalar_t> window_slopes;  // finite-window estimates, short to long
    long renorm_count = 0;
    ConvergenceStatus status = ConvergenceStatus::Uncertain;
    scalar_t dispersion = 0.0;  // max pairwise difference of the window slopes

    bool operator==(const LyapunovEstimate&) const = default;
};

/**
 * Top Lyapunov exponent of a linear delay system from the single trajectory
 * started at the all-ones map: value = log ||z_T|| / T accumulated through
 * periodic renormalization of the solution segment. Convergence is declared
 * from the dispersion of finite-window slopes, never from a fixed horizon.
 */
LyapunovEstimate top_exponent(const LinearDelaySystem& lin, const LyapunovOptions& opts = {});
LyapunovEstimate top_exponent(const LinearDelaySystem& lin, scalar_t T, scalar_t renorm_period);

/**
 * Unique real root of lambda + d = beta e^{-lambda tau} (d, beta, tau > 0),
 * by bisection to 1e-10. For beta > 0 this is the rightmost characteristic
 * root of z' = -d z + beta z(t - tau) and equals its top exponent.
 */
scalar_t characteristic_root(scalar_t d, scalar_t beta, scalar_t tau);

/// Exponent of every irreducible diagonal block of the linearized system;
/// keys are block indices in the canonical (sources first) order.
std::map<int, LyapunovEstimate> block_exponents(const LinearDelaySystem& lin,
                                                const BlockStructure& structure,
                                                const LyapunovOptions& opts = {});

/// Validates the system, linearizes, condenses and runs every block.
std::map<int, LyapunovEstimate> block_exponents(const DelaySystem& sys,
                                                const LyapunovOptions& opts = {});

}  // namespace nicholson
