#pragma once

#include <string>
#include <vector>

#include "nicholson/signal.hpp"
#include "nicholson/types.hpp"

namespace nicholson {

enum class NonlinearityKind { Nicholson, MackeyGlass, Linear };

struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::Nicholson;
    scalar_t alpha = 1.0;  // Mackey-Glass exponent, >= 1

    bool operator==(const Nonlinearity&) const = default;
};

/**
 * Patch-structured delay system
 *
 *   y_i'(t) = -d_i(t) y_i(t) + sum_j a_ij(t) y_j(t) + beta_i(t) g_i(t, y_i(t - tau_i))
 *
 * with g of Nicholson type y e^{-c(t) y}, Mackey-Glass type y / (1 + c(t) y^alpha),
 * or plain linear g(y) = y. Coefficients are finite trigonometric sums; a_ii is
 * identically zero. The a(i,j) coefficient is the migration rate from patch j
 * into patch i.
 */
struct DelaySystem {
    int n = 0;
    std::vector<scalar_t> delays;            // tau_i > 0, size n
    std::vector<QuasiPeriodicSignal> d;      // size n
    std::vector<QuasiPeriodicSignal> a;      // row-major n*n
    std::vector<QuasiPeriodicSignal> beta;   // size n
    std::vector<QuasiPeriodicSignal> c;      // size n
    Nonlinearity nonlinearity;

    const QuasiPeriodicSignal& a_at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    QuasiPeriodicSignal& a_at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }

    bool operator==(const DelaySystem&) const = default;
};

/** Linearization along the null solution: z' = -d z + a z + beta z(t - tau). */
struct LinearDelaySystem {
    int n = 0;
    std::vector<scalar_t> delays;
    std::vector<QuasiPeriodicSignal> d;
    std::vector<QuasiPeriodicSignal> a;  // row-major n*n
    std::vector<QuasiPeriodicSignal> beta;

    const QuasiPeriodicSignal& a_at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    QuasiPeriodicSignal& a_at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }

    bool operator==(const LinearDelaySystem&) const = default;
};

enum class Hypothesis { A1, A2, A3, A4, A5, A6 };

struct HypothesisStatus {
    Hypothesis id = Hypothesis::A1;
    bool applicable = true;
    bool pass = false;
    bool certified_analytically = false;
    // Worst offender found on the grid (valid when pass is false, or as the
    // location of the certified minimum otherwise).
    scalar_t witness_t = 0.0;
    scalar_t witness_value = 0.0;
    int index_i = -1;  // patch (0-based), -1 when not applicable
    int index_j = -1;  // second patch for (a3), -1 otherwise
};

struct ValidationReport {
    std::vector<HypothesisStatus> hypotheses;  // a1..a6 in order
    scalar_t d0 = 0.0;  // certified inf of d_i, meaningful when (a2) passes
    scalar_t c0 = 0.0;  // certified inf of c_i, meaningful when (a5) passes
    scalar_t grid_step = 0.0;
    scalar_t horizon = 0.0;

    bool all_pass() const;
    const HypothesisStatus& status(Hypothesis h) const;
};

struct ValidationOptions {
    scalar_t grid_step = 0.01;
    scalar_t horizon = 1e3;
};

/// Checks hypotheses (a1)-(a6) on a dense grid with an analytic
/// amplitude-sum shortcut. Throws std::invalid_argument on malformed
/// structure (bad dimensions, nonpositive delays, a_ii not identically zero).
ValidationReport validate(const DelaySystem& sys, const ValidationOptions& opts = {});

/// Same checks minus (a5) for the linear family.
ValidationReport validate(const LinearDelaySystem& sys, const ValidationOptions& opts = {});

/// Structural invariants only (dimensions, delays, zero diagonal); used by
/// the integrator, which accepts systems outside hypotheses (a2)-(a6).
void check_structure(const DelaySystem& sys);
void check_structure(const LinearDelaySystem& sys);

/// Value of the birth nonlinearity g_i(t, y). Defined for all real y; the
/// model constraint y >= 0 is enforced at the rhs level.
scalar_t nonlinearity_value(const DelaySystem& sys, int i, scalar_t t, scalar_t y);

/// Right-hand side with caller-supplied delayed values y_delayed_i = y_i(t - tau_i).
/// Components of y and y_delayed must be >= -1e-12.
vector_t rhs(const DelaySystem& sys, scalar_t t, const vector_t& y, const vector_t& y_delayed);

/// Linear right-hand side; no sign restriction.
vector_t rhs(const LinearDelaySystem& sys, scalar_t t, const vector_t& z, const vector_t& z_delayed);

/// Linearization along the null solution; drops c and the nonlinearity.
LinearDelaySystem linearized(const DelaySystem& sys);

/// Restriction to an index set; coupling to excluded indices is dropped.
/// Indices are 0-based, must be nonempty, distinct and within range.
LinearDelaySystem subsystem(const LinearDelaySystem& sys, const std::vector<int>& indices);
DelaySystem subsystem(const DelaySystem& sys, const std::vector<int>& indices);

/// Hull translate of every coefficient by the given shift.
DelaySystem translate(const DelaySystem& sys, scalar_t shift);
LinearDelaySystem translate(const LinearDelaySystem& sys, scalar_t shift);

/// Relabeling of patches: new patch i is old patch perm[i].
DelaySystem permute(const DelaySystem& sys, const std::vector<int>& perm);

std::string to_string(Hypothesis h);

}  // namespace nicholson
