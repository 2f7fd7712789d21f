#pragma once

#include <vector>

#include "nicholson/types.hpp"

namespace nicholson {

enum class Waveform { Sine, Cosine };

/** One trigonometric mode: amplitude * waveform(frequency * t + phase). */
struct SignalTerm {
    scalar_t amplitude = 0.0;
    scalar_t frequency = 1.0;  // rad per unit time, > 0
    scalar_t phase = 0.0;      // rad
    Waveform waveform = Waveform::Sine;

    bool operator==(const SignalTerm&) const = default;
};

/**
 * Almost periodic coefficient represented as a finite trigonometric sum
 *
 *   s(t) = constant + sum_k amplitude_k * wf_k(frequency_k * t + phase_k).
 *
 * The class admits exact antiderivatives and exact hull translates, which is
 * what the analysis downstream relies on. Immutable after construction.
 */
class QuasiPeriodicSignal {
  public:
    QuasiPeriodicSignal() = default;
    explicit QuasiPeriodicSignal(scalar_t constant) : constant_(constant) {}
    QuasiPeriodicSignal(scalar_t constant, std::vector<SignalTerm> terms);

    scalar_t constant() const { return constant_; }
    const std::vector<SignalTerm>& terms() const { return terms_; }

    /// Pointwise value at time t.
    scalar_t eval(scalar_t t) const;

    /// Exact integral over [t0, t1] via the closed-form antiderivative.
    scalar_t integral(scalar_t t0, scalar_t t1) const;

    /// constant + sum |amplitude|: the supremum over the hull closure, an
    /// upper bound for the supremum over the real line.
    scalar_t hull_sup() const;

    /// constant - sum |amplitude|: lower bound counterpart of hull_sup.
    scalar_t hull_inf() const;

    bool is_identically_zero() const;

    /// Lipschitz bound sum |amplitude * frequency| on the oscillating part.
    scalar_t derivative_bound() const;

    /// Curvature bound sum |amplitude * frequency^2|.
    scalar_t second_derivative_bound() const;

    /// Smallest term frequency; fallback when there are no terms.
    scalar_t min_frequency(scalar_t fallback = 1.0) const;

    bool operator==(const QuasiPeriodicSignal&) const = default;

  private:
    scalar_t constant_ = 0.0;
    std::vector<SignalTerm> terms_;
};

/// Time shift on the hull: eval(translate(s, shift), t) == eval(s, t + shift).
QuasiPeriodicSignal translate(const QuasiPeriodicSignal& s, scalar_t shift);

QuasiPeriodicSignal operator+(const QuasiPeriodicSignal& a, const QuasiPeriodicSignal& b);
QuasiPeriodicSignal operator-(const QuasiPeriodicSignal& a, const QuasiPeriodicSignal& b);
QuasiPeriodicSignal operator*(scalar_t k, const QuasiPeriodicSignal& s);

/**
 * Truncated zero-mean construction f_N(t) = sum_{n=1..N} n^-2 sin(2^-n t).
 *
 * Every truncation has zero mean exactly, while the running integral
 * reaches levels that grow without bound in N.
 */
QuasiPeriodicSignal conley_miller(int N);

/// sum_{n<=N} 2^{n+1}/n^2: per-term supremum bound for the running integral
/// of conley_miller(N); strictly increasing and unbounded in N.
scalar_t conley_miller_integral_sup_bound(int N);

}  // namespace nicholson
