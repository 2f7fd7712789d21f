#include "nicholson/signal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nicholson {

QuasiPeriodicSignal::QuasiPeriodicSignal(scalar_t constant, std::vector<SignalTerm> terms)
    : constant_(constant), terms_(std::move(terms)) {
    if (!std::isfinite(constant_)) {
        throw std::invalid_argument("signal constant must be finite");
    }
    for (const SignalTerm& term : terms_) {
        if (!(term.frequency > 0.0) || !std::isfinite(term.frequency)) {
            throw std::invalid_argument("signal term frequency must be positive and finite");
        }
        if (!std::isfinite(term.amplitude) || !std::isfinite(term.phase)) {
            throw std::invalid_argument("signal term amplitude/phase must be finite");
        }
    }
}

scalar_t QuasiPeriodicSignal::eval(scalar_t t) const {
    scalar_t acc = constant_;
    for (const SignalTerm& term : terms_) {
        const scalar_t arg = term.frequency * t + term.phase;
        acc += term.amplitude * (term.waveform == Waveform::Sine ? std::sin(arg) : std::cos(arg));
    }
    return acc;
}

scalar_t QuasiPeriodicSignal::integral(scalar_t t0, scalar_t t1) const {
    scalar_t acc = constant_ * (t1 - t0);
    for (const SignalTerm& term : terms_) {
        const scalar_t a = term.frequency * t0 + term.phase;
        const scalar_t b = term.frequency * t1 + term.phase;
        const scalar_t mid = 0.5 * (a + b);
        const scalar_t half = 0.5 * (b - a);
        // Product forms of cos(a)-cos(b) and sin(b)-sin(a); no cancellation
        // when the endpoints are close or near a full period.
        if (term.waveform == Waveform::Sine) {
            acc += (2.0 * term.amplitude / term.frequency) * std::sin(mid) * std::sin(half);
        } else {
            acc += (2.0 * term.amplitude / term.frequency) * std::cos(mid) * std::sin(half);
        }
    }
    return acc;
}

scalar_t QuasiPeriodicSignal::hull_sup() const {
    scalar_t acc = constant_;
    for (const SignalTerm& term : terms_) acc += std::abs(term.amplitude);
    return acc;
}

scalar_t QuasiPeriodicSignal::hull_inf() const {
    scalar_t acc = constant_;
    for (const SignalTerm& term : terms_) acc -= std::abs(term.amplitude);
    return acc;
}

bool QuasiPeriodicSignal::is_identically_zero() const {
    if (constant_ != 0.0) return false;
    for (const SignalTerm& term : terms_) {
        if (term.amplitude != 0.0) return false;
    }
    return true;
}

scalar_t QuasiPeriodicSignal::derivative_bound() const {
    scalar_t acc = 0.0;
    for (const SignalTerm& term : terms_) acc += std::abs(term.amplitude * term.frequency);
    return acc;
}

scalar_t QuasiPeriodicSignal::second_derivative_bound() const {
    scalar_t acc = 0.0;
    for (const SignalTerm& term : terms_) {
        acc += std::abs(term.amplitude) * term.frequency * term.frequency;
    }
    return acc;
}

scalar_t QuasiPeriodicSignal::min_frequency(scalar_t fallback) const {
    scalar_t f = std::numeric_limits<scalar_t>::infinity();
    for (const SignalTerm& term : terms_) f = std::min(f, term.frequency);
    return std::isfinite(f) ? f : fallback;
}

QuasiPeriodicSignal translate(const QuasiPeriodicSignal& s, scalar_t shift) {
    std::vector<SignalTerm> terms = s.terms();
    for (SignalTerm& term : terms) term.phase += term.frequency * shift;
    return QuasiPeriodicSignal(s.constant(), std::move(terms));
}

QuasiPeriodicSignal operator+(const QuasiPeriodicSignal& a, const QuasiPeriodicSignal& b) {
    std::vector<SignalTerm> terms = a.terms();
    terms.insert(terms.end(), b.terms().begin(), b.terms().end());
    return QuasiPeriodicSignal(a.constant() + b.constant(), std::move(terms));
}

QuasiPeriodicSignal operator-(const QuasiPeriodicSignal& a, const QuasiPeriodicSignal& b) {
    return a + (-1.0 * b);
}

QuasiPeriodicSignal operator*(scalar_t k, const QuasiPeriodicSignal& s) {
    std::vector<SignalTerm> terms = s.terms();
    for (SignalTerm& term : terms) term.amplitude *= k;
    return QuasiPeriodicSignal(k * s.constant(), std::move(terms));
}

QuasiPeriodicSignal conley_miller(int N) {
    if (N < 1) throw std::invalid_argument("conley_miller: N must be >= 1");
    std::vector<SignalTerm> terms;
    terms.reserve(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        SignalTerm term;
        term.amplitude = 1.0 / (static_cast<scalar_t>(n) * static_cast<scalar_t>(n));
        term.frequency = std::ldexp(1.0, -n);  // 2^-n
        term.phase = 0.0;
        term.waveform = Waveform::Sine;
        terms.push_back(term);
    }
    return QuasiPeriodicSignal(0.0, std::move(terms));
}

scalar_t conley_miller_integral_sup_bound(int N) {
    if (N < 1) throw std::invalid_argument("conley_miller_integral_sup_bound: N must be >= 1");
    scalar_t acc = 0.0;
    for (int n = 1; n <= N; ++n) {
        acc += std::ldexp(1.0, n + 1) / (static_cast<scalar_t>(n) * static_cast<scalar_t>(n));
    }
    return acc;
}

}  // namespace nicholson
