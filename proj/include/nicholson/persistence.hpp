#pragma once

#include <map>
#include <optional>
#include <vector>

#include "nicholson/lyapunov.hpp"
#include "nicholson/model.hpp"
#include "nicholson/structure.hpp"

namespace nicholson {

enum class Answer { Yes, No, Uncertain };

/**
 * Persistence verdict from the block exponents: uniform persistence at 0 is
 * decided by the exponents over I, strict persistence at 0 by those over J.
 * An answer is only yes/no when every deciding exponent has converged and
 * clears the sign margin; boundary cases surface as uncertain.
 */
struct PersistenceVerdict {
    Answer u0 = Answer::Uncertain;
    Answer s0 = Answer::Uncertain;
    BlockStructure structure;
    std::map<int, LyapunovEstimate> exponents;
    scalar_t margin_tol = 0.0;
    // Smallest |exponent| over the deciding set, with the block attaining it.
    scalar_t u0_margin = 0.0;
    int u0_decisive_block = -1;
    scalar_t s0_margin = 0.0;
    int s0_decisive_block = -1;

    bool operator==(const PersistenceVerdict&) const = default;
};

struct ClassifyOptions {
    scalar_t margin_tol = 5e-3;
    LyapunovOptions lyapunov;
    ValidationOptions validation;
};

/// Sign decision for one deciding index set; pure function of the estimates.
Answer decide(const std::map<int, LyapunovEstimate>& exponents, const std::vector<int>& deciding,
              scalar_t margin_tol, scalar_t& margin, int& decisive_block);

/// Full pipeline: validate, linearize, condense, per-block exponents, I/J rules.
/// Throws ValidationFailure when hypotheses fail.
PersistenceVerdict classify(const DelaySystem& sys, const ClassifyOptions& opts = {});

struct HistoryReport {
    std::vector<scalar_t> tail_min;  // per component, inf over [T - W, T]
    std::vector<scalar_t> tail_max;  // per component, sup over [T - W, T]
    scalar_t u0_witness = 0.0;       // min over components of tail_min
    scalar_t s0_witness = 0.0;       // max over components of tail_min
    bool strongly_positive_start = false;  // phi(0) >> 0
    bool positive_start = false;           // phi(0) > 0
    long clamp_events = 0;
    scalar_t max_clamp_magnitude = 0.0;
};

enum class Consistency { Consistent, Inconsistent, NotEvaluated };

struct EmpiricalReport {
    scalar_t T = 0.0;
    scalar_t W = 0.0;
    std::vector<HistoryReport> histories;
    std::optional<PersistenceVerdict> verdict;
    Consistency consistency = Consistency::NotEvaluated;
};

struct EmpiricalOptions {
    scalar_t T = 200.0;
    scalar_t W = 50.0;   // tail window length, < T
    scalar_t h = -1.0;   // <= 0: default step
    scalar_t u0_floor = 1e-4;   // expected tail floor under a yes verdict
    scalar_t decay_ceiling = 1e-6;  // expected tail ceiling under no/no
    bool run_classify = true;
    ClassifyOptions classify;
};

/// The spec-default probe set: constants spanning four orders of magnitude
/// plus one oscillatory history.
std::vector<InitialHistory> default_probe_histories(const DelaySystem& sys);

/**
 * Integrates each history to T and reports tail statistics over [T - W, T],
 * plus a consistency flag against the sign predictions of classify.
 */
EmpiricalReport empirical_check(const DelaySystem& sys, const std::vector<InitialHistory>& histories,
                                const EmpiricalOptions& opts = {});

enum class ScalarTrend { PersistentTrend, Recurrent, Indeterminate };

/**
 * Diagnostic for the scalar equation y' = a(t) y: uniform persistence is
 * equivalent to F(t) = integral of a over [0, t] diverging to +infinity.
 * The verdict is recurrent when F returns below recurrence_tol on the last
 * half of the checkpoints, persistent-trend when the fitted slope of F is
 * positive, and indeterminate otherwise.
 */
struct ScalarCriterionReport {
    std::vector<scalar_t> checkpoints;
    std::vector<scalar_t> F;            // F at each checkpoint
    std::vector<scalar_t> suffix_min;   // running minimum after each checkpoint
    scalar_t ls_slope = 0.0;            // least-squares slope over the last half
    scalar_t min_last_half = 0.0;
    scalar_t recurrence_tol = 0.1;
    ScalarTrend verdict = ScalarTrend::Indeterminate;
};

ScalarCriterionReport scalar_criterion(const QuasiPeriodicSignal& a,
                                       const std::vector<scalar_t>& checkpoints,
                                       scalar_t recurrence_tol = 0.1);

std::string to_string(Answer a);
std::string to_string(ScalarTrend t);
std::string to_string(Consistency c);
std::string to_string(ConvergenceStatus s);

}  // namespace nicholson
