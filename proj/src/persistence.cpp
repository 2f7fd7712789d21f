#include "nicholson/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nicholson {

Answer decide(const std::map<int, LyapunovEstimate>& exponents, const std::vector<int>& deciding,
              scalar_t margin_tol, scalar_t& margin, int& decisive_block) {
    margin = std::numeric_limits<scalar_t>::infinity();
    decisive_block = -1;
    for (int j : deciding) {
        const LyapunovEstimate& est = exponents.at(j);
        if (std::abs(est.value) < margin) {
            margin = std::abs(est.value);
            decisive_block = j;
        }
    }
    // A single converged negative exponent settles "no"; "yes" needs every
    // deciding exponent converged and clear of the margin.
    bool all_yes = true;
    for (int j : deciding) {
        const LyapunovEstimate& est = exponents.at(j);
        if (est.status == ConvergenceStatus::Converged && est.value < -margin_tol) {
            return Answer::No;
        }
        if (est.status != ConvergenceStatus::Converged || !(est.value > margin_tol)) {
            all_yes = false;
        }
    }
    return all_yes ? Answer::Yes : Answer::Uncertain;
}

PersistenceVerdict classify(const DelaySystem& sys, const ClassifyOptions& opts) {
    ValidationReport report = validate(sys, opts.validation);
    if (!report.all_pass()) throw ValidationFailure(std::move(report));

    PersistenceVerdict verdict;
    verdict.margin_tol = opts.margin_tol;
    const LinearDelaySystem lin = linearized(sys);
    verdict.structure = condense(zero_pattern(lin));
    verdict.exponents = block_exponents(lin, verdict.structure, opts.lyapunov);
    verdict.u0 = decide(verdict.exponents, verdict.structure.I, opts.margin_tol, verdict.u0_margin,
                        verdict.u0_decisive_block);
    verdict.s0 = decide(verdict.exponents, verdict.structure.J, opts.margin_tol, verdict.s0_margin,
                        verdict.s0_decisive_block);
    return verdict;
}

std::vector<InitialHistory> default_probe_histories(const DelaySystem& sys) {
    std::vector<InitialHistory> histories;
    for (scalar_t v : {0.01, 0.1, 1.0, 10.0}) {
        histories.push_back(InitialHistory::constant(sys.n, v));
    }
    // One oscillatory strongly positive history, sampled per component.
    InitialHistory osc;
    for (int i = 0; i < sys.n; ++i) {
        const scalar_t tau = sys.delays[static_cast<std::size_t>(i)];
        std::vector<scalar_t> grid;
        std::vector<scalar_t> values;
        const int cells = 32;
        for (int k = 0; k <= cells; ++k) {
            const scalar_t t = -tau + tau * static_cast<scalar_t>(k) / cells;
            grid.push_back(t);
            values.push_back(0.5 + 0.4 * std::sin(3.0 * t + 0.7 * i));
        }
        osc.components.push_back(ComponentHistory::samples(std::move(grid), std::move(values)));
    }
    histories.push_back(std::move(osc));
    return histories;
}

EmpiricalReport empirical_check(const DelaySystem& sys, const std::vector<InitialHistory>& histories,
                                const EmpiricalOptions& opts) {
    if (!(opts.W > 0.0) || !(opts.W < opts.T)) {
        throw std::invalid_argument("empirical_check: need 0 < W < T");
    }
    ValidationReport report = validate(sys);
    if (!report.all_pass()) throw ValidationFailure(std::move(report));

    EmpiricalReport out;
    out.T = opts.T;
    out.W = opts.W;
    if (opts.run_classify) out.verdict = classify(sys, opts.classify);

    for (const InitialHistory& phi : histories) {
        HistoryReport hr;
        hr.strongly_positive_start = true;
        hr.positive_start = false;
        for (int i = 0; i < sys.n; ++i) {
            const scalar_t v0 = phi.eval(i, 0.0);
            hr.strongly_positive_start = hr.strongly_positive_start && v0 > 0.0;
            hr.positive_start = hr.positive_start || v0 > 0.0;
        }
        const Trajectory traj = integrate(sys, phi, opts.T, opts.h);
        const scalar_t lo = traj.t_end() - opts.W;
        hr.tail_min.resize(static_cast<std::size_t>(sys.n));
        hr.tail_max.resize(static_cast<std::size_t>(sys.n));
        for (int i = 0; i < sys.n; ++i) {
            hr.tail_min[static_cast<std::size_t>(i)] = traj.min(i, lo, traj.t_end());
            hr.tail_max[static_cast<std::size_t>(i)] = traj.max(i, lo, traj.t_end());
        }
        hr.u0_witness = *std::min_element(hr.tail_min.begin(), hr.tail_min.end());
        hr.s0_witness = *std::max_element(hr.tail_min.begin(), hr.tail_min.end());
        hr.clamp_events = traj.clamp_events();
        hr.max_clamp_magnitude = traj.max_clamp_magnitude();
        out.histories.push_back(std::move(hr));
    }

    if (out.verdict.has_value()) {
        const PersistenceVerdict& v = *out.verdict;
        bool evaluated = false;
        bool consistent = true;
        for (const HistoryReport& hr : out.histories) {
            if (v.u0 == Answer::Yes && hr.strongly_positive_start) {
                evaluated = true;
                consistent = consistent && hr.u0_witness >= opts.u0_floor;
            }
            if (v.u0 == Answer::No && v.s0 == Answer::No) {
                evaluated = true;
                const scalar_t worst =
                    *std::max_element(hr.tail_max.begin(), hr.tail_max.end());
                consistent = consistent && worst < opts.decay_ceiling;
            }
        }
        out.consistency = evaluated
                              ? (consistent ? Consistency::Consistent : Consistency::Inconsistent)
                              : Consistency::NotEvaluated;
    }
    return out;
}

ScalarCriterionReport scalar_criterion(const QuasiPeriodicSignal& a,
                                       const std::vector<scalar_t>& checkpoints,
                                       scalar_t recurrence_tol) {
    if (checkpoints.empty()) throw std::invalid_argument("scalar_criterion: no checkpoints");
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        if (!(checkpoints[k] > 0.0) || (k > 0 && !(checkpoints[k] > checkpoints[k - 1]))) {
            throw std::invalid_argument("scalar_criterion: checkpoints must be positive and increasing");
        }
    }
    ScalarCriterionReport out;
    out.checkpoints = checkpoints;
    out.recurrence_tol = recurrence_tol;
    out.F.reserve(checkpoints.size());
    for (scalar_t t : checkpoints) out.F.push_back(a.integral(0.0, t));

    out.suffix_min.assign(out.F.size(), 0.0);
    scalar_t running = std::numeric_limits<scalar_t>::infinity();
    for (std::size_t k = out.F.size(); k-- > 0;) {
        running = std::min(running, out.F[k]);
        out.suffix_min[k] = running;
    }

    const std::size_t half = out.F.size() / 2;
    out.min_last_half = *std::min_element(out.F.begin() + static_cast<long>(half), out.F.end());

    // Least-squares slope of F over the last half of the checkpoints.
    scalar_t st = 0.0, sf = 0.0, stt = 0.0, stf = 0.0;
    const scalar_t count = static_cast<scalar_t>(out.F.size() - half);
    for (std::size_t k = half; k < out.F.size(); ++k) {
        st += checkpoints[k];
        sf += out.F[k];
        stt += checkpoints[k] * checkpoints[k];
        stf += checkpoints[k] * out.F[k];
    }
    const scalar_t denom = count * stt - st * st;
    out.ls_slope = denom != 0.0 ? (count * stf - st * sf) / denom : 0.0;

    if (out.min_last_half < recurrence_tol) {
        out.verdict = ScalarTrend::Recurrent;
    } else if (out.ls_slope > 0.0) {
        out.verdict = ScalarTrend::PersistentTrend;
    } else {
        out.verdict = ScalarTrend::Indeterminate;
    }
    return out;
}

std::string to_string(Answer a) {
    switch (a) {
        case Answer::Yes: return "yes";
        case Answer::No: return "no";
        case Answer::Uncertain: return "uncertain";
    }
    return "?";
}

std::string to_string(ScalarTrend t) {
    switch (t) {
        case ScalarTrend::PersistentTrend: return "persistent-trend";
        case ScalarTrend::Recurrent: return "recurrent";
        case ScalarTrend::Indeterminate: return "indeterminate";
    }
    return "?";
}

std::string to_string(Consistency c) {
    switch (c) {
        case Consistency::Consistent: return "consistent";
        case Consistency::Inconsistent: return "inconsistent";
        case Consistency::NotEvaluated: return "not-evaluated";
    }
    return "?";
}

std::string to_string(ConvergenceStatus s) {
    return s == ConvergenceStatus::Converged ? "converged" : "uncertain";
}

}  // namespace nicholson
