#include "nicholson/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nicholson {

namespace {

constexpr scalar_t kNonnegTolerance = 1e-12;

void check_common(int n, const std::vector<scalar_t>& delays,
                  const std::vector<QuasiPeriodicSignal>& d,
                  const std::vector<QuasiPeriodicSignal>& a,
                  const std::vector<QuasiPeriodicSignal>& beta) {
    if (n < 1) throw std::invalid_argument("system dimension must be >= 1");
    const auto un = static_cast<std::size_t>(n);
    if (delays.size() != un || d.size() != un || beta.size() != un || a.size() != un * un) {
        throw std::invalid_argument("coefficient array sizes inconsistent with n");
    }
    for (scalar_t tau : delays) {
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            throw std::invalid_argument("delays must be strictly positive and finite");
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!a[static_cast<std::size_t>(i) * n + i].is_identically_zero()) {
            throw std::invalid_argument("diagonal migration coefficients a_ii must be identically zero");
        }
    }
}

struct LowerBound {
    scalar_t bound = 0.0;   // certified inf over all t
    bool analytic = false;  // certified from amplitude sums alone
    scalar_t min_t = 0.0;   // grid argmin (0 when analytic)
    scalar_t min_value = 0.0;
};

/// Certified lower bound of a trig-sum signal: the amplitude-sum bound when
/// conclusive, otherwise a grid minimum reduced by a Lipschitz safety margin.
/// `strict` states whether the caller needs the bound to be > 0 or >= 0; it
/// only controls whether the analytic shortcut suffices.
LowerBound certified_lower_bound(const QuasiPeriodicSignal& s, bool strict,
                                 const ValidationOptions& opts) {
    LowerBound out;
    const scalar_t analytic = s.hull_inf();
    out.min_value = analytic;
    if (strict ? (analytic > 0.0) : (analytic >= 0.0)) {
        out.bound = analytic;
        out.analytic = true;
        return out;
    }
    const scalar_t margin = 0.5 * s.derivative_bound() * opts.grid_step;
    scalar_t min_value = std::numeric_limits<scalar_t>::infinity();
    const long steps = static_cast<long>(std::ceil(opts.horizon / opts.grid_step));
    for (long k = 0; k <= steps; ++k) {
        min_value = std::min(min_value, s.eval(static_cast<scalar_t>(k) * opts.grid_step));
    }
    // Witness: the first grid point within the discretization window of the
    // minimum, so equal-depth minima report the earliest occurrence.
    const scalar_t tie_window =
        s.second_derivative_bound() * opts.grid_step * opts.grid_step +
        1e-12 * std::max(1.0, std::abs(min_value));
    scalar_t min_t = 0.0;
    for (long k = 0; k <= steps; ++k) {
        const scalar_t t = static_cast<scalar_t>(k) * opts.grid_step;
        if (s.eval(t) <= min_value + tie_window) {
            min_t = t;
            break;
        }
    }
    out.bound = std::max(analytic, min_value - margin);
    out.min_t = min_t;
    out.min_value = min_value;
    return out;
}

HypothesisStatus make_status(Hypothesis id) {
    HypothesisStatus st;
    st.id = id;
    return st;
}

ValidationReport validate_impl(int n, const std::vector<QuasiPeriodicSignal>& d,
                               const std::vector<QuasiPeriodicSignal>& a,
                               const std::vector<QuasiPeriodicSignal>& beta,
                               const std::vector<QuasiPeriodicSignal>* c,
                               const ValidationOptions& opts) {
    if (!(opts.grid_step > 0.0) || !(opts.horizon > 0.0)) {
        throw std::invalid_argument("validation grid step and horizon must be positive");
    }
    ValidationReport report;
    report.grid_step = opts.grid_step;
    report.horizon = opts.horizon;

    // (a1): finite trigonometric sums are almost periodic by construction.
    HypothesisStatus a1 = make_status(Hypothesis::A1);
    a1.pass = true;
    a1.certified_analytically = true;

    // (a2): d_i(t) >= d0 > 0.
    HypothesisStatus a2 = make_status(Hypothesis::A2);
    a2.pass = true;
    a2.certified_analytically = true;
    scalar_t d0 = std::numeric_limits<scalar_t>::infinity();
    for (int i = 0; i < n; ++i) {
        const LowerBound lb = certified_lower_bound(d[i], true, opts);
        d0 = std::min(d0, lb.bound);
        a2.certified_analytically = a2.certified_analytically && lb.analytic;
        if (!(lb.bound > 0.0) && (a2.pass || lb.min_value < a2.witness_value)) {
            a2.pass = false;
            a2.witness_t = lb.min_t;
            a2.witness_value = lb.min_value;
            a2.index_i = i;
        }
    }
    report.d0 = a2.pass ? d0 : 0.0;

    // (a3): a_ij(t) >= 0 for all i != j (a_ii identically zero is structural).
    HypothesisStatus a3 = make_status(Hypothesis::A3);
    a3.pass = true;
    a3.certified_analytically = true;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const QuasiPeriodicSignal& s = a[static_cast<std::size_t>(i) * n + j];
            if (s.is_identically_zero()) continue;
            const LowerBound lb = certified_lower_bound(s, false, opts);
            a3.certified_analytically = a3.certified_analytically && lb.analytic;
            if (lb.bound < 0.0 && (a3.pass || lb.min_value < a3.witness_value)) {
                a3.pass = false;
                a3.witness_t = lb.min_t;
                a3.witness_value = lb.min_value;
                a3.index_i = i;
                a3.index_j = j;
            }
        }
    }

    // (a4): beta_i(t) > 0.
    HypothesisStatus a4 = make_status(Hypothesis::A4);
    a4.pass = true;
    a4.certified_analytically = true;
    for (int i = 0; i < n; ++i) {
        const LowerBound lb = certified_lower_bound(beta[i], true, opts);
        a4.certified_analytically = a4.certified_analytically && lb.analytic;
        if (!(lb.bound > 0.0) && (a4.pass || lb.min_value < a4.witness_value)) {
            a4.pass = false;
            a4.witness_t = lb.min_t;
            a4.witness_value = lb.min_value;
            a4.index_i = i;
        }
    }

    // (a5): c_i(t) >= c0 > 0 (Nicholson/Mackey-Glass exponents only).
    HypothesisStatus a5 = make_status(Hypothesis::A5);
    if (c != nullptr) {
        a5.pass = true;
        a5.certified_analytically = true;
        scalar_t c0 = std::numeric_limits<scalar_t>::infinity();
        for (int i = 0; i < n; ++i) {
            const LowerBound lb = certified_lower_bound((*c)[i], true, opts);
            c0 = std::min(c0, lb.bound);
            a5.certified_analytically = a5.certified_analytically && lb.analytic;
            if (!(lb.bound > 0.0) && (a5.pass || lb.min_value < a5.witness_value)) {
                a5.pass = false;
                a5.witness_t = lb.min_t;
                a5.witness_value = lb.min_value;
                a5.index_i = i;
            }
        }
        report.c0 = a5.pass ? c0 : 0.0;
    } else {
        a5.applicable = false;
        a5.pass = true;
    }

    // (a6): d_i(t) - sum_j a_ji(t) > 0 (weak column dominance).
    HypothesisStatus a6 = make_status(Hypothesis::A6);
    a6.pass = true;
    a6.certified_analytically = true;
    for (int i = 0; i < n; ++i) {
        QuasiPeriodicSignal column_margin = d[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            column_margin = column_margin - a[static_cast<std::size_t>(j) * n + i];
        }
        const LowerBound lb = certified_lower_bound(column_margin, true, opts);
        a6.certified_analytically = a6.certified_analytically && lb.analytic;
        if (!(lb.bound > 0.0) && (a6.pass || lb.min_value < a6.witness_value)) {
            a6.pass = false;
            a6.witness_t = lb.min_t;
            a6.witness_value = lb.min_value;
            a6.index_i = i;
        }
    }

    report.hypotheses = {a1, a2, a3, a4, a5, a6};
    return report;
}

void accumulate_linear(int n, const std::vector<QuasiPeriodicSignal>& d,
                       const std::vector<QuasiPeriodicSignal>& a,
                       const std::vector<QuasiPeriodicSignal>& beta, scalar_t t,
                       const vector_t& y, const vector_t& g_delayed, vector_t& out) {
    out.resize(n);
    for (int i = 0; i < n; ++i) {
        scalar_t acc = -d[i].eval(t) * y[i];
        for (int j = 0; j < n; ++j) {
            const QuasiPeriodicSignal& aij = a[static_cast<std::size_t>(i) * n + j];
            if (aij.is_identically_zero()) continue;
            acc += aij.eval(t) * y[j];
        }
        acc += beta[i].eval(t) * g_delayed[i];
        out[i] = acc;
    }
}

}  // namespace

bool ValidationReport::all_pass() const {
    for (const HypothesisStatus& st : hypotheses) {
        if (st.applicable && !st.pass) return false;
    }
    return true;
}

const HypothesisStatus& ValidationReport::status(Hypothesis h) const {
    return hypotheses.at(static_cast<std::size_t>(h));
}

void check_structure(const DelaySystem& sys) {
    check_common(sys.n, sys.delays, sys.d, sys.a, sys.beta);
    if (sys.c.size() != static_cast<std::size_t>(sys.n)) {
        throw std::invalid_argument("c must have one signal per patch");
    }
    if (sys.nonlinearity.kind == NonlinearityKind::MackeyGlass && !(sys.nonlinearity.alpha >= 1.0)) {
        throw std::invalid_argument("Mackey-Glass exponent alpha must be >= 1");
    }
}

void check_structure(const LinearDelaySystem& sys) {
    check_common(sys.n, sys.delays, sys.d, sys.a, sys.beta);
}

ValidationReport validate(const DelaySystem& sys, const ValidationOptions& opts) {
    check_structure(sys);
    const std::vector<QuasiPeriodicSignal>* c =
        sys.nonlinearity.kind == NonlinearityKind::Linear ? nullptr : &sys.c;
    return validate_impl(sys.n, sys.d, sys.a, sys.beta, c, opts);
}

ValidationReport validate(const LinearDelaySystem& sys, const ValidationOptions& opts) {
    check_structure(sys);
    return validate_impl(sys.n, sys.d, sys.a, sys.beta, nullptr, opts);
}

scalar_t nonlinearity_value(const DelaySystem& sys, int i, scalar_t t, scalar_t y) {
    switch (sys.nonlinearity.kind) {
        case NonlinearityKind::Nicholson:
            return y * std::exp(-sys.c[i].eval(t) * y);
        case NonlinearityKind::MackeyGlass:
            if (y <= 0.0) return y;  // slope-1 continuation, avoids pow of negatives
            return y / (1.0 + sys.c[i].eval(t) * std::pow(y, sys.nonlinearity.alpha));
        case NonlinearityKind::Linear:
            return y;
    }
    return y;
}

vector_t rhs(const DelaySystem& sys, scalar_t t, const vector_t& y, const vector_t& y_delayed) {
    if (y.size() != sys.n || y_delayed.size() != sys.n) {
        throw std::invalid_argument("rhs: state size mismatch");
    }
    for (int i = 0; i < sys.n; ++i) {
        if (y[i] < -kNonnegTolerance || y_delayed[i] < -kNonnegTolerance) {
            throw std::invalid_argument("rhs: negative state beyond tolerance");
        }
    }
    vector_t g(sys.n);
    for (int i = 0; i < sys.n; ++i) {
        g[i] = nonlinearity_value(sys, i, t, std::max(y_delayed[i], 0.0));
    }
    vector_t out;
    accumulate_linear(sys.n, sys.d, sys.a, sys.beta, t, y, g, out);
    return out;
}

vector_t rhs(const LinearDelaySystem& sys, scalar_t t, const vector_t& z, const vector_t& z_delayed) {
    if (z.size() != sys.n || z_delayed.size() != sys.n) {
        throw std::invalid_argument("rhs: state size mismatch");
    }
    vector_t out;
    accumulate_linear(sys.n, sys.d, sys.a, sys.beta, t, z, z_delayed, out);
    return out;
}

LinearDelaySystem linearized(const DelaySystem& sys) {
    LinearDelaySystem lin;
    lin.n = sys.n;
    lin.delays = sys.delays;
    lin.d = sys.d;
    lin.a = sys.a;
    lin.beta = sys.beta;
    return lin;
}

namespace {

void check_indices(int n, const std::vector<int>& indices) {
    if (indices.empty()) throw std::invalid_argument("subsystem: empty index set");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int idx : indices) {
        if (idx < 0 || idx >= n) throw std::invalid_argument("subsystem: index out of range");
        if (seen[static_cast<std::size_t>(idx)]) throw std::invalid_argument("subsystem: repeated index");
        seen[static_cast<std::size_t>(idx)] = true;
    }
}

template <typename System>
void restrict_common(const System& sys, const std::vector<int>& indices, System& out) {
    const int m = static_cast<int>(indices.size());
    out.n = m;
    out.delays.resize(indices.size());
    out.d.resize(indices.size());
    out.beta.resize(indices.size());
    out.a.assign(static_cast<std::size_t>(m) * m, QuasiPeriodicSignal{});
    for (int r = 0; r < m; ++r) {
        out.delays[r] = sys.delays[indices[r]];
        out.d[r] = sys.d[indices[r]];
        out.beta[r] = sys.beta[indices[r]];
        for (int s = 0; s < m; ++s) {
            out.a_at(r, s) = sys.a_at(indices[r], indices[s]);
        }
    }
}

}  // namespace

LinearDelaySystem subsystem(const LinearDelaySystem& sys, const std::vector<int>& indices) {
    check_indices(sys.n, indices);
    LinearDelaySystem out;
    restrict_common(sys, indices, out);
    return out;
}

DelaySystem subsystem(const DelaySystem& sys, const std::vector<int>& indices) {
    check_indices(sys.n, indices);
    DelaySystem out;
    restrict_common(sys, indices, out);
    out.c.resize(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) out.c[r] = sys.c[indices[r]];
    out.nonlinearity = sys.nonlinearity;
    return out;
}

namespace {

template <typename System>
void translate_common(System& sys, scalar_t shift) {
    for (auto& s : sys.d) s = translate(s, shift);
    for (auto& s : sys.a) s = translate(s, shift);
    for (auto& s : sys.beta) s = translate(s, shift);
}

}  // namespace

DelaySystem translate(const DelaySystem& sys, scalar_t shift) {
    DelaySystem out = sys;
    translate_common(out, shift);
    for (auto& s : out.c) s = translate(s, shift);
    return out;
}

LinearDelaySystem translate(const LinearDelaySystem& sys, scalar_t shift) {
    LinearDelaySystem out = sys;
    translate_common(out, shift);
    return out;
}

DelaySystem permute(const DelaySystem& sys, const std::vector<int>& perm) {
    check_indices(sys.n, perm);
    if (static_cast<int>(perm.size()) != sys.n) {
        throw std::invalid_argument("permute: permutation size mismatch");
    }
    return subsystem(sys, perm);
}

std::string to_string(Hypothesis h) {
    switch (h) {
        case Hypothesis::A1: return "(a1)";
        case Hypothesis::A2: return "(a2)";
        case Hypothesis::A3: return "(a3)";
        case Hypothesis::A4: return "(a4)";
        case Hypothesis::A5: return "(a5)";
        case Hypothesis::A6: return "(a6)";
    }
    return "?";
}

}  // namespace nicholson
