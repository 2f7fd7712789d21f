#include "nicholson/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nicholson {

namespace {

std::string summarize_failure(const ValidationReport& report) {
    std::ostringstream os;
    os << "hypothesis validation failed:";
    for (const HypothesisStatus& st : report.hypotheses) {
        if (!st.applicable || st.pass) continue;
        os << " " << to_string(st.id);
        if (st.index_i >= 0) os << " [patch " << (st.index_i + 1) << "]";
        os << " value " << st.witness_value << " at t = " << st.witness_t << ";";
    }
    return os.str();
}

// 4-point Gauss-Legendre on [0, 1]; exact for polynomials up to degree 7.
constexpr scalar_t kGaussNode[4] = {0.069431844202973712, 0.33000947820757187,
                                    0.66999052179242813, 0.93056815579702629};
constexpr scalar_t kGaussWeight[4] = {0.17392742256872693, 0.32607257743127307,
                                      0.32607257743127307, 0.17392742256872693};

/** Renormalized method-of-steps run keeping a ring buffer of recent knots. */
class ExponentLoop {
  public:
    ExponentLoop(const LinearDelaySystem& lin, const StepGrid& grid, const InitialHistory& phi,
                 SegmentNormKind norm)
        : lin_(lin),
          grid_(grid),
          phi_(phi),
          norm_(norm),
          n_(lin.n),
          h_(grid.h),
          m_max_(*std::max_element(grid.delay_steps.begin(), grid.delay_steps.end())),
          ring_size_(m_max_ + 2),
          values_(ring_size_, lin.n),
          derivs_(ring_size_, lin.n) {
        vector_t y(n_), yd(n_), f(n_);
        for (int i = 0; i < n_; ++i) {
            y[i] = phi_.eval(i, 0.0);
            yd[i] = delayed(0, i, 0);
        }
        rhs_into(0.0, y, yd, f);
        values_.row(slot(0)) = y.transpose();
        derivs_.row(slot(0)) = f.transpose();
    }

    /// Advance `count` steps from the current step index.
    void advance(long count) {
        vector_t y(n_), yd(n_), k1(n_), k2(n_), k3(n_), k4(n_), ytmp(n_);
        for (long c = 0; c < count; ++c) {
            const long s = step_;
            const scalar_t t = static_cast<scalar_t>(s) * h_;
            y = values_.row(slot(s)).transpose();
            k1 = derivs_.row(slot(s)).transpose();

            for (int i = 0; i < n_; ++i) yd[i] = delayed(s, i, 1);
            ytmp = y + (0.5 * h_) * k1;
            rhs_into(t + 0.5 * h_, ytmp, yd, k2);
            ytmp = y + (0.5 * h_) * k2;
            rhs_into(t + 0.5 * h_, ytmp, yd, k3);

            for (int i = 0; i < n_; ++i) yd[i] = delayed(s, i, 2);
            ytmp = y + h_ * k3;
            rhs_into(t + h_, ytmp, yd, k4);

            ytmp = y + (h_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            rhs_into(t + h_, ytmp, yd, k1);
            values_.row(slot(s + 1)) = ytmp.transpose();
            derivs_.row(slot(s + 1)) = k1.transpose();
            ++step_;
        }
    }

    /// Norm of the current solution segment, then rescale it back to norm 1.
    scalar_t renormalize() {
        const scalar_t norm = segment_norm_now();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw std::runtime_error(
                "top_exponent: solution segment norm vanished or diverged; exponent undefined");
        }
        const scalar_t inv = 1.0 / norm;
        values_ *= inv;
        derivs_ *= inv;
        history_scale_ *= inv;
        return norm;
    }

    long step() const { return step_; }

  private:
    long slot(long s) const { return s % ring_size_; }

    scalar_t hist(int i, scalar_t t) const { return history_scale_ * phi_.eval(i, t); }

    scalar_t delayed(long s, int i, int stage) const {
        const long q = s - grid_.delay_steps[static_cast<std::size_t>(i)];
        switch (stage) {
            case 0:
                return q >= 0 ? values_(slot(q), i) : hist(i, static_cast<scalar_t>(q) * h_);
            case 2:
                return q + 1 >= 0 ? values_(slot(q + 1), i)
                                  : hist(i, static_cast<scalar_t>(q + 1) * h_);
            default:
                if (q < 0) return hist(i, (static_cast<scalar_t>(q) + 0.5) * h_);
                return 0.5 * (values_(slot(q), i) + values_(slot(q + 1), i)) +
                       0.125 * h_ * (derivs_(slot(q), i) - derivs_(slot(q + 1), i));
        }
    }

    void rhs_into(scalar_t t, const vector_t& z, const vector_t& zd, vector_t& out) const {
        for (int i = 0; i < n_; ++i) {
            scalar_t acc = -lin_.d[static_cast<std::size_t>(i)].eval(t) * z[i];
            for (int j = 0; j < n_; ++j) {
                const QuasiPeriodicSignal& aij = lin_.a_at(i, j);
                if (aij.is_identically_zero()) continue;
                acc += aij.eval(t) * z[j];
            }
            acc += lin_.beta[static_cast<std::size_t>(i)].eval(t) * zd[i];
            out[i] = acc;
        }
    }

    scalar_t segment_norm_now() const {
        return norm_ == SegmentNormKind::SupSum ? sup_norm_now() : l2_norm_now();
    }

    scalar_t sup_norm_now() const {
        const long s = step_;
        scalar_t acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            const long m = grid_.delay_steps[static_cast<std::size_t>(i)];
            scalar_t mn = std::numeric_limits<scalar_t>::infinity();
            scalar_t mx = -mn;
            if (s - m < 0) {
                scalar_t hmn = mn, hmx = mx;
                phi_.components[static_cast<std::size_t>(i)].minmax(
                    static_cast<scalar_t>(s - m) * h_, 0.0, hmn, hmx);
                mn = std::min(mn, history_scale_ * hmn);
                mx = std::max(mx, history_scale_ * hmx);
            }
            for (long k = std::max<long>(0, s - m); k < s; ++k) {
                detail::hermite_minmax(values_(slot(k), i), derivs_(slot(k), i),
                                       values_(slot(k + 1), i), derivs_(slot(k + 1), i), h_, 0.0,
                                       1.0, mn, mx);
            }
            acc += std::max(std::abs(mn), std::abs(mx));
        }
        return acc;
    }

    scalar_t l2_norm_now() const {
        const long s = step_;
        scalar_t acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            const long m = grid_.delay_steps[static_cast<std::size_t>(i)];
            const scalar_t z_now = values_(slot(s), i);
            scalar_t sq = z_now * z_now;
            for (long k = s - m; k < s; ++k) {
                if (k >= 0) {
                    for (int g = 0; g < 4; ++g) {
                        const scalar_t v =
                            detail::hermite_eval(values_(slot(k), i), derivs_(slot(k), i),
                                                 values_(slot(k + 1), i), derivs_(slot(k + 1), i),
                                                 h_, kGaussNode[g]);
                        sq += h_ * kGaussWeight[g] * v * v;
                    }
                } else {
                    for (int g = 0; g < 4; ++g) {
                        const scalar_t v = hist(i, (static_cast<scalar_t>(k) + kGaussNode[g]) * h_);
                        sq += h_ * kGaussWeight[g] * v * v;
                    }
                }
            }
            acc += sq;
        }
        return std::sqrt(acc);
    }

    const LinearDelaySystem& lin_;
    const StepGrid& grid_;
    const InitialHistory& phi_;
    SegmentNormKind norm_;
    int n_;
    scalar_t h_;
    long m_max_;
    long ring_size_;
    matrix_t values_;
    matrix_t derivs_;
    long step_ = 0;
    scalar_t history_scale_ = 1.0;
};

struct WindowSummary {
    std::vector<scalar_t> slopes;
    scalar_t dispersion = std::numeric_limits<scalar_t>::infinity();
};

/// Slopes of log||z|| over the last halves of the windows [0, T/16], ..., [0, T].
WindowSummary window_slopes(const std::vector<scalar_t>& cumlog, scalar_t chunk_time) {
    WindowSummary out;
    const long M = static_cast<long>(cumlog.size()) - 1;
    if (M < 2) return out;
    for (int r = 4; r >= 0; --r) {
        const scalar_t T_r = static_cast<scalar_t>(M) * chunk_time / std::ldexp(1.0, r);
        long i2 = std::clamp(std::lround(T_r / chunk_time), 1l, M);
        long i1 = std::clamp(std::lround(0.5 * T_r / chunk_time), 0l, i2 - 1);
        out.slopes.push_back((cumlog[static_cast<std::size_t>(i2)] -
                              cumlog[static_cast<std::size_t>(i1)]) /
                             (static_cast<scalar_t>(i2 - i1) * chunk_time));
    }
    const auto [mn, mx] = std::minmax_element(out.slopes.begin(), out.slopes.end());
    out.dispersion = *mx - *mn;
    return out;
}

}  // namespace

ValidationFailure::ValidationFailure(ValidationReport r)
    : std::runtime_error(summarize_failure(r)), report(std::move(r)) {}

LyapunovEstimate top_exponent(const LinearDelaySystem& lin, const LyapunovOptions& opts) {
    check_structure(lin);
    const scalar_t tau_max = *std::max_element(lin.delays.begin(), lin.delays.end());
    const scalar_t tau_min = *std::min_element(lin.delays.begin(), lin.delays.end());

    scalar_t T = opts.T > 0.0 ? opts.T : std::max(1000.0, 100.0 * tau_max);
    if (T < 100.0 * tau_max - 1e-9) {
        throw std::invalid_argument("top_exponent: horizon must be at least 100 * max tau");
    }
    scalar_t h_req = opts.h > 0.0 ? opts.h : default_step(lin.delays);
    if (h_req > tau_min / 4.0 + 1e-15) {
        throw std::invalid_argument("top_exponent: step must satisfy h <= min tau / 4");
    }
    const StepGrid grid = fit_step_to_delays(lin.delays, h_req);

    const scalar_t p_req = opts.renorm_period > 0.0 ? opts.renorm_period : std::max(1.0, tau_max);
    const long renorm_steps = std::max<long>(1, std::lround(p_req / grid.h));
    const scalar_t chunk_time = static_cast<scalar_t>(renorm_steps) * grid.h;

    InitialHistory ones = InitialHistory::constant(lin.n, 1.0);
    const InitialHistory& phi = opts.initial != nullptr ? *opts.initial : ones;
    if (phi.size() != lin.n) {
        throw std::invalid_argument("top_exponent: initial map size does not match the system");
    }

    ExponentLoop loop(lin, grid, phi, opts.norm);
    std::vector<scalar_t> cumlog{0.0};
    scalar_t total = 0.0;

    LyapunovEstimate est;
    scalar_t T_target = T;
    while (true) {
        const long boundaries_needed = static_cast<long>(std::ceil(T_target / chunk_time - 1e-9));
        while (static_cast<long>(cumlog.size()) - 1 < boundaries_needed) {
            loop.advance(renorm_steps);
            total += std::log(loop.renormalize());
            cumlog.push_back(total);
        }
        const long M = static_cast<long>(cumlog.size()) - 1;
        const scalar_t T_actual = static_cast<scalar_t>(M) * chunk_time;
        const WindowSummary windows = window_slopes(cumlog, chunk_time);

        est.value = total / T_actual;
        est.T = T_actual;
        est.window_slopes = windows.slopes;
        est.renorm_count = M;
        est.dispersion = windows.dispersion;
        est.status = (windows.dispersion < opts.slope_tol && T_actual >= 100.0 * tau_max - 1e-9)
                         ? ConvergenceStatus::Converged
                         : ConvergenceStatus::Uncertain;

        if (est.status == ConvergenceStatus::Converged || !opts.extend ||
            T_target >= opts.T_cap - 1e-9) {
            break;
        }
        T_target = std::min(2.0 * T_target, opts.T_cap);
    }
    return est;
}

LyapunovEstimate top_exponent(const LinearDelaySystem& lin, scalar_t T, scalar_t renorm_period) {
    LyapunovOptions opts;
    opts.T = T;
    opts.renorm_period = renorm_period;
    opts.extend = false;
    return top_exponent(lin, opts);
}

scalar_t characteristic_root(scalar_t d, scalar_t beta, scalar_t tau) {
    if (!(d > 0.0) || !(beta > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("characteristic_root: d, beta, tau must be positive");
    }
    const auto g = [&](scalar_t lambda) { return lambda + d - beta * std::exp(-lambda * tau); };
    scalar_t lo = -d - beta;
    scalar_t hi = beta;
    // g is strictly increasing with g(lo) < 0 < g(hi).
    while (hi - lo > 1e-10) {
        const scalar_t mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::map<int, LyapunovEstimate> block_exponents(const LinearDelaySystem& lin,
                                                const BlockStructure& structure,
                                                const LyapunovOptions& opts) {
    LyapunovOptions block_opts = opts;
    block_opts.initial = nullptr;  // block dimensions differ from the full system
    std::map<int, LyapunovEstimate> out;
    for (int j = 0; j < structure.block_count(); ++j) {
        const LinearDelaySystem sub = subsystem(lin, structure.blocks[static_cast<std::size_t>(j)]);
        out.emplace(j, top_exponent(sub, block_opts));
    }
    return out;
}

std::map<int, LyapunovEstimate> block_exponents(const DelaySystem& sys, const LyapunovOptions& opts) {
    ValidationReport report = validate(sys);
    if (!report.all_pass()) throw ValidationFailure(std::move(report));
    const LinearDelaySystem lin = linearized(sys);
    const BlockStructure structure = condense(zero_pattern(lin));
    return block_exponents(lin, structure, opts);
}

}  // namespace nicholson
