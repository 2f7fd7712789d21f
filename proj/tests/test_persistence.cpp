#include <doctest.h>

#include <cmath>
#include <random>

#include "nicholson/persistence.hpp"
#include "oracles.hpp"

using namespace nicholson;

namespace {

DelaySystem scalar_nicholson(scalar_t d, scalar_t beta, scalar_t c, scalar_t tau) {
    DelaySystem sys;
    sys.n = 1;
    sys.delays = {tau};
    sys.d = {QuasiPeriodicSignal(d)};
    sys.a = {QuasiPeriodicSignal{}};
    sys.beta = {QuasiPeriodicSignal(beta)};
    sys.c = {QuasiPeriodicSignal(c)};
    sys.nonlinearity.kind = NonlinearityKind::Nicholson;
    return sys;
}

DelaySystem two_patch_source_sink() {
    DelaySystem sys;
    sys.n = 2;
    sys.delays = {1.0, 1.0};
    sys.d = {QuasiPeriodicSignal(1.0), QuasiPeriodicSignal(1.0)};
    sys.a.assign(4, QuasiPeriodicSignal{});
    sys.a_at(1, 0) = QuasiPeriodicSignal(0.5);  // patch 1 feeds patch 2
    sys.beta = {QuasiPeriodicSignal(2.0), QuasiPeriodicSignal(0.5)};
    sys.c = {QuasiPeriodicSignal(1.0), QuasiPeriodicSignal(1.0)};
    sys.nonlinearity.kind = NonlinearityKind::Nicholson;
    return sys;
}

ClassifyOptions fast_opts() {
    ClassifyOptions opts;
    opts.lyapunov.T = 1500.0;
    opts.lyapunov.extend = false;
    return opts;
}

LyapunovEstimate fake_estimate(scalar_t value, ConvergenceStatus status) {
    LyapunovEstimate est;
    est.value = value;
    est.status = status;
    est.T = 1000.0;
    est.dispersion = status == ConvergenceStatus::Converged ? 1e-4 : 1e-1;
    return est;
}

}  // namespace

TEST_SUITE("persistence") {

TEST_CASE("decide: margin rules on synthetic exponents") {
    std::map<int, LyapunovEstimate> exps;
    exps.emplace(0, fake_estimate(0.3, ConvergenceStatus::Converged));
    exps.emplace(1, fake_estimate(-0.2, ConvergenceStatus::Converged));
    exps.emplace(2, fake_estimate(1e-4, ConvergenceStatus::Converged));
    scalar_t margin;
    int block;
    CHECK(decide(exps, {0}, 5e-3, margin, block) == Answer::Yes);
    CHECK(margin == doctest::Approx(0.3));
    CHECK(block == 0);
    CHECK(decide(exps, {0, 1}, 5e-3, margin, block) == Answer::No);
    CHECK(block == 1);
    // Inside the margin band: uncertain, never a silent yes/no.
    CHECK(decide(exps, {2}, 5e-3, margin, block) == Answer::Uncertain);
    // Unconverged estimates block a yes.
    std::map<int, LyapunovEstimate> raw;
    raw.emplace(0, fake_estimate(0.5, ConvergenceStatus::Uncertain));
    CHECK(decide(raw, {0}, 5e-3, margin, block) == Answer::Uncertain);
    // ... and block a no.
    raw.clear();
    raw.emplace(0, fake_estimate(-0.5, ConvergenceStatus::Uncertain));
    CHECK(decide(raw, {0}, 5e-3, margin, block) == Answer::Uncertain);
}

TEST_CASE("classify: supercritical scalar gives yes/yes") {
    const auto verdict = classify(scalar_nicholson(1.0, 2.0, 1.0, 1.0), fast_opts());
    CHECK(verdict.u0 == Answer::Yes);
    CHECK(verdict.s0 == Answer::Yes);
    CHECK(verdict.structure.block_count() == 1);
    CHECK(verdict.u0_margin == doctest::Approx(0.3748).epsilon(1e-2));
}

TEST_CASE("classify: subcritical scalar gives no/no and solutions die out") {
    const auto sys = scalar_nicholson(1.0, 0.5, 1.0, 1.0);
    const auto verdict = classify(sys, fast_opts());
    CHECK(verdict.u0 == Answer::No);
    CHECK(verdict.s0 == Answer::No);

    const auto traj = integrate(sys, InitialHistory::constant(1, 1.0), 100.0, 0.01);
    CHECK(traj.max(0, 80.0, 100.0) < 1e-6);
}

TEST_CASE("classify: source-sink two-patch splits u0 and s0") {
    const auto verdict = classify(two_patch_source_sink(), fast_opts());
    REQUIRE(verdict.structure.block_count() == 2);
    CHECK(verdict.structure.I == std::vector<int>{0});
    CHECK(verdict.structure.J == std::vector<int>{1});
    CHECK(verdict.u0 == Answer::Yes);
    CHECK(verdict.s0 == Answer::No);
    CHECK(verdict.exponents.at(0).value > 0.0);
    CHECK(verdict.exponents.at(1).value < 0.0);
}

TEST_CASE("classify rejects invalid systems") {
    auto sys = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    sys.d = {QuasiPeriodicSignal(-1.0)};
    CHECK_THROWS_AS(classify(sys, fast_opts()), ValidationFailure);
}

TEST_CASE("empirical_check: persistent scalar settles near ln 2") {
    const auto sys = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    std::vector<InitialHistory> histories;
    for (scalar_t v : {0.01, 0.1, 1.0, 10.0}) histories.push_back(InitialHistory::constant(1, v));
    EmpiricalOptions opts;
    opts.T = 200.0;
    opts.W = 50.0;
    opts.classify = fast_opts();
    const auto report = empirical_check(sys, histories, opts);
    REQUIRE(report.histories.size() == 4);
    const scalar_t ln2 = std::log(2.0);
    for (const auto& hr : report.histories) {
        CHECK(hr.strongly_positive_start);
        CHECK(std::abs(hr.tail_min[0] - ln2) < 1e-2);
        CHECK(std::abs(hr.tail_max[0] - ln2) < 1e-2);
    }
    CHECK(report.consistency == Consistency::Consistent);
}

TEST_CASE("empirical_check: subcritical tails vanish") {
    const auto sys = scalar_nicholson(1.0, 0.5, 1.0, 1.0);
    std::vector<InitialHistory> histories;
    for (scalar_t v : {0.01, 0.1, 1.0, 10.0}) histories.push_back(InitialHistory::constant(1, v));
    EmpiricalOptions opts;
    opts.T = 100.0;
    opts.W = 20.0;
    opts.classify = fast_opts();
    const auto report = empirical_check(sys, histories, opts);
    for (const auto& hr : report.histories) {
        CHECK(hr.tail_max[0] < 1e-6);
    }
    CHECK(report.consistency == Consistency::Consistent);
}

TEST_CASE("empirical_check: sink-only start dies in the source-sink system") {
    const auto sys = two_patch_source_sink();
    std::vector<InitialHistory> histories;
    histories.push_back(InitialHistory::constants({0.0, 0.1}));
    EmpiricalOptions opts;
    opts.T = 100.0;
    opts.W = 20.0;
    opts.run_classify = false;
    const auto report = empirical_check(sys, histories, opts);
    const auto& hr = report.histories[0];
    CHECK_FALSE(hr.strongly_positive_start);
    CHECK(hr.positive_start);
    // Patch 1 never receives input and stays at zero; patch 2 decays alone.
    CHECK(hr.tail_max[0] == 0.0);
    CHECK(hr.tail_max[1] < 1e-6);
}

TEST_CASE("default probe histories: four constants plus one oscillatory") {
    const auto sys = two_patch_source_sink();
    const auto probes = default_probe_histories(sys);
    REQUIRE(probes.size() == 5);
    for (const auto& phi : probes) {
        for (int i = 0; i < sys.n; ++i) CHECK(phi.eval(i, 0.0) > 0.0);
    }
}

TEST_CASE("classify invariant under patch relabeling") {
    std::mt19937_64 rng(51);
    const auto sys = two_patch_source_sink();
    const auto base = classify(sys, fast_opts());
    std::vector<int> perm = {0, 1};
    for (int rep = 0; rep < 3; ++rep) {
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto verdict = classify(permute(sys, perm), fast_opts());
        CHECK(verdict.u0 == base.u0);
        CHECK(verdict.s0 == base.s0);
    }
}

TEST_CASE("classify invariant under c and alpha changes") {
    std::mt19937_64 rng(53);
    auto sys = two_patch_source_sink();
    const auto base = classify(sys, fast_opts());
    std::uniform_real_distribution<scalar_t> uc(0.2, 4.0);
    for (int rep = 0; rep < 3; ++rep) {
        sys.c = {QuasiPeriodicSignal(uc(rng)), QuasiPeriodicSignal(uc(rng), {{0.1, 1.3, 0.2, Waveform::Sine}})};
        sys.nonlinearity.kind = rep % 2 == 0 ? NonlinearityKind::MackeyGlass : NonlinearityKind::Nicholson;
        sys.nonlinearity.alpha = 1.0 + uc(rng);
        const auto verdict = classify(sys, fast_opts());
        CHECK(verdict.u0 == base.u0);
        CHECK(verdict.s0 == base.s0);
        CHECK(verdict.exponents.at(0).value == base.exponents.at(0).value);
    }
}

TEST_CASE("verdict sign equals the characteristic root sign across the scalar family") {
    for (scalar_t beta : {0.5, 0.9, 1.1, 2.0}) {
        const scalar_t root = characteristic_root(1.0, beta, 1.0);
        const auto verdict = classify(scalar_nicholson(1.0, beta, 1.0, 1.0), fast_opts());
        if (root > verdict.margin_tol) {
            CHECK(verdict.u0 == Answer::Yes);
        } else if (root < -verdict.margin_tol) {
            CHECK(verdict.u0 == Answer::No);
        }
    }
}

TEST_CASE("empirical agreement holds even near criticality") {
    // beta = 0.9 and 1.1 sit close to the root-zero boundary (roots around
    // -0.05 and +0.05); a longer horizon lets the tails reflect the verdict.
    for (scalar_t beta : {0.9, 1.1}) {
        const auto sys = scalar_nicholson(1.0, beta, 1.0, 1.0);
        std::vector<InitialHistory> histories;
        for (scalar_t v : {0.01, 0.1, 1.0, 10.0}) {
            histories.push_back(InitialHistory::constant(1, v));
        }
        EmpiricalOptions opts;
        opts.T = 500.0;
        opts.W = 50.0;
        opts.classify = fast_opts();
        const auto report = empirical_check(sys, histories, opts);
        REQUIRE(report.verdict.has_value());
        CHECK(std::abs(report.verdict->exponents.at(0).value) > report.verdict->margin_tol);
        CHECK(report.consistency == Consistency::Consistent);
    }
}

TEST_CASE("scalar_criterion: constant signals match the integral criterion exactly") {
    std::vector<scalar_t> checkpoints;
    for (int k = 1; k <= 100; ++k) checkpoints.push_back(2.0 * k);
    const auto pos = scalar_criterion(QuasiPeriodicSignal(0.3), checkpoints);
    CHECK(pos.verdict == ScalarTrend::PersistentTrend);
    CHECK(pos.ls_slope == doctest::Approx(0.3).epsilon(1e-9));

    const auto sin_report =
        scalar_criterion(QuasiPeriodicSignal(0.0, {{1.0, 1.0, 0.0, Waveform::Sine}}), checkpoints);
    CHECK(sin_report.verdict == ScalarTrend::Recurrent);
    CHECK(sin_report.min_last_half < 0.1);

    std::mt19937_64 rng(59);
    std::uniform_real_distribution<scalar_t> uc(0.05, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        const scalar_t c = uc(rng) * (rep % 2 == 0 ? 1.0 : -1.0);
        const auto report = scalar_criterion(QuasiPeriodicSignal(c), checkpoints);
        if (c > 0.0) {
            CHECK(report.verdict == ScalarTrend::PersistentTrend);
        } else {
            CHECK(report.verdict != ScalarTrend::PersistentTrend);
        }
    }
}

TEST_CASE("scalar_criterion: truncated zero-mean signal stays positive at this horizon") {
    std::vector<scalar_t> checkpoints;
    for (int k = 1; k <= 200; ++k) checkpoints.push_back(50.0 * k);  // up to 10^4
    const auto report = scalar_criterion(conley_miller(6), checkpoints);
    // F is nonnegative with zero mean: no large negative dip, so never both
    // a persistent slope and a recurrent minimum; the verdict depends on the
    // checkpoint grid hitting the near-zeros of F.
    CHECK(report.F.back() >= 0.0);
    CHECK(report.min_last_half >= 0.0);
    for (std::size_t k = 0; k < report.F.size(); ++k) CHECK(report.F[k] >= 0.0);
    CHECK(report.suffix_min.front() >= 0.0);
}

TEST_CASE("scalar_criterion rejects bad checkpoints") {
    CHECK_THROWS_AS(scalar_criterion(QuasiPeriodicSignal(1.0), {}), std::invalid_argument);
    CHECK_THROWS_AS(scalar_criterion(QuasiPeriodicSignal(1.0), {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(scalar_criterion(QuasiPeriodicSignal(1.0), {-1.0, 2.0}), std::invalid_argument);
}

}  // TEST_SUITE
