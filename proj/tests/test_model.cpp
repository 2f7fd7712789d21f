#include <doctest.h>

#include <cmath>
#include <random>

#include "nicholson/integrator.hpp"
#include "nicholson/model.hpp"
#include "oracles.hpp"

using namespace nicholson;

namespace {
constexpr scalar_t kPi = 3.14159265358979323846;

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

DelaySystem two_patch_one_way(scalar_t beta1, scalar_t beta2, const QuasiPeriodicSignal& a21,
                              const QuasiPeriodicSignal& d1 = QuasiPeriodicSignal(1.0)) {
    DelaySystem sys;
    sys.n = 2;
    sys.delays = {1.0, 1.0};
    sys.d = {d1, QuasiPeriodicSignal(1.0)};
    sys.a.assign(4, QuasiPeriodicSignal{});
    sys.a_at(1, 0) = a21;
    sys.beta = {QuasiPeriodicSignal(beta1), QuasiPeriodicSignal(beta2)};
    sys.c = {QuasiPeriodicSignal(1.0), QuasiPeriodicSignal(1.0)};
    sys.nonlinearity.kind = NonlinearityKind::Nicholson;
    return sys;
}

DelaySystem random_system(std::mt19937_64& rng, int n, double coupling_density) {
    DelaySystem sys;
    sys.n = n;
    std::uniform_real_distribution<scalar_t> utau(0.5, 2.0);
    std::uniform_real_distribution<scalar_t> ud(1.0, 2.0);
    std::uniform_real_distribution<scalar_t> ubeta(0.3, 3.0);
    std::uniform_real_distribution<scalar_t> uamp(0.0, 0.2);
    std::bernoulli_distribution ucouple(coupling_density);
    for (int i = 0; i < n; ++i) {
        const scalar_t tau = std::round(utau(rng) * 4.0) / 4.0;
        sys.delays.push_back(tau);
        sys.d.push_back(QuasiPeriodicSignal(ud(rng), {{uamp(rng), 1.0, 0.3 * i, Waveform::Sine}}));
        sys.beta.push_back(QuasiPeriodicSignal(ubeta(rng)));
        sys.c.push_back(QuasiPeriodicSignal(1.0));
    }
    sys.a.assign(static_cast<std::size_t>(n) * n, QuasiPeriodicSignal{});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && ucouple(rng)) sys.a_at(i, j) = QuasiPeriodicSignal(0.1);
        }
    }
    sys.nonlinearity.kind = NonlinearityKind::Nicholson;
    return sys;
}
}  // namespace

TEST_SUITE("model") {

TEST_CASE("validate: constant scalar passes with d0 = c0 = 1") {
    const auto sys = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    const auto report = validate(sys);
    CHECK(report.all_pass());
    CHECK(report.d0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.c0 == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& st : report.hypotheses) CHECK(st.pass);
}

TEST_CASE("validate: constant (a6) violation with witness") {
    const auto sys = two_patch_one_way(2.0, 0.5, QuasiPeriodicSignal(1.5));
    const auto report = validate(sys);
    CHECK_FALSE(report.all_pass());
    const auto& a6 = report.status(Hypothesis::A6);
    CHECK_FALSE(a6.pass);
    CHECK(a6.index_i == 0);  // column of patch 1: d_1 - a_21 = 1 - 1.5 < 0
    CHECK(a6.witness_value == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("validate: oscillating (a6) violation, witness near 3 pi / 2") {
    QuasiPeriodicSignal d1(1.0, {{0.5, 1.0, 0.0, Waveform::Sine}});
    const auto sys = two_patch_one_way(2.0, 0.5, QuasiPeriodicSignal(0.6), d1);
    const auto report = validate(sys);
    const auto& a6 = report.status(Hypothesis::A6);
    CHECK_FALSE(a6.pass);
    CHECK(a6.index_i == 0);
    CHECK(std::abs(a6.witness_t - 3.0 * kPi / 2.0) < 0.1);
    CHECK(a6.witness_value < 0.0);
    CHECK(a6.witness_value == doctest::Approx(-0.1).epsilon(1e-3));
}

TEST_CASE("validate: grid certification with a safety margin") {
    // d_1 - a_21 = 0.6 + 0.3 sin t + 0.3 cos t: the amplitude bound gives 0.0
    // and cannot certify strict positivity, but the true minimum is
    // 0.6 - 0.3 sqrt(2) > 0 and the grid search with its margin proves it.
    QuasiPeriodicSignal d1(1.2, {{0.3, 1.0, 0.0, Waveform::Sine}});
    QuasiPeriodicSignal a21(0.6, {{-0.3, 1.0, 0.0, Waveform::Cosine}});
    const auto sys = two_patch_one_way(2.0, 0.5, a21, d1);
    const auto report = validate(sys);
    CHECK(report.status(Hypothesis::A6).pass);
    CHECK_FALSE(report.status(Hypothesis::A6).certified_analytically);
    CHECK(report.all_pass());
}

TEST_CASE("rhs: null solution for every nonlinearity") {
    for (auto kind : {NonlinearityKind::Nicholson, NonlinearityKind::MackeyGlass,
                      NonlinearityKind::Linear}) {
        auto sys = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
        sys.nonlinearity.kind = kind;
        sys.nonlinearity.alpha = 1.5;
        const vector_t zero = vector_t::Zero(1);
        for (scalar_t t : {0.0, 0.7, 13.2, 101.0}) {
            CHECK(rhs(sys, t, zero, zero)[0] == 0.0);
        }
    }
}

TEST_CASE("rhs: Nicholson equilibrium identity at ln 2") {
    const auto sys = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    const scalar_t ystar = std::log(2.0);
    vector_t y(1);
    y[0] = ystar;
    CHECK(std::abs(rhs(sys, 0.0, y, y)[0]) < 1e-15);
}

TEST_CASE("rhs: rejects negative states beyond tolerance") {
    const auto sys = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    vector_t bad(1), ok(1);
    bad[0] = -1e-3;
    ok[0] = -1e-13;
    CHECK_THROWS_AS(rhs(sys, 0.0, bad, bad), std::invalid_argument);
    CHECK_NOTHROW(rhs(sys, 0.0, ok, ok));
}

TEST_CASE("linearized drops c and the nonlinearity") {
    auto sys = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    const auto lin = linearized(sys);
    CHECK(lin.n == 1);
    CHECK(lin.delays == sys.delays);
    CHECK(lin.d == sys.d);
    CHECK(lin.beta == sys.beta);

    auto mg = sys;
    mg.nonlinearity.kind = NonlinearityKind::MackeyGlass;
    mg.nonlinearity.alpha = 1.0;
    CHECK(linearized(mg) == lin);
}

TEST_CASE("linear kind reproduces the linearized rhs exactly") {
    std::mt19937_64 rng(23);
    auto sys = random_system(rng, 3, 0.5);
    sys.nonlinearity.kind = NonlinearityKind::Linear;
    const auto lin = linearized(sys);
    std::uniform_real_distribution<scalar_t> uy(0.0, 5.0);
    for (int rep = 0; rep < 100; ++rep) {
        vector_t y(3), yd(3);
        for (int i = 0; i < 3; ++i) {
            y[i] = uy(rng);
            yd[i] = uy(rng);
        }
        const scalar_t t = uy(rng);
        const vector_t lhs = rhs(sys, t, y, yd);
        const vector_t rhs_lin = rhs(lin, t, y, yd);
        for (int i = 0; i < 3; ++i) CHECK(lhs[i] == rhs_lin[i]);
    }
}

TEST_CASE("linearization matches finite differences of the nonlinearity at 0") {
    std::mt19937_64 rng(29);
    for (auto kind : {NonlinearityKind::Nicholson, NonlinearityKind::MackeyGlass}) {
        auto sys = random_system(rng, 3, 0.5);
        sys.nonlinearity.kind = kind;
        sys.nonlinearity.alpha = 1.5;
        const auto lin = linearized(sys);
        std::uniform_real_distribution<scalar_t> uy(0.1, 1.0);
        const scalar_t eps = 1e-5;
        for (int rep = 0; rep < 20; ++rep) {
            vector_t z(3), zd(3);
            for (int i = 0; i < 3; ++i) {
                z[i] = uy(rng);
                zd[i] = uy(rng);
            }
            const scalar_t t = uy(rng) * 10.0;
            // Directional derivative of the nonlinear rhs at 0: the linear part
            // is exact, the g slope comes from a second-order one-sided stencil
            // (the state space is the nonnegative cone).
            vector_t expected(3);
            for (int i = 0; i < 3; ++i) {
                const scalar_t g1 = nonlinearity_value(sys, i, t, eps * zd[i]);
                const scalar_t g2 = nonlinearity_value(sys, i, t, 2.0 * eps * zd[i]);
                const scalar_t slope_times_zd = (4.0 * g1 - g2) / (2.0 * eps);
                scalar_t acc = -sys.d[i].eval(t) * z[i];
                for (int j = 0; j < 3; ++j) {
                    if (!sys.a_at(i, j).is_identically_zero()) acc += sys.a_at(i, j).eval(t) * z[j];
                }
                expected[i] = acc + sys.beta[i].eval(t) * slope_times_zd;
            }
            const vector_t got = rhs(lin, t, z, zd);
            for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-6));
        }
    }
}

TEST_CASE("subsystem: identity and singleton") {
    std::mt19937_64 rng(31);
    const auto sys = random_system(rng, 4, 0.4);
    const auto lin = linearized(sys);
    CHECK(subsystem(lin, {0, 1, 2, 3}) == lin);

    const auto single = subsystem(lin, {2});
    CHECK(single.n == 1);
    CHECK(single.a_at(0, 0).is_identically_zero());
    CHECK(single.d[0] == lin.d[2]);
    CHECK(single.beta[0] == lin.beta[2]);
    CHECK(single.delays[0] == lin.delays[2]);

    CHECK_THROWS_AS(subsystem(lin, {}), std::invalid_argument);
    CHECK_THROWS_AS(subsystem(lin, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(subsystem(lin, {4}), std::invalid_argument);
}

TEST_CASE("subsystem of a decoupled block integrates independently") {
    // 3 patches, lower triangular coupling: block {1, 2} receives nothing.
    DelaySystem sys;
    sys.n = 3;
    sys.delays = {1.0, 0.5, 1.0};
    sys.d = {QuasiPeriodicSignal(1.0), QuasiPeriodicSignal(1.2), QuasiPeriodicSignal(1.1)};
    sys.beta = {QuasiPeriodicSignal(2.0), QuasiPeriodicSignal(1.5), QuasiPeriodicSignal(0.8)};
    sys.c = {QuasiPeriodicSignal(1.0), QuasiPeriodicSignal(1.0), QuasiPeriodicSignal(1.0)};
    sys.a.assign(9, QuasiPeriodicSignal{});
    sys.a_at(0, 1) = QuasiPeriodicSignal(0.3);  // 2 -> 1 inside the block
    sys.a_at(1, 0) = QuasiPeriodicSignal(0.2);  // 1 -> 2 inside the block
    sys.a_at(2, 0) = QuasiPeriodicSignal(0.4);  // block feeds patch 3
    const auto lin = linearized(sys);

    const auto sub = subsystem(lin, {0, 1});
    const auto traj_full = integrate(lin, InitialHistory::constants({0.7, 0.4, 0.0}), 20.0, 0.01);
    const auto traj_sub = integrate(sub, InitialHistory::constants({0.7, 0.4}), 20.0, 0.01);
    for (scalar_t t = 0.0; t <= 20.0; t += 0.37) {
        CHECK(traj_full.eval(t, 0) == doctest::Approx(traj_sub.eval(t, 0)).epsilon(1e-8));
        CHECK(traj_full.eval(t, 1) == doctest::Approx(traj_sub.eval(t, 1)).epsilon(1e-8));
    }
}

TEST_CASE("nonlinearities are sublinear and dominated by the identity") {
    std::mt19937_64 rng(37);
    auto sys = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    for (auto kind : {NonlinearityKind::Nicholson, NonlinearityKind::MackeyGlass}) {
        sys.nonlinearity.kind = kind;
        sys.nonlinearity.alpha = 2.0;
        std::uniform_real_distribution<scalar_t> uy(0.0, 20.0);
        std::uniform_real_distribution<scalar_t> ulambda(0.0, 1.0);
        std::uniform_real_distribution<scalar_t> ut(0.0, 100.0);
        for (int k = 0; k < 10000; ++k) {
            const scalar_t y = uy(rng);
            const scalar_t lambda = ulambda(rng);
            const scalar_t t = ut(rng);
            const scalar_t g = nonlinearity_value(sys, 0, t, y);
            CHECK(nonlinearity_value(sys, 0, t, lambda * y) >= lambda * g - 1e-12);
            CHECK(g <= y + 1e-12);
        }
    }
}

TEST_CASE("linearized commutes with subsystem") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        const auto sys = random_system(rng, 5, 0.4);
        const std::vector<int> indices = {0, 2, 4};
        CHECK(linearized(subsystem(sys, indices)) == subsystem(linearized(sys), indices));
    }
}

TEST_CASE("structural invariants are enforced") {
    auto sys = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    sys.a_at(0, 0) = QuasiPeriodicSignal(0.1);
    CHECK_THROWS_AS(validate(sys), std::invalid_argument);

    auto bad_delay = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    bad_delay.delays[0] = 0.0;
    CHECK_THROWS_AS(validate(bad_delay), std::invalid_argument);

    auto bad_alpha = scalar_nicholson(1.0, 2.0, 1.0, 1.0);
    bad_alpha.nonlinearity.kind = NonlinearityKind::MackeyGlass;
    bad_alpha.nonlinearity.alpha = 0.5;
    CHECK_THROWS_AS(validate(bad_alpha), std::invalid_argument);
}

TEST_CASE("translate and permute preserve structure") {
    std::mt19937_64 rng(43);
    const auto sys = random_system(rng, 4, 0.5);
    const auto shifted = translate(sys, 2.5);
    for (int i = 0; i < 4; ++i) {
        for (scalar_t t : {0.0, 1.1, 5.7}) {
            CHECK(shifted.d[i].eval(t) == doctest::Approx(sys.d[i].eval(t + 2.5)).epsilon(1e-12));
        }
    }
    const std::vector<int> perm = {2, 0, 3, 1};
    const auto relabeled = permute(sys, perm);
    for (int i = 0; i < 4; ++i) {
        CHECK(relabeled.d[i] == sys.d[perm[i]]);
        for (int j = 0; j < 4; ++j) {
            CHECK(relabeled.a_at(i, j) == sys.a_at(perm[i], perm[j]));
        }
    }
}

}  // TEST_SUITE
