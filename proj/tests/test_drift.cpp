#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "insider/drift.hpp"
#include "insider/normal.hpp"
#include "insider/oracles/oracles.hpp"
#include "insider/stats.hpp"
#include "support.hpp"

using namespace insider;
using testsupport::Gen;

namespace {

ConditionalState state(double t, double w_t, double w_tk, double max0, double maxk, double b_t = 0.0,
                       double b_tk = 0.0) {
    ConditionalState s;
    s.t = t;
    s.w_t = w_t;
    s.w_tk = w_tk;
    s.run_max_from_0 = max0;
    s.run_max_from_tk = maxk;
    s.b_t = b_t;
    s.b_tk = b_tk;
    return s;
}

ConditionalState random_state(Gen& g) {
    const double t = g.uniform(0.0, 0.999);
    const double w_t = g.normal() * std::sqrt(t);
    const double maxk = std::max(w_t, 0.0) + std::abs(g.normal()) * 0.3;
    return state(t, w_t, 0.0, maxk, maxk, g.normal() * std::sqrt(t), 0.0);
}

const double kTwoOverRootTwoPi = 2.0 / std::sqrt(2.0 * std::numbers::pi);

}  // namespace

TEST_CASE("alpha examples") {
    const auto g = build_grid({0, 1}, 10);
    const auto start = state(0.0, 0.0, 0.0, 0.0, 0.0);
    CHECK(alpha(IncrementSign{}, 1, start, g) == doctest::Approx(0.7978845608).epsilon(1e-10));
    CHECK(alpha(IncrementSign{}, 1, start, g) == doctest::Approx(kTwoOverRootTwoPi).epsilon(1e-15));
    CHECK(alpha(PathwiseBarrier{0.5}, 1, state(0.5, 0.2, 0.0, 0.9, 0.9), g) == 0.0);
    CHECK(alpha(PathwiseBarrier{0.5}, 0, state(0.5, 0.2, 0.0, 0.9, 0.9), g) == 0.0);
    for (double c : {0.1, 1.0, 3.0}) {
        CHECK(alpha(DrawdownBarrier{c}, 1, state(0.3, 0.7, 0.0, 0.7, 0.7), g) == 0.0);
        CHECK(alpha(DrawdownBarrier{c}, 0, state(0.3, 0.7, 0.0, 0.7, 0.7), g) == 0.0);
    }
    CHECK(alpha(JointIncrementSign{}, 1, start, g) == doctest::Approx(0.7978845608).epsilon(1e-10));
    CHECK(gamma(JointIncrementSign{}, 1, start, g) == doctest::Approx(0.7978845608).epsilon(1e-10));
    CHECK(gamma(IncrementSign{}, 1, start, g) == 0.0);
    CHECK_THROWS_AS(alpha(IncrementSign{}, 1, state(1.0, 0, 0, 0, 0), g), std::exception);
}

TEST_CASE("alpha_binary_general examples") {
    const double q = 0.37;
    CHECK(alpha_binary_general(0.5, q, 1) == doctest::Approx(2 * q).epsilon(1e-15));
    CHECK(alpha_binary_general(0.5, q, 0) == doctest::Approx(-2 * q).epsilon(1e-15));
    const auto g = build_grid({0, 1}, 10);
    const auto start = state(0.0, 0.0, 0.0, 0.0, 0.0);
    CHECK(std::abs(drift_via_general(IncrementSign{}, 1, start, g) - alpha(IncrementSign{}, 1, start, g)) <= 1e-9);
    CHECK_THROWS_AS(alpha_binary_general(0.0, q, 1), std::domain_error);
    CHECK_THROWS_AS(alpha_binary_general(1.0, q, 0), std::domain_error);
}

TEST_CASE("theta examples") {
    const MarketCoefficients c{};
    CHECK(theta(c, 1, 0.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(theta(c, 1, 0.5) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(std::abs(theta(c, 0, -0.2)) <= 1e-15);
}

TEST_CASE("property: projection identity and general formula at random states") {
    const auto g = build_grid({0, 1}, 4);
    Gen gen(303);
    const std::vector<RegimeSpec> specs{IncrementSign{}, DrawdownBarrier{0.8}, PathwiseBarrier{1.0},
                                        Noisy{IncrementSign{}, {0.5}}, Noisy{DrawdownBarrier{0.5}, {0.3}},
                                        Noisy{PathwiseBarrier{0.7}, {0.9}}, JointIncrementSign{}};
    for (int i = 0; i < 3000; ++i) {
        const auto s = random_state(gen);
        for (const auto& spec : specs) {
            const double p1 = conditional_prob(spec, 1, s, g);
            if (p1 < 1e-6 || p1 > 1 - 1e-6) continue;
            const double a0 = alpha(spec, 0, s, g);
            const double a1 = alpha(spec, 1, s, g);
            const double scale = std::max(1.0, std::abs(a0) + std::abs(a1));
            INFO(regime_name(spec), " t=", s.t, " w=", s.w_t);
            CHECK(std::abs(p1 * a1 + (1 - p1) * a0) <= 1e-9 * scale);
            CHECK(std::abs(drift_via_general(spec, 0, s, g) - a0) <= 1e-9 * scale);
            CHECK(std::abs(drift_via_general(spec, 1, s, g) - a1) <= 1e-9 * scale);
            if (needs_second_driver(spec)) {
                const double g0 = gamma(spec, 0, s, g);
                const double g1 = gamma(spec, 1, s, g);
                CHECK(std::abs(p1 * g1 + (1 - p1) * g0) <= 1e-9 * std::max(1.0, std::abs(g0) + std::abs(g1)));
                CHECK(std::abs(drift_via_general(spec, 1, s, g, 1) - g1) <= 1e-9 * std::max(1.0, std::abs(g1)));
            }
        }
    }
}

TEST_CASE("property: swapping the drivers maps alpha to gamma") {
    const auto g = build_grid({0, 1}, 4);
    Gen gen(404);
    for (int i = 0; i < 2000; ++i) {
        const auto s = random_state(gen);
        ConditionalState swapped = s;
        swapped.w_t = *s.b_t;
        swapped.w_tk = *s.b_tk;
        swapped.b_t = s.w_t;
        swapped.b_tk = s.w_tk;
        for (int e : {0, 1}) {
            CHECK(alpha(JointIncrementSign{}, e, s, g) == gamma(JointIncrementSign{}, e, swapped, g));
            CHECK(gamma(JointIncrementSign{}, e, s, g) == alpha(JointIncrementSign{}, e, swapped, g));
        }
    }
}

TEST_CASE("saturation is flagged") {
    const auto g = build_grid({0, 1}, 4);
    const double tau = 1e-13;
    const auto s = state(1.0 - tau, 5.0 * std::sqrt(tau), 0.0, 0.0, 0.0);
    const auto eval = evaluate_drift(IncrementSign{}, s, g, 0);
    CHECK(eval.saturated);
    CHECK(eval.alpha_e0 == -kAlphaCap);
    CHECK(std::isfinite(eval.alpha_e1));
    const auto calm = evaluate_drift(IncrementSign{}, state(0.5, 0.1, 0.0, 0.1, 0.1), g, 1);
    CHECK_FALSE(calm.saturated);
    CHECK(calm.alpha_realized == calm.alpha_e1);
}

TEST_CASE("decompose with zero drift leaves the path unchanged") {
    const auto g = build_grid({0, 1, 2}, 3);
    PathBundle b;
    b.w = {0.0, 0.1, 0.3, 0.6, 0.7, 0.9, 1.4};
    const RegimeSpec spec = DrawdownBarrier{0.5};
    b.eps = realize_chain(spec, b, g, {});
    decompose(b, spec, g);
    CHECK(b.w_hat == b.w);
    CHECK(b.saturated == 0);
    CHECK(b.alpha.back() == 0.0);
    CHECK_THROWS_AS([&] {
        PathBundle bad = b;
        bad.eps.clear();
        decompose(bad, spec, g);
    }(), std::invalid_argument);
}

TEST_CASE("W_hat is a Brownian motion in the enlarged filtration") {
    const auto g = build_grid({0, 1}, 200);
    const std::size_t n = 100000;
    const RegimeSpec spec = IncrementSign{};
    RunningStats terminal, cond;
    for (std::size_t i = 0; i < n; ++i) {
        auto b = sample_paths(g, RngSpec{4242, i}, false);
        b.eps = realize_chain(spec, b, g, {});
        decompose(b, spec, g);
        terminal.add(b.w_hat.back());
        if (b.eps[0] == 1) cond.add(b.w_hat[150] - b.w_hat[50]);
    }
    CHECK(testsupport::within(terminal.mean(), 0.0, terminal.stderr_mean()));
    CHECK(std::abs(terminal.variance() - 1.0) <= 0.02);
    CHECK(testsupport::within(cond.mean(), 0.0, cond.stderr_mean()));
}

TEST_CASE("quadratic variation gap of W_hat shrinks with the step") {
    auto mean_gap = [](std::size_t m) {
        const auto g = build_grid({0, 1}, m);
        RunningStats gap;
        for (std::size_t i = 0; i < 500; ++i) {
            auto b = sample_paths(g, RngSpec{9, i}, false);
            b.eps = realize_chain(IncrementSign{}, b, g, {});
            decompose(b, IncrementSign{}, g);
            double qw = 0, qh = 0;
            for (std::size_t j = 1; j < b.w.size(); ++j) {
                qw += (b.w[j] - b.w[j - 1]) * (b.w[j] - b.w[j - 1]);
                qh += (b.w_hat[j] - b.w_hat[j - 1]) * (b.w_hat[j] - b.w_hat[j - 1]);
            }
            gap.add(std::abs(qh - qw) / qw);
        }
        return gap.mean();
    };
    const double coarse = mean_gap(50);
    const double fine = mean_gap(800);
    CHECK(fine < coarse / 4.0);
}

TEST_CASE("regression recovers the increment drift") {
    const auto g = build_grid({0, 1}, 4);
    const auto s = state(0.4, 0.3, 0.0, 0.3, 0.3);
    oracle::State os;
    os.tau = 0.6;
    os.w_t = 0.3;
    const auto est = oracle::regression_alpha({oracle::Chain::IncrementSign}, os, 1, 1e-7, 20000, RngSpec{5, 0});
    REQUIRE_FALSE(est.skipped);
    CHECK(testsupport::within(est.value, alpha(IncrementSign{}, 1, s, g), est.se));
}

TEST_CASE("general binary formula with the complement supplied") {
    CHECK(alpha_binary_general(0.25, 0.75, 0.4, 1) == doctest::Approx(alpha_binary_general(0.25, 0.4, 1)));
    CHECK(alpha_binary_general(0.25, 0.75, 0.4, 0) == doctest::Approx(-0.4 / 0.75));
    // p1 within 1e-15 of one: 1 - p1 would be off by ~10%, the supplied complement is exact
    CHECK(alpha_binary_general(1.0, 1e-15, 2e-15, 0) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(alpha_binary_general(0.5, 0.0, 1.0, 1), std::domain_error);
}

TEST_CASE("noisy drift applies the clamp to the noisy probability") {
    const auto g = build_grid({0, 1}, 1);
    // P(eps=1|F_t) = Phi(-7.5) ~ 3e-14 > 0 but p times it is below the clamp
    const ConditionalState s = state(0.0, -7.5, 0.0, 0.0, 0.0);
    const Noisy noisy{IncrementSign{}, {0.01}};
    const double expect = 0.01 * norm_pdf(-7.5) / kProbClamp;
    CHECK(alpha(noisy, 1, s, g) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(drift_via_general(noisy, 1, s, g) == doctest::Approx(expect).epsilon(1e-9));
    // away from the clamp the base drift passes through unchanged
    const ConditionalState mid = state(0.5, -0.3, 0.0, 0.0, 0.0);
    CHECK(alpha(noisy, 1, mid, g) == alpha(IncrementSign{}, 1, mid, g));
}

TEST_CASE("antithetic regression resolves the drift far below the curvature scale") {
    const auto g = build_grid({0, 1}, 1);
    const ConditionalState s = state(0.2, -0.4, 0.0, 1.6, 1.6);
    oracle::State os;
    os.tau = 0.8;
    os.w_t = -0.4;
    os.max_from_0 = 1.6;
    os.max_from_tk = 1.6;
    const auto est = oracle::regression_alpha({oracle::Chain::DrawdownBarrier, 1.0}, os, 0, 1e-6, 20000, RngSpec{6, 0});
    REQUIRE_FALSE(est.skipped);
    CHECK(est.se < 1e-6);
    CHECK(testsupport::within(est.value, alpha(DrawdownBarrier{1.0}, 0, s, g), est.se));
}
