#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "insider/drift.hpp"
#include "insider/market.hpp"
#include "insider/oracles/oracles.hpp"
#include "insider/stats.hpp"
#include "insider/strategy.hpp"
#include "support.hpp"

using namespace insider;

namespace {
const MarketCoefficients kCoeffs{};
}

TEST_CASE("log_optimal_pi examples") {
    CHECK(log_optimal_pi(kCoeffs, 1, 0.0) == doctest::Approx(0.09 / 0.09).epsilon(1e-14));
    CHECK(log_optimal_pi(kCoeffs, 1, 0.7978845608) == doctest::Approx(3.6596152).epsilon(1e-7));
    MarketCoefficients flat = kCoeffs;
    flat.eta0 = flat.r0;
    CHECK(log_optimal_pi(flat, 0, 0.0) == 0.0);
    CHECK(strategy_pi(MertonFrozen{0}, kCoeffs, {0.3, 1, 5.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(strategy_pi(ConstantMix{-0.5}, kCoeffs, {0.3, 1, 5.0}) == -0.5);
    CHECK_THROWS_AS(strategy_pi(CrraOptimalG{0.5}, kCoeffs, {}), std::logic_error);
    CHECK(strategy_name(ConstantMix{0.5}) == "constant_mix(0.5)");
    CHECK(strategy_name(ConstantMix{-1.0}) == "constant_mix(-1)");
    CHECK(strategy_name(MertonFrozen{1}) == "merton_frozen(1)");
}

TEST_CASE("incomplete log-optimal pi ignores the second drift") {
    CHECK(incomplete_log_optimal_pi(kCoeffs, 1, 0.7978845608) ==
          doctest::Approx(1.0 + 0.7978845608 / 0.3).epsilon(1e-14));
    CHECK(incomplete_log_optimal_pi(kCoeffs, 0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    const auto g = build_grid({0, 1, 2}, 20);
    auto b = sample_paths(g, RngSpec{1, 2}, true);
    b.eps = realize_chain(JointIncrementSign{}, b, g, {});
    decompose(b, JointIncrementSign{}, g);
    const auto base = simulate_wealth(LogOptimalG{}, kCoeffs, b.eps, b, g, 1.0);
    testsupport::Gen gen(9);
    for (double& v : b.gamma) v += 10.0 * gen.normal();
    for (double& v : b.b_hat) v += gen.normal();
    const auto perturbed = simulate_wealth(LogOptimalG{}, kCoeffs, b.eps, b, g, 1.0);
    CHECK(base.pi == perturbed.pi);
    CHECK(base.x == perturbed.x);
}

TEST_CASE("f_baseline_value examples") {
    const auto g = build_grid({0, 1, 2, 3, 4}, 1);
    CHECK(f_baseline_value(kCoeffs, IncrementSign{}, g, 1.0) == doctest::Approx(0.17).epsilon(1e-14));
    CHECK(f_baseline_value(kCoeffs, std::vector<double>(4, 0.0), g, 2.0) ==
          doctest::Approx(std::log(2.0) + 0.04 + 0.5 * 0.04 * 4).epsilon(1e-14));
    const auto uneven = build_grid({0, 0.5, 2.0}, 1);
    const std::vector<double> probs{0.3, 0.8};
    const double total = f_baseline_value(kCoeffs, probs, uneven, 1.0);
    double parts = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto piece = build_grid({0, uneven.interval_length(k)}, 1);
        parts += f_baseline_value(kCoeffs, std::vector<double>{probs[k]}, piece, 1.0);
    }
    CHECK(total == doctest::Approx(parts).epsilon(1e-14));
    CHECK_THROWS_AS(f_baseline_value(kCoeffs, probs, g, 1.0), std::invalid_argument);
}

TEST_CASE("utility functions") {
    const PowerUtility half{0.5};
    CHECK(utility(half, 4.0) == doctest::Approx(4.0));
    CHECK(marginal_utility(half, 4.0) == doctest::Approx(0.5));
    CHECK(inverse_marginal(half, 0.5) == doctest::Approx(4.0));
    CHECK(inverse_marginal(LogUtility{}, 0.25) == 4.0);
    CHECK_THROWS_AS(validate(UtilitySpec{PowerUtility{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(UtilitySpec{PowerUtility{0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(utility(LogUtility{}, 0.0), std::domain_error);
    // Inada limits
    CHECK(inverse_marginal(half, 1e-100) > 1e100);
    CHECK(inverse_marginal(half, 1e100) < 1e-100);
}

TEST_CASE("budget multiplier") {
    const auto g = build_grid({0, 1}, 10);
    const std::size_t n = 100000;
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto b = sample_paths(g, RngSpec{31, i}, SampleOptions{false, false});
        b.eps = {1};
        b.alpha.assign(g.n_fine(), 0.0);
        b.w_hat = b.w;
        const auto dz = deflator(theta_path(kCoeffs, b, g), b, g, kCoeffs);
        h[i] = dz.z.back() / dz.d.back();
    }
    CHECK(crra_budget_multiplier(LogUtility{}, h, 2.5) == 1.0 / 2.5);

    const UtilitySpec power = PowerUtility{0.5};
    const double x0 = 1.3;
    const double y = crra_budget_multiplier(power, h, x0);
    CHECK(std::abs(budget_value(power, h, y) - x0) < 1e-8);

    // budget = E[H^-1] / y^2 for gamma = 1/2, so y = sqrt(E[H^-1] / x0)
    const double mu = -0.01 - 0.5 * 0.09;
    const double oracle_moment = oracle::lognormal_moment(mu, 0.3, -1.0);
    CHECK(oracle_moment == doctest::Approx(std::exp(0.1)).epsilon(1e-10));
    RunningStats inv;
    for (double v : h) inv.add(1.0 / v);
    const double y_oracle = std::sqrt(oracle_moment / x0);
    const double y_se = inv.stderr_mean() / (2.0 * std::sqrt(inv.mean() * x0));
    CHECK(testsupport::within(y, y_oracle, y_se));

    CHECK_THROWS_AS(crra_budget_multiplier(power, h, 1e30), std::runtime_error);
    CHECK_THROWS_AS(crra_budget_multiplier(power, {1.0, -1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("CRRA terminal wealth dominates traded strategies") {
    const auto g = build_grid({0, 1, 2}, 50);
    const std::size_t n = 50000;
    const UtilitySpec power = PowerUtility{0.5};
    const std::vector<Strategy> tested{ConstantMix{-1.0}, ConstantMix{0.0}, ConstantMix{0.5},
                                       ConstantMix{1.0}, ConstantMix{2.0}, LogOptimalG{}};
    std::vector<double> h(n);
    std::vector<RunningStats> u(tested.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto b = sample_paths(g, RngSpec{41, i}, false);
        b.eps = realize_chain(IncrementSign{}, b, g, {});
        decompose(b, IncrementSign{}, g);
        const auto dz = deflator(theta_path(kCoeffs, b, g), b, g, kCoeffs);
        h[i] = dz.z.back() / dz.d.back();
        for (std::size_t s = 0; s < tested.size(); ++s) {
            u[s].add(utility(power, simulate_wealth(tested[s], kCoeffs, b.eps, b, g, 1.0).x.back()));
        }
    }
    const double y = crra_budget_multiplier(power, h, 1.0);
    RunningStats crra;
    double budget = 0.0;
    for (double v : h) {
        const double x = inverse_marginal(power, y * v);
        crra.add(utility(power, x));
        budget += v * x;
    }
    CHECK(std::abs(budget / static_cast<double>(n) - 1.0) < 1e-8);
    for (std::size_t s = 0; s < tested.size(); ++s) {
        INFO(strategy_name(tested[s]));
        CHECK(crra.mean() >= u[s].mean() - 3.0 * std::hypot(crra.stderr_mean(), u[s].stderr_mean()));
    }
}
