#include "insider/strategy.hpp"

#include <cmath>
#include <stdexcept>

#include "overloaded.hpp"

namespace insider {

using detail::overloaded;

std::string strategy_name(const Strategy& s) {
    return std::visit(overloaded{
                          [](const LogOptimalG&) { return std::string("log_optimal"); },
                          [](const ConstantMix& c) {
                              std::string v = std::to_string(c.pi);
                              v.erase(v.find_last_not_of('0') + 1);
                              if (!v.empty() && v.back() == '.') v.pop_back();
                              return "constant_mix(" + v + ")";
                          },
                          [](const MertonFrozen& m) { return "merton_frozen(" + std::to_string(m.e) + ")"; },
                          [](const CrraOptimalG& c) {
                              std::string v = std::to_string(c.gamma);
                              v.erase(v.find_last_not_of('0') + 1);
                              if (!v.empty() && v.back() == '.') v.pop_back();
                              return "crra_optimal(" + v + ")";
                          },
                      },
                      s);
}

double strategy_pi(const Strategy& s, const MarketCoefficients& coeffs, const StrategyContext& ctx) {
    return std::visit(overloaded{
                          [&](const LogOptimalG&) { return log_optimal_pi(coeffs, ctx.e, ctx.alpha); },
                          [](const ConstantMix& c) { return c.pi; },
                          [&](const MertonFrozen& m) { return log_optimal_pi(coeffs, m.e, 0.0); },
                          [](const CrraOptimalG&) -> double {
                              throw std::logic_error("the CRRA strategy has no trading path");
                          },
                      },
                      s);
}

std::string utility_name(const UtilitySpec& u) {
    return std::visit(overloaded{
                          [](const LogUtility&) { return std::string("log"); },
                          [](const PowerUtility&) { return std::string("power"); },
                      },
                      u);
}

void validate(const UtilitySpec& u) {
    if (const auto* p = std::get_if<PowerUtility>(&u)) {
        if (!(p->gamma < 1.0) || p->gamma == 0.0 || !std::isfinite(p->gamma)) {
            throw std::invalid_argument("power utility needs gamma < 1 and gamma != 0");
        }
    }
}

double utility(const UtilitySpec& u, double x) {
    if (!(x > 0.0)) throw std::domain_error("utility: wealth must be positive");
    return std::visit(overloaded{
                          [&](const LogUtility&) { return std::log(x); },
                          [&](const PowerUtility& p) { return std::pow(x, p.gamma) / p.gamma; },
                      },
                      u);
}

double marginal_utility(const UtilitySpec& u, double x) {
    if (!(x > 0.0)) throw std::domain_error("marginal utility: wealth must be positive");
    return std::visit(overloaded{
                          [&](const LogUtility&) { return 1.0 / x; },
                          [&](const PowerUtility& p) { return std::pow(x, p.gamma - 1.0); },
                      },
                      u);
}

double inverse_marginal(const UtilitySpec& u, double y) {
    if (!(y > 0.0)) throw std::domain_error("inverse marginal: argument must be positive");
    return std::visit(overloaded{
                          [&](const LogUtility&) { return 1.0 / y; },
                          [&](const PowerUtility& p) { return std::pow(y, 1.0 / (p.gamma - 1.0)); },
                      },
                      u);
}

double log_optimal_pi(const MarketCoefficients& coeffs, int e, double alpha_realized) {
    const double xi = coeffs.xi(e);
    if (!(xi > 0.0)) throw std::invalid_argument("log_optimal_pi: volatility must be positive");
    return (coeffs.eta(e) - coeffs.r(e)) / (xi * xi) + alpha_realized / xi;
}

double incomplete_log_optimal_pi(const MarketCoefficients& coeffs, int e, double alpha_realized) {
    return log_optimal_pi(coeffs, e, alpha_realized);
}

double f_baseline_value(const MarketCoefficients& coeffs, const std::vector<double>& probs, const TimeGrid& grid,
                        double x0) {
    if (!(x0 > 0.0)) throw std::invalid_argument("f_baseline_value: x0 must be positive");
    if (probs.size() != grid.n_intervals()) throw std::invalid_argument("f_baseline_value: one probability per interval");
    const double m0 = coeffs.m0();
    const double m1 = coeffs.m1();
    double value = std::log(x0);
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double p = probs[k];
        const double dt = grid.interval_length(k);
        value += dt * (p * coeffs.r1 + (1.0 - p) * coeffs.r0);
        value += 0.5 * dt * (p * m1 * m1 + (1.0 - p) * m0 * m0);
    }
    return value;
}

double f_baseline_value(const MarketCoefficients& coeffs, const RegimeSpec& spec, const TimeGrid& grid, double x0) {
    std::vector<double> probs(grid.n_intervals());
    for (std::size_t k = 0; k < probs.size(); ++k) probs[k] = unconditional_prob(spec, 1, k, grid);
    return f_baseline_value(coeffs, probs, grid, x0);
}

double budget_value(const UtilitySpec& u, const std::vector<double>& deflator_samples, double y) {
    if (deflator_samples.empty()) throw std::invalid_argument("budget: empty sample set");
    double sum = 0.0;
    for (double h : deflator_samples) sum += h * inverse_marginal(u, y * h);
    return sum / static_cast<double>(deflator_samples.size());
}

double crra_budget_multiplier(const UtilitySpec& u, const std::vector<double>& deflator_samples, double x0) {
    if (!(x0 > 0.0)) throw std::invalid_argument("budget multiplier: x0 must be positive");
    if (deflator_samples.empty()) throw std::invalid_argument("budget multiplier: empty sample set");
    for (double h : deflator_samples) {
        if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("budget multiplier: samples must be positive");
    }
    validate(u);
    if (std::holds_alternative<LogUtility>(u)) return 1.0 / x0;

    double lo = std::log(1e-12);
    double hi = std::log(1e12);
    // budget is decreasing in y
    if (budget_value(u, deflator_samples, std::exp(lo)) < x0 || budget_value(u, deflator_samples, std::exp(hi)) > x0) {
        throw std::runtime_error("budget multiplier: no bracket in [1e-12, 1e12]");
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (budget_value(u, deflator_samples, std::exp(mid)) > x0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace insider
