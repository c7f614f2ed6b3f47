#pragma once

#include <string>
#include <variant>
#include <vector>

#include "insider/coefficients.hpp"
#include "insider/grid.hpp"
#include "insider/regime.hpp"

namespace insider {

struct LogOptimalG {};
struct ConstantMix {
    double pi = 0.0;
};
// Merton fraction of regime e, held whatever the realized regime
struct MertonFrozen {
    int e = 1;
};
// Terminal-wealth construction only; no trading path is produced
struct CrraOptimalG {
    double gamma = 0.5;
};

using Strategy = std::variant<LogOptimalG, ConstantMix, MertonFrozen, CrraOptimalG>;

std::string strategy_name(const Strategy& s);

struct StrategyContext {
    double t = 0.0;
    int e = 0;
    double alpha = 0.0;
};

/// Risky fraction at a left endpoint. Throws for CrraOptimalG.
double strategy_pi(const Strategy& s, const MarketCoefficients& coeffs, const StrategyContext& ctx);

struct LogUtility {};
struct PowerUtility {
    double gamma = 0.5;  // nonzero, below 1
};
using UtilitySpec = std::variant<LogUtility, PowerUtility>;

std::string utility_name(const UtilitySpec& u);
void validate(const UtilitySpec& u);
double utility(const UtilitySpec& u, double x);
double marginal_utility(const UtilitySpec& u, double x);
double inverse_marginal(const UtilitySpec& u, double y);  // I = (U')^{-1}

/// theta / xi = (eta_e - r_e) / xi_e^2 + alpha / xi_e
double log_optimal_pi(const MarketCoefficients& coeffs, int e, double alpha_realized);

/// Same form in the two-driver market; the B drift never enters.
double incomplete_log_optimal_pi(const MarketCoefficients& coeffs, int e, double alpha_realized);

/// ln x0 + sum_k dt_k (E[r_eps] + E[M_eps^2] / 2), with P(eps_k = 1) taken from probs.
double f_baseline_value(const MarketCoefficients& coeffs, const std::vector<double>& probs, const TimeGrid& grid,
                        double x0);
double f_baseline_value(const MarketCoefficients& coeffs, const RegimeSpec& spec, const TimeGrid& grid, double x0);

/// Solves mean(H * I(y * H)) = x0 over the sample set by bisection on ln y in
/// [1e-12, 1e12]. Log utility returns 1 / x0 directly.
double crra_budget_multiplier(const UtilitySpec& u, const std::vector<double>& deflator_samples, double x0);

/// mean(H * I(y * H)) for the given multiplier.
double budget_value(const UtilitySpec& u, const std::vector<double>& deflator_samples, double y);

}  // namespace insider
