#pragma once

#include <cstdint>
#include <vector>

#include "insider/coefficients.hpp"
#include "insider/grid.hpp"
#include "insider/paths.hpp"
#include "insider/regime.hpp"
#include "insider/strategy.hpp"

namespace insider {

struct AssetPaths {
    std::vector<double> d;  // bank account
    std::vector<double> s;  // risky asset
};

/// Exact log scheme with coefficients frozen at eps_{t_k} on [t_k, t_{k+1}).
AssetPaths simulate_assets(const MarketCoefficients& coeffs, const std::vector<std::uint8_t>& eps,
                           const PathBundle& bundle, const TimeGrid& grid, double s0 = 1.0);

struct WealthPath {
    std::vector<double> x;
    std::vector<double> pi;  // fraction held over each step (last entry unused)
    double terminal_log_utility = 0.0;
};

/// Log-Euler wealth with forward increments of W. LogOptimalG reads bundle.alpha.
WealthPath simulate_wealth(const Strategy& strategy, const MarketCoefficients& coeffs,
                           const std::vector<std::uint8_t>& eps, const PathBundle& bundle, const TimeGrid& grid,
                           double x0);

/// ln X_T of the continuous-time log-optimal strategy, computed per interval as
/// r dt + M^2 dt / 2 + M dW + ln(P(eps|F_{t_{k+1}}) / P(eps|F_{t_k})).
/// Needs bundle.eps; defined for chains read from W alone (noisy included).
double log_optimal_terminal_exact(const RegimeSpec& spec, const MarketCoefficients& coeffs, const PathBundle& bundle,
                                  const TimeGrid& grid, double x0);

/// theta on the fine grid from bundle.alpha and bundle.eps (0 at the horizon).
std::vector<double> theta_path(const MarketCoefficients& coeffs, const PathBundle& bundle, const TimeGrid& grid);

struct DeflatorPath {
    std::vector<double> z;
    std::vector<double> d;
};

/// d ln Z = -theta dW_hat - theta^2 dt / 2, plus -nu dB_hat - nu^2 dt / 2
/// when nu is given (two-driver market).
DeflatorPath deflator(const std::vector<double>& theta, const PathBundle& bundle, const TimeGrid& grid,
                      const MarketCoefficients& coeffs, const std::vector<double>* nu = nullptr);

}  // namespace insider
