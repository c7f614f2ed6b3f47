#include "insider/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "insider/drift.hpp"

namespace insider {

namespace {

void check_inputs(const std::vector<std::uint8_t>& eps, const PathBundle& bundle, const TimeGrid& grid) {
    if (bundle.w.size() != grid.n_fine()) throw std::invalid_argument("path does not match grid");
    if (eps.size() != grid.n_intervals()) throw std::invalid_argument("chain length does not match grid");
}

}  // namespace

AssetPaths simulate_assets(const MarketCoefficients& coeffs, const std::vector<std::uint8_t>& eps,
                           const PathBundle& bundle, const TimeGrid& grid, double s0) {
    check_inputs(eps, bundle, grid);
    if (!(s0 > 0.0)) throw std::invalid_argument("simulate_assets: s0 must be positive");
    const std::size_t n_fine = grid.n_fine();
    AssetPaths out;
    out.d.assign(n_fine, 1.0);
    out.s.assign(n_fine, s0);
    double log_d = 0.0;
    double log_s = std::log(s0);
    for (std::size_t j = 0; j + 1 < n_fine; ++j) {
        const int e = eps[grid.interval_of(j)];
        const double h = grid.fine_times[j + 1] - grid.fine_times[j];
        const double xi = coeffs.xi(e);
        log_d += coeffs.r(e) * h;
        log_s += (coeffs.eta(e) - 0.5 * xi * xi) * h + xi * (bundle.w[j + 1] - bundle.w[j]);
        out.d[j + 1] = std::exp(log_d);
        out.s[j + 1] = std::exp(log_s);
    }
    return out;
}

WealthPath simulate_wealth(const Strategy& strategy, const MarketCoefficients& coeffs,
                           const std::vector<std::uint8_t>& eps, const PathBundle& bundle, const TimeGrid& grid,
                           double x0) {
    check_inputs(eps, bundle, grid);
    if (!(x0 > 0.0)) throw std::invalid_argument("simulate_wealth: x0 must be positive");
    const bool needs_alpha = std::holds_alternative<LogOptimalG>(strategy);
    if (needs_alpha && bundle.alpha.size() != grid.n_fine()) {
        throw std::invalid_argument("simulate_wealth: the log-optimal strategy needs a decomposed bundle");
    }
    const std::size_t n_fine = grid.n_fine();
    WealthPath out;
    out.x.assign(n_fine, x0);
    out.pi.assign(n_fine, 0.0);
    double log_x = std::log(x0);
    for (std::size_t j = 0; j + 1 < n_fine; ++j) {
        const int e = eps[grid.interval_of(j)];
        StrategyContext ctx{grid.fine_times[j], e, needs_alpha ? bundle.alpha[j] : 0.0};
        const double pi = strategy_pi(strategy, coeffs, ctx);
        if (!std::isfinite(pi)) throw std::domain_error("simulate_wealth: non-finite portfolio fraction");
        const double h = grid.fine_times[j + 1] - grid.fine_times[j];
        const double r = coeffs.r(e);
        const double xi = coeffs.xi(e);
        log_x += (r + pi * (coeffs.eta(e) - r) - 0.5 * pi * pi * xi * xi) * h + pi * xi * (bundle.w[j + 1] - bundle.w[j]);
        out.pi[j] = pi;
        out.x[j + 1] = std::exp(log_x);
    }
    out.terminal_log_utility = log_x;
    return out;
}

double log_optimal_terminal_exact(const RegimeSpec& spec, const MarketCoefficients& coeffs, const PathBundle& bundle,
                                  const TimeGrid& grid, double x0) {
    if (!is_complete_market(spec)) {
        throw std::invalid_argument("exact log-optimal wealth needs a chain read from W alone");
    }
    check_inputs(bundle.eps, bundle, grid);
    if (!(x0 > 0.0)) throw std::invalid_argument("x0 must be positive");
    const auto base = realize_base_chain(spec, bundle, grid);
    double log_x = std::log(x0);
    for (std::size_t k = 0; k < grid.n_intervals(); ++k) {
        const int e = bundle.eps[k];
        const double dt = grid.interval_length(k);
        const double m = coeffs.premium(e);
        const std::size_t jk = grid.jump_index(k);
        const double dw = bundle.w[grid.jump_index(k + 1)] - bundle.w[jk];
        const double start = std::max(conditional_prob(spec, e, state_at(bundle, grid, jk), grid), kProbClamp);
        const double end = settled_prob(spec, e, k, base[k]);
        if (!(end > 0.0)) throw std::domain_error("realized outcome has zero settled probability");
        log_x += coeffs.r(e) * dt + 0.5 * m * m * dt + m * dw + std::log(end / start);
    }
    return log_x;
}

std::vector<double> theta_path(const MarketCoefficients& coeffs, const PathBundle& bundle, const TimeGrid& grid) {
    if (bundle.alpha.size() != grid.n_fine()) throw std::invalid_argument("theta_path: bundle is not decomposed");
    if (bundle.eps.size() != grid.n_intervals()) throw std::invalid_argument("theta_path: chain not realized");
    std::vector<double> out(grid.n_fine(), 0.0);
    for (std::size_t j = 0; j + 1 < grid.n_fine(); ++j) {
        out[j] = theta(coeffs, bundle.eps[grid.interval_of(j)], bundle.alpha[j]);
    }
    return out;
}

DeflatorPath deflator(const std::vector<double>& theta, const PathBundle& bundle, const TimeGrid& grid,
                      const MarketCoefficients& coeffs, const std::vector<double>* nu) {
    const std::size_t n_fine = grid.n_fine();
    if (theta.size() != n_fine || bundle.w_hat.size() != n_fine) {
        throw std::invalid_argument("deflator: theta and the decomposed driver must live on the fine grid");
    }
    if (bundle.eps.size() != grid.n_intervals()) throw std::invalid_argument("deflator: chain not realized");
    if (nu && (nu->size() != n_fine || bundle.b_hat.size() != n_fine)) {
        throw std::invalid_argument("deflator: nu needs the decomposed second driver");
    }
    DeflatorPath out;
    out.z.assign(n_fine, 1.0);
    out.d.assign(n_fine, 1.0);
    double log_z = 0.0;
    double log_d = 0.0;
    for (std::size_t j = 0; j + 1 < n_fine; ++j) {
        const double h = grid.fine_times[j + 1] - grid.fine_times[j];
        const double th = theta[j];
        log_z += -th * (bundle.w_hat[j + 1] - bundle.w_hat[j]) - 0.5 * th * th * h;
        if (nu) {
            const double v = (*nu)[j];
            log_z += -v * (bundle.b_hat[j + 1] - bundle.b_hat[j]) - 0.5 * v * v * h;
        }
        log_d += coeffs.r(bundle.eps[grid.interval_of(j)]) * h;
        out.z[j + 1] = std::exp(log_z);
        out.d[j + 1] = std::exp(log_d);
    }
    return out;
}

}  // namespace insider
