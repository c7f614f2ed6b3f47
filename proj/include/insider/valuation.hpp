#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "insider/coefficients.hpp"
#include "insider/grid.hpp"
#include "insider/paths.hpp"
#include "insider/regime.hpp"
#include "insider/rng.hpp"
#include "insider/strategy.hpp"

namespace insider {

/// -(p ln p + (1-p) ln(1-p)), with 0 ln 0 = 0.
double binary_entropy(double p);

/// Sum of binary entropies.
double entropy_term(const std::vector<double>& probs);

/// H(x) - x y H(y)
double noisy_entropy_gap_h(double x, double y);

struct McOptions {
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    std::size_t nodes = 16;  // Gauss-Legendre nodes per interval: 8, 16 or 32
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct IntervalIntegral {
    double value = 0.0;
    double se = 0.0;
    std::vector<Estimate> per_interval;
    bool analytic = false;
};

/// sum_k int E[D_t eps_{t_k}] dt. Closed form for the increment chain,
/// Monte Carlo over the chain's conditional Malliavin numerator otherwise.
IntervalIntegral malliavin_term(const RegimeSpec& spec, const TimeGrid& grid, const McOptions& opts = {});

/// Per interval, (1/2) int E[alpha_t^2] dt with alpha the drift of the realized
/// outcome, by Monte Carlo at Gauss-Legendre nodes in u = sqrt(t_{k+1} - t).
IntervalIntegral information_energy_mc(const RegimeSpec& spec, const TimeGrid& grid, const McOptions& opts = {});

struct IntervalValue {
    double prob1 = 0.0;
    double entropy = 0.0;
    double malliavin = 0.0;
    double malliavin_stderr = 0.0;
    double value = 0.0;
};

struct InformationValue {
    double entropy_term = 0.0;
    double malliavin_term = 0.0;
    double malliavin_stderr = 0.0;
    double value = 0.0;  // entropy_term + (M1 - M0) malliavin_term
    std::vector<IntervalValue> per_interval;
};

/// Value of the chain's information under log utility. Only for the
/// increment, drawdown and pathwise chains.
InformationValue value_of_information_closed(const RegimeSpec& spec, const MarketCoefficients& coeffs,
                                             const TimeGrid& grid, const McOptions& opts = {});

struct NoisyValue {
    double v_gtilde_minus_vf = 0.0;
    double v_g_minus_gtilde = 0.0;
    double v_g_minus_vf = 0.0;
    double malliavin_stderr = 0.0;
    std::vector<double> h_values;  // h(P(eps_k = 1), p_k) per interval
    std::vector<IntervalValue> per_interval;  // pieces of v_gtilde_minus_vf
};

NoisyValue noisy_value_decomposition(const Noisy& spec, const MarketCoefficients& coeffs, const TimeGrid& grid,
                                     const McOptions& opts = {});

struct Scenario {
    TimeGrid grid;
    MarketCoefficients coeffs;
    RegimeSpec regime;
    std::vector<Strategy> strategies;
    UtilitySpec utility;
    std::size_t n_paths = 1000;
    std::uint64_t seed = 1;
    double x0 = 1.0;
    std::string output_dir = "out";
};

void validate(const Scenario& scenario);

/// One simulated world: drivers, realized chain and decomposition.
PathBundle simulate_world(const Scenario& scenario, RngSpec rng);

/// ln X_T of the log-optimal strategy on a simulated world (exact scheme
/// when the chain is read from W alone, log-Euler otherwise).
double log_optimal_log_wealth(const Scenario& scenario, const PathBundle& world);

inline constexpr double kMaxFlaggedFraction = 1e-3;

struct UtilityEstimate {
    std::string name;
    double mean = 0.0;
    double se = 0.0;
    std::size_t flagged_paths = 0;
    std::size_t n_paths = 0;
    bool rejected = false;  // flagged share above kMaxFlaggedFraction
    std::string scheme;
};

/// Sample mean and standard error of U(X_T). Path i uses stream rng.stream_id + i.
UtilityEstimate mc_expected_utility(const Strategy& strategy, const Scenario& scenario, std::size_t n_paths,
                                    RngSpec rng);

struct ScenarioEvaluation {
    std::vector<UtilityEstimate> strategies;
    std::size_t flagged_paths = 0;
    double budget_multiplier = 0.0;  // set when a CRRA strategy is present
};

/// All strategies on common paths.
ScenarioEvaluation evaluate_scenario(const Scenario& scenario);

}  // namespace insider
