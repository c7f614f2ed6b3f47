#pragma once

#include <optional>

#include "insider/coefficients.hpp"
#include "insider/grid.hpp"
#include "insider/paths.hpp"
#include "insider/regime.hpp"

namespace insider {

inline constexpr double kAlphaCap = 1e6;

struct DriftEvaluation {
    double alpha_e0 = 0.0;
    double alpha_e1 = 0.0;
    double alpha_realized = 0.0;
    std::optional<double> gamma_e0;
    std::optional<double> gamma_e1;
    std::optional<double> gamma_realized;
    bool saturated = false;  // some value hit kAlphaCap
};

/// Information drift of W for outcome e, from each chain's own closed form.
/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp]; the result is
/// capped at kAlphaCap in absolute value.
double alpha(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid);

/// Drift of the second driver B (zero unless the chain reads B).
double gamma(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid);

/// num * (e - p) / (p (1 - p)), the drift of a binary outcome with
/// conditional probability p and Malliavin numerator num.
/// Throws std::domain_error when p is not strictly inside (0, 1).
double alpha_binary_general(double cond_prob_1, double malliavin_num, int realized_e);
/// Same, with the complementary probability supplied so it keeps its accuracy near 1.
double alpha_binary_general(double cond_prob_1, double cond_prob_0, double malliavin_num, int realized_e);

/// The same drift rebuilt from conditional_prob and malliavin_numerator via
/// alpha_binary_general (driver 1 gives gamma). Used to cross-check the
/// per-chain closed forms; clamping matches alpha().
double drift_via_general(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid,
                         int driver = 0);

DriftEvaluation evaluate_drift(const RegimeSpec& spec, const ConditionalState& state, const TimeGrid& grid,
                               int realized_e);

/// Market price of risk (eta_e - r_e) / xi_e + alpha.
double theta(const MarketCoefficients& coeffs, int realized_e, double alpha_realized);

/// Fills alpha (gamma), w_hat (b_hat) and the saturation count. bundle.eps
/// must be realized. Drifts are taken at the left end of each fine step; the
/// entry at the horizon is 0.
void decompose(PathBundle& bundle, const RegimeSpec& spec, const TimeGrid& grid);

}  // namespace insider
