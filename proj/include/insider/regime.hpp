#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "insider/grid.hpp"
#include "insider/paths.hpp"
#include "insider/rng.hpp"

namespace insider {

// eps_k = 1{W_{t_{k+1}} > W_{t_k}}
struct IncrementSign {};

// eps_k = 1{M_{t_{k+1}} - W_{t_{k+1}} > c}, M the running maximum from time 0
struct DrawdownBarrier {
    double c = 1.0;
};

// eps_k = 1{sup_{[t_k, t_{k+1}]} W <= W_{t_k} + b_offset}
struct PathwiseBarrier {
    double b_offset = 1.0;
};

// eps_k = 1{W increases} * 1{B increases}; needs the second driver
struct JointIncrementSign {};

using BaseRegime = std::variant<IncrementSign, DrawdownBarrier, PathwiseBarrier>;

// eps~_k = L_k * eps_k with L_k ~ Bernoulli(p_k) independent of the drivers
struct Noisy {
    BaseRegime base;
    std::vector<double> p;
};

using RegimeSpec = std::variant<IncrementSign, DrawdownBarrier, PathwiseBarrier, Noisy, JointIncrementSign>;

/// Probabilities below this (or above 1 minus this) are clamped before any
/// density or drift is formed.
inline constexpr double kProbClamp = 1e-12;

std::string regime_name(const RegimeSpec& spec);
bool needs_second_driver(const RegimeSpec& spec) noexcept;
bool needs_maxima(const RegimeSpec& spec) noexcept;
bool is_complete_market(const RegimeSpec& spec) noexcept;  // chain measurable w.r.t. W alone
RegimeSpec as_regime(const BaseRegime& base);

/// Throws std::invalid_argument when parameters are out of range.
void validate(const RegimeSpec& spec, const TimeGrid& grid);

struct ConditionalState {
    std::size_t k = 0;
    double t = 0.0;
    double w_t = 0.0;
    double w_tk = 0.0;
    std::optional<double> run_max_from_0;
    std::optional<double> run_max_from_tk;
    std::optional<double> b_t;
    std::optional<double> b_tk;
};

/// State at fine index j (< n_fine - 1). Running maxima include the bridge
/// step maxima when the bundle carries them.
ConditionalState state_at(const PathBundle& bundle, const TimeGrid& grid, std::size_t j);

/// Calls fn(j, state) for every fine index j before the horizon, carrying the
/// running maxima forward (bridge step maxima included when present).
void for_each_state(const PathBundle& bundle, const TimeGrid& grid,
                    const std::function<void(std::size_t, const ConditionalState&)>& fn);

/// eps per interval. For Noisy, aux is the Bernoulli stream of the L_k.
std::vector<std::uint8_t> realize_chain(const RegimeSpec& spec, const PathBundle& bundle, const TimeGrid& grid,
                                        RngSpec aux);

/// The noise-free chain underneath eps (identical to realize_chain for
/// chains without noise).
std::vector<std::uint8_t> realize_base_chain(const RegimeSpec& spec, const PathBundle& bundle, const TimeGrid& grid);

/// P(eps_{t_k} = e | F_t), unclamped.
double conditional_prob(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid);

/// P(eps_{t_k} = e).
double unconditional_prob(const RegimeSpec& spec, int e, std::size_t k, const TimeGrid& grid);

/// P(eps_{t_k} = e | F_t) / P(eps_{t_k} = e).
double jacod_density(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid);

/// E[D_t eps_{t_k} | F_t] with respect to W (driver = 0) or B (driver = 1).
double malliavin_numerator(const RegimeSpec& spec, const ConditionalState& state, const TimeGrid& grid,
                           int driver = 0);

/// P(eps_{t_k} = e | F_{t_{k+1}}) given the underlying base indicator.
/// Equals 1{base == e} unless the chain is noisy.
double settled_prob(const RegimeSpec& spec, int e, std::size_t k, std::uint8_t base_indicator);

}  // namespace insider
