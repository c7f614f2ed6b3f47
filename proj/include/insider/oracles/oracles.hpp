#pragma once

// Reference computations for the test suite. Nothing here calls the chain or
// drift code: conditional laws are rebuilt from driver continuations and
// from reflection-principle integrals evaluated by quadrature.

#include <cstddef>
#include <vector>

#include "insider/rng.hpp"

namespace insider::oracle {

/// E[phi(sigma Z)] = 1 / sqrt(2 pi (1 + sigma^2)).
double gaussian_phi_moment(double sigma);

/// The same moment by adaptive quadrature over Z.
double gaussian_phi_moment_quadrature(double sigma);

enum class Chain { IncrementSign, DrawdownBarrier, PathwiseBarrier, JointIncrementSign };

struct ChainSpec {
    Chain kind = Chain::IncrementSign;
    double c = 1.0;         // drawdown barrier
    double b_offset = 1.0;  // pathwise barrier B = W_{t_k} + b_offset
    double keep = 1.0;      // probability that the indicator is passed through (noisy chain)
};

struct State {
    double tau = 1.0;  // time left until t_{k+1}
    double w_t = 0.0;
    double w_tk = 0.0;
    double max_from_0 = 0.0;
    double max_from_tk = 0.0;
    double b_t = 0.0;
    double b_tk = 0.0;
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
    bool skipped = false;
};

/// Brute-force P(eps = e | state) from inner_n exact continuations of the
/// driver(s) and their maxima.
Estimate nested_mc_conditional(const ChainSpec& chain, const State& state, int e, std::size_t inner_n, RngSpec rng);

/// Drift of W (driver 0) or B (driver 1) for outcome e as
/// E[1{eps=e} (X_T - X_t)] / (tau P(eps=e)), exact for chains built from the
/// endpoint increments (increment, joint, and their noisy versions).
Estimate nested_mc_drift(const ChainSpec& chain, const State& state, int e, int driver, std::size_t inner_n,
                         RngSpec rng);

/// P(eps = e | state) by quadrature of the reflection-principle law.
double quadrature_conditional(const ChainSpec& chain, const State& state, int e);

/// Slope of dp/p on dW over one step of length fine_dt, with a bootstrap
/// standard error. Skipped (flagged) when p is degenerate at the state.
Estimate regression_alpha(const ChainSpec& chain, const State& state, int e, double fine_dt, std::size_t n_paths,
                          RngSpec rng, std::size_t bootstrap = 200);

/// n draws of M_t - W_t via |N(0, t)|.
std::vector<double> drawdown_law_sampler(double t, RngSpec rng, std::size_t n);

/// E[alpha_t^2] for the increment chain with s elapsed since t_k and tau left.
double increment_alpha_sq_mean(double s, double tau);

/// (1/2) sum_j h E[alpha^2(t_j)] over the left endpoints of an interval of
/// length dt cut into m steps; the information energy an Euler scheme sees.
double increment_euler_energy(double dt, std::size_t m);

/// E[H^q] for ln H ~ N(mu, sigma^2), by quadrature.
double lognormal_moment(double mu, double sigma, double q);

}  // namespace insider::oracle
