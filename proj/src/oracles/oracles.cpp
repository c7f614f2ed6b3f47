#include "insider/oracles/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "insider/stats.hpp"

namespace insider::oracle {
namespace {

constexpr double kPi = std::numbers::pi;

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Bridge maximum over [0, h] from a to b, inverse-transform from u.
double bridge_top(double a, double b, double h, double u) {
    const double d = b - a;
    return std::max(std::max(a, b), 0.5 * (a + b + std::sqrt(d * d - 2.0 * h * std::log(u))));
}

template <class F>
double integrate(F f, double lo, double hi) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-14, &err);
}

// P(sup_{[0,tau]} X <= a) for X a Brownian motion from 0, a >= 0:
// integrate the endpoint density times the bridge survival.
double stay_below(double a, double tau) {
    if (a <= 0.0) return 0.0;
    const double root = std::sqrt(tau);
    auto f = [&](double y) {
        return phi(y / root) / root * (1.0 - std::exp(-2.0 * a * (a - y) / tau));
    };
    return integrate(f, a - 40.0 * root, a);
}

// P(max(K, X) - Y > c) with (X, Y) the maximum and endpoint of a Brownian
// motion from 0 over [0, tau]. Below y = K - c the event is certain; above it
// the maximum must pass c + y, which is nonnegative there since K >= 0.
double drawdown_exceeds(double k_now, double c, double tau) {
    const double root = std::sqrt(tau);
    const double split = k_now - c;
    auto f = [&](double y) {
        const double a = c + y;
        return phi(y / root) / root * std::exp(-2.0 * a * (a - y) / tau);
    };
    return std::min(1.0, cdf(split / root) + integrate(f, split, split + 40.0 * root));
}

double base_prob1(const ChainSpec& chain, const State& s) {
    switch (chain.kind) {
        case Chain::IncrementSign: return cdf((s.w_t - s.w_tk) / std::sqrt(s.tau));
        case Chain::DrawdownBarrier: return drawdown_exceeds(s.max_from_0 - s.w_t, chain.c, s.tau);
        case Chain::PathwiseBarrier: {
            const double barrier = s.w_tk + chain.b_offset;
            if (s.max_from_tk > barrier) return 0.0;
            return stay_below(barrier - s.w_t, s.tau);
        }
        case Chain::JointIncrementSign: {
            const double root = std::sqrt(s.tau);
            return cdf((s.w_t - s.w_tk) / root) * cdf((s.b_t - s.b_tk) / root);
        }
    }
    return 0.0;
}

struct Continuation {
    double w_end;
    double b_end;
    bool hit;
};

Continuation continue_path(const ChainSpec& chain, const State& s, NormalStream& z, UniformStream& u) {
    const double root = std::sqrt(s.tau);
    Continuation c{};
    c.w_end = s.w_t + root * z.next();
    c.b_end = s.b_t + root * z.next();
    const double top = bridge_top(s.w_t, c.w_end, s.tau, u.next());
    const double keep_draw = u.next();
    bool base = false;
    switch (chain.kind) {
        case Chain::IncrementSign: base = c.w_end > s.w_tk; break;
        case Chain::DrawdownBarrier: base = std::max(s.max_from_0, top) - c.w_end > chain.c; break;
        case Chain::PathwiseBarrier: base = std::max(s.max_from_tk, top) <= s.w_tk + chain.b_offset; break;
        case Chain::JointIncrementSign: base = c.w_end > s.w_tk && c.b_end > s.b_tk; break;
    }
    c.hit = base && keep_draw < chain.keep;
    return c;
}

void check_e(int e) {
    if (e != 0 && e != 1) throw std::invalid_argument("oracle: outcome must be 0 or 1");
}

}  // namespace

double gaussian_phi_moment(double sigma) { return 1.0 / std::sqrt(2.0 * kPi * (1.0 + sigma * sigma)); }

double gaussian_phi_moment_quadrature(double sigma) {
    auto f = [&](double z) { return phi(sigma * z) * phi(z); };
    return integrate(f, -40.0, 40.0);
}

double quadrature_conditional(const ChainSpec& chain, const State& state, int e) {
    check_e(e);
    const double p1 = chain.keep * base_prob1(chain, state);
    return e == 1 ? p1 : 1.0 - p1;
}

Estimate nested_mc_conditional(const ChainSpec& chain, const State& state, int e, std::size_t inner_n,
                               RngSpec rng) {
    check_e(e);
    if (inner_n == 0) throw std::invalid_argument("oracle: inner_n must be positive");
    NormalStream z(rng, Substream::Oracle, 0);
    UniformStream u(rng, Substream::Oracle, 1);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < inner_n; ++i) {
        const bool one = continue_path(chain, state, z, u).hit;
        hits += (one == (e == 1));
    }
    const double p = static_cast<double>(hits) / static_cast<double>(inner_n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(inner_n)), false};
}

Estimate nested_mc_drift(const ChainSpec& chain, const State& state, int e, int driver, std::size_t inner_n,
                         RngSpec rng) {
    check_e(e);
    if (chain.kind == Chain::DrawdownBarrier || chain.kind == Chain::PathwiseBarrier) {
        throw std::invalid_argument("oracle: endpoint drift estimator needs an endpoint-measurable chain");
    }
    NormalStream z(rng, Substream::Oracle, 2);
    UniformStream u(rng, Substream::Oracle, 3);
    RunningStats ind;
    RunningStats num;
    std::vector<double> ys(inner_n);
    std::vector<double> is(inner_n);
    for (std::size_t i = 0; i < inner_n; ++i) {
        const Continuation c = continue_path(chain, state, z, u);
        const double inc = driver == 0 ? c.w_end - state.w_t : c.b_end - state.b_t;
        const double hit = (c.hit == (e == 1)) ? 1.0 : 0.0;
        ys[i] = hit * inc / state.tau;
        is[i] = hit;
        num.add(ys[i]);
        ind.add(hit);
    }
    if (ind.mean() == 0.0) return {0.0, 0.0, true};
    const double ratio = num.mean() / ind.mean();
    RunningStats resid;
    for (std::size_t i = 0; i < inner_n; ++i) resid.add(ys[i] - ratio * is[i]);
    const double se = std::sqrt(resid.variance() / static_cast<double>(inner_n)) / ind.mean();
    return {ratio, se, false};
}

Estimate regression_alpha(const ChainSpec& chain, const State& state, int e, double fine_dt, std::size_t n_paths,
                          RngSpec rng, std::size_t bootstrap) {
    check_e(e);
    if (!(fine_dt > 0.0 && fine_dt < state.tau)) throw std::invalid_argument("oracle: fine_dt must be inside the horizon");
    const double p0 = quadrature_conditional(chain, state, e);
    if (!(p0 > 1e-9 && p0 < 1.0 + 1e-15)) return {0.0, 0.0, true};

    // antithetic pairs (+dW, -dW): the curvature of p drops out of the slope
    // exactly, instead of entering through the sample skewness of dW
    const std::size_t n_pairs = std::max<std::size_t>(1, n_paths / 2);
    NormalStream z(rng, Substream::Oracle, 4);
    UniformStream u(rng, Substream::Oracle, 5);
    std::vector<double> x(2 * n_pairs);
    std::vector<double> y(2 * n_pairs);
    const double root = std::sqrt(fine_dt);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const double dw = root * z.next();
        const double db = root * z.next();
        const double v = u.next();
        for (int side : {0, 1}) {
            const double sgn = side == 0 ? 1.0 : -1.0;
            State next = state;
            next.tau = state.tau - fine_dt;
            next.w_t = state.w_t + sgn * dw;
            next.b_t = state.b_t + sgn * db;
            const double top = bridge_top(state.w_t, next.w_t, fine_dt, v);
            next.max_from_0 = std::max(state.max_from_0, top);
            next.max_from_tk = std::max(state.max_from_tk, top);
            x[2 * i + side] = sgn * dw;
            y[2 * i + side] = (quadrature_conditional(chain, next, e) - p0) / p0;
        }
    }

    // slope over a multiset of pairs
    auto slope = [&](const std::vector<std::size_t>* pairs) {
        const std::size_t n = pairs ? pairs->size() : n_pairs;
        auto pair_at = [&](std::size_t i) { return pairs ? (*pairs)[i] : i; };
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = pair_at(i);
            sx += x[2 * j] + x[2 * j + 1];
            sy += y[2 * j] + y[2 * j + 1];
        }
        const double mx = sx / static_cast<double>(2 * n);
        const double my = sy / static_cast<double>(2 * n);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 2 * pair_at(i); j < 2 * pair_at(i) + 2; ++j) {
                sxy += (x[j] - mx) * (y[j] - my);
                sxx += (x[j] - mx) * (x[j] - mx);
            }
        }
        return sxy / sxx;
    };

    const double fit = slope(nullptr);
    UniformStream pick(rng, Substream::Oracle, 6);
    RunningStats boot;
    std::vector<std::size_t> idx(n_pairs);
    for (std::size_t b = 0; b < bootstrap; ++b) {
        for (auto& j : idx) j = std::min(n_pairs - 1, static_cast<std::size_t>(pick.next() * static_cast<double>(n_pairs)));
        boot.add(slope(&idx));
    }
    return {fit, std::sqrt(boot.variance()), false};
}

std::vector<double> drawdown_law_sampler(double t, RngSpec rng, std::size_t n) {
    if (!(t > 0.0)) throw std::invalid_argument("oracle: drawdown time must be positive");
    NormalStream z(rng, Substream::Oracle, 7);
    std::vector<double> out(n);
    const double root = std::sqrt(t);
    for (auto& v : out) v = std::abs(root * z.next());
    return out;
}

double increment_alpha_sq_mean(double s, double tau) {
    if (!(tau > 0.0) || s < 0.0) throw std::invalid_argument("oracle: need s >= 0 and tau > 0");
    // given x = W_t - W_{t_k}, E[alpha^2 | x] = phi(v)^2 / (tau Phi(v) Phi(-v)), v = x / sqrt(tau);
    // symmetric in v, so evaluate at -|v| where the lower tail is accurate
    auto conditional = [&](double v) {
        const double a = std::abs(v);
        if (a > 37.0) return 0.0;
        const double log_ratio = -a * a - std::log(2.0 * kPi) - std::log(cdf(a)) - std::log(cdf(-a));
        return std::exp(log_ratio) / tau;
    };
    if (s == 0.0) return conditional(0.0);
    // v ~ N(0, sigma^2); integrate over whichever of z and v has the narrower support
    const double sigma = std::sqrt(s / tau);
    if (sigma <= 1.0) {
        return integrate([&](double z) { return phi(z) * conditional(sigma * z); }, -12.0, 12.0);
    }
    return integrate([&](double v) { return phi(v / sigma) / sigma * conditional(v); }, -40.0, 40.0);
}

double increment_euler_energy(double dt, std::size_t m) {
    const double h = dt / static_cast<double>(m);
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double s = static_cast<double>(j) * h;
        sum += h * increment_alpha_sq_mean(s, dt - s);
    }
    return 0.5 * sum;
}

double lognormal_moment(double mu, double sigma, double q) {
    auto f = [&](double zz) { return phi(zz) * std::exp(q * (mu + sigma * zz)); };
    const double centre = q * sigma;
    return integrate(f, centre - 40.0, centre + 40.0);
}

}  // namespace insider::oracle
