#include "insider/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "insider/normal.hpp"
#include "overloaded.hpp"

namespace insider {

using detail::overloaded;

namespace {

double clamp_prob(double p) noexcept { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double cap(double a, bool& saturated) noexcept {
    if (!std::isfinite(a) || std::abs(a) > kAlphaCap) {
        saturated = true;
        if (std::isnan(a)) return 0.0;
        return a > 0 ? kAlphaCap : -kAlphaCap;
    }
    return a;
}

double tau_of(const ConditionalState& s, const TimeGrid& grid) {
    if (s.k >= grid.n_intervals()) throw std::out_of_range("state interval index out of range");
    const double tau = grid.jump_times[s.k + 1] - s.t;
    if (!(tau > 0.0)) throw std::invalid_argument("drift evaluated at or beyond the revelation time");
    return tau;
}

double sign_of(int e) { return e == 1 ? 1.0 : -1.0; }

// (-1)^{1+e} phi(x) / (sqrt(tau) P(eps = e | F_t))
double increment_alpha(int e, const ConditionalState& s, double tau) {
    const double root = std::sqrt(tau);
    const double x = (s.w_t - s.w_tk) / root;
    const double p_e = clamp_prob(e == 1 ? norm_cdf(x) : norm_sf(x));
    return sign_of(e) * norm_pdf(x) / (root * p_e);
}

double drawdown_alpha(const DrawdownBarrier& d, int e, const ConditionalState& s, double tau) {
    if (!s.run_max_from_0) throw std::invalid_argument("drawdown drift needs the running maximum from 0");
    const double root = std::sqrt(tau);
    const double k_t = *s.run_max_from_0 - s.w_t;
    const double up = (d.c + k_t) / root;
    const double down = (d.c - k_t) / root;
    const double p1 = norm_sf(down) + norm_sf(up);
    const double p0 = norm_cdf(down) - norm_sf(up);
    const double p_e = clamp_prob(e == 1 ? p1 : p0);
    return sign_of(e) * (norm_pdf(up) - norm_pdf(down)) / (root * p_e);
}

double pathwise_alpha(const PathwiseBarrier& pw, int e, const ConditionalState& s, double tau) {
    if (!s.run_max_from_tk) throw std::invalid_argument("pathwise drift needs the running maximum from t_k");
    const double barrier = s.w_tk + pw.b_offset;
    if (*s.run_max_from_tk > barrier) return 0.0;
    const double root = std::sqrt(tau);
    const double density_at_barrier = 2.0 / root * norm_pdf((barrier - s.w_t) / root);
    const double z = (barrier - s.w_t) / (std::numbers::sqrt2 * root);
    const double p_e = clamp_prob(e == 1 ? std::erf(z) : std::erfc(z));
    return -sign_of(e) * density_at_barrier / p_e;
}

double base_alpha(const BaseRegime& base, int e, const ConditionalState& s, double tau) {
    return std::visit(overloaded{
                          [&](const IncrementSign&) { return increment_alpha(e, s, tau); },
                          [&](const DrawdownBarrier& d) { return drawdown_alpha(d, e, s, tau); },
                          [&](const PathwiseBarrier& pw) { return pathwise_alpha(pw, e, s, tau); },
                      },
                      base);
}

// alpha~1 = alpha1; alpha~0 = p_k P(eps=0|F_t) / (P(eps~=0) p~0_t) alpha0
double noisy_alpha(const Noisy& noisy, int e, const ConditionalState& s, const TimeGrid& grid, double tau) {
    const double a = base_alpha(noisy.base, e, s, tau);
    const RegimeSpec base = as_regime(noisy.base);
    const double p = noisy.p.at(s.k);
    if (e == 1) {
        // the clamp acts on the noisy chain's own probability p P(eps=1|F_t)
        if (p * conditional_prob(base, 1, s, grid) >= kProbClamp) return a;
        return p * malliavin_numerator(base, s, grid) / kProbClamp;
    }
    const double base_p0 = conditional_prob(base, 0, s, grid);
    const double noisy_uncond0 = 1.0 - p * unconditional_prob(base, 1, s.k, grid);
    const double density0 = clamp_prob((1.0 - p) + p * base_p0) / noisy_uncond0;
    return p * base_p0 / (noisy_uncond0 * density0) * a;
}

double joint_drift(int e, const ConditionalState& s, double tau, bool for_b) {
    if (!s.b_t || !s.b_tk) throw std::invalid_argument("joint chain drift needs the second driver");
    const double root = std::sqrt(tau);
    const double xw = (s.w_t - s.w_tk) / root;
    const double xb = (*s.b_t - *s.b_tk) / root;
    const double own = for_b ? xb : xw;
    const double other = for_b ? xw : xb;
    const double num = norm_cdf(other) * norm_pdf(own) / root;
    const double p_e = clamp_prob(e == 1 ? norm_cdf(xw) * norm_cdf(xb) : norm_sf(xw) + norm_sf(xb) - norm_sf(xw) * norm_sf(xb));
    return sign_of(e) * num / p_e;
}

double alpha_raw(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid) {
    if (e != 0 && e != 1) throw std::invalid_argument("outcome must be 0 or 1");
    const double tau = tau_of(state, grid);
    return std::visit(overloaded{
                          [&](const Noisy& noisy) { return noisy_alpha(noisy, e, state, grid, tau); },
                          [&](const JointIncrementSign&) { return joint_drift(e, state, tau, false); },
                          [&](const auto& plain) { return base_alpha(plain, e, state, tau); },
                      },
                      spec);
}

double gamma_raw(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid) {
    if (e != 0 && e != 1) throw std::invalid_argument("outcome must be 0 or 1");
    const double tau = tau_of(state, grid);
    if (!std::holds_alternative<JointIncrementSign>(spec)) return 0.0;
    return joint_drift(e, state, tau, true);
}

}  // namespace

double alpha(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid) {
    bool saturated = false;
    return cap(alpha_raw(spec, e, state, grid), saturated);
}

double gamma(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid) {
    bool saturated = false;
    return cap(gamma_raw(spec, e, state, grid), saturated);
}

double alpha_binary_general(double cond_prob_1, double malliavin_num, int realized_e) {
    if (realized_e != 0 && realized_e != 1) throw std::invalid_argument("outcome must be 0 or 1");
    if (!(cond_prob_1 > 0.0 && cond_prob_1 < 1.0)) {
        throw std::domain_error("binary drift: conditional variance is degenerate");
    }
    return alpha_binary_general(cond_prob_1, 1.0 - cond_prob_1, malliavin_num, realized_e);
}

double alpha_binary_general(double cond_prob_1, double cond_prob_0, double malliavin_num, int realized_e) {
    if (realized_e != 0 && realized_e != 1) throw std::invalid_argument("outcome must be 0 or 1");
    if (!(cond_prob_1 > 0.0 && cond_prob_0 > 0.0)) {
        throw std::domain_error("binary drift: conditional variance is degenerate");
    }
    // e - p1 is p0 or -p1
    const double centred = realized_e == 1 ? cond_prob_0 : -cond_prob_1;
    return malliavin_num * centred / (cond_prob_1 * cond_prob_0);
}

double drift_via_general(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid,
                         int driver) {
    const double p1 = clamp_prob(conditional_prob(spec, 1, state, grid));
    const double p0 = clamp_prob(conditional_prob(spec, 0, state, grid));
    const double num = malliavin_numerator(spec, state, grid, driver);
    bool saturated = false;
    return cap(alpha_binary_general(p1, p0, num, e), saturated);
}

DriftEvaluation evaluate_drift(const RegimeSpec& spec, const ConditionalState& state, const TimeGrid& grid,
                               int realized_e) {
    if (realized_e != 0 && realized_e != 1) throw std::invalid_argument("outcome must be 0 or 1");
    DriftEvaluation out;
    out.alpha_e0 = cap(alpha_raw(spec, 0, state, grid), out.saturated);
    out.alpha_e1 = cap(alpha_raw(spec, 1, state, grid), out.saturated);
    out.alpha_realized = realized_e ? out.alpha_e1 : out.alpha_e0;
    if (needs_second_driver(spec)) {
        out.gamma_e0 = cap(gamma_raw(spec, 0, state, grid), out.saturated);
        out.gamma_e1 = cap(gamma_raw(spec, 1, state, grid), out.saturated);
        out.gamma_realized = realized_e ? *out.gamma_e1 : *out.gamma_e0;
    }
    return out;
}

double theta(const MarketCoefficients& coeffs, int realized_e, double alpha_realized) {
    if (!(coeffs.xi(realized_e) > 0.0)) throw std::invalid_argument("theta: volatility must be positive");
    return coeffs.premium(realized_e) + alpha_realized;
}

void decompose(PathBundle& bundle, const RegimeSpec& spec, const TimeGrid& grid) {
    const std::size_t n_fine = grid.n_fine();
    if (bundle.w.size() != n_fine) throw std::invalid_argument("decompose: path does not match grid");
    if (bundle.eps.size() != grid.n_intervals()) throw std::invalid_argument("decompose: chain not realized");
    const bool two = needs_second_driver(spec);
    if (two && !bundle.has_b()) throw std::invalid_argument("decompose: chain requires the second driver");

    bundle.alpha.assign(n_fine, 0.0);
    bundle.w_hat.assign(n_fine, 0.0);
    if (two) {
        bundle.gamma.assign(n_fine, 0.0);
        bundle.b_hat.assign(n_fine, 0.0);
    } else {
        bundle.gamma.clear();
        bundle.b_hat.clear();
    }
    bundle.saturated = 0;

    double comp_w = 0.0;
    double comp_b = 0.0;
    for_each_state(bundle, grid, [&](std::size_t j, const ConditionalState& s) {
        const int e = bundle.eps[s.k];
        bool saturated = false;
        const double a = cap(alpha_raw(spec, e, s, grid), saturated);
        bundle.alpha[j] = a;
        const double h = grid.fine_times[j + 1] - grid.fine_times[j];
        comp_w += a * h;
        bundle.w_hat[j + 1] = bundle.w[j + 1] - comp_w;
        if (two) {
            const double g = cap(gamma_raw(spec, e, s, grid), saturated);
            bundle.gamma[j] = g;
            comp_b += g * h;
            bundle.b_hat[j + 1] = bundle.b[j + 1] - comp_b;
        }
        if (saturated) ++bundle.saturated;
    });
}

}  // namespace insider
