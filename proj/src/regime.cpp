#include "insider/regime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "insider/normal.hpp"
#include "overloaded.hpp"

namespace insider {

using detail::overloaded;

namespace {

void check_binary(int e) {
    if (e != 0 && e != 1) throw std::invalid_argument("outcome must be 0 or 1");
}

double remaining(const ConditionalState& s, const TimeGrid& grid) {
    if (s.k >= grid.n_intervals()) throw std::out_of_range("state interval index out of range");
    const double tau = grid.jump_times[s.k + 1] - s.t;
    if (!(tau > 0.0) || s.t < grid.jump_times[s.k]) {
        throw std::invalid_argument("state time must lie in [t_k, t_{k+1})");
    }
    return tau;
}

double need(const std::optional<double>& v, const char* what) {
    if (!v) throw std::invalid_argument(std::string("conditional state is missing ") + what);
    return *v;
}

double noise_level(const Noisy& spec, std::size_t k) {
    if (k >= spec.p.size()) throw std::out_of_range("noisy chain: no noise level for this interval");
    return spec.p[k];
}

// Both outcome probabilities, each in a form that keeps its relative accuracy
// when it is tiny; 1 - p would lose it.
struct Outcomes {
    double p0;
    double p1;
    double operator[](int e) const noexcept { return e == 1 ? p1 : p0; }
};

Outcomes increment_probs(const ConditionalState& s, double tau) {
    const double x = (s.w_t - s.w_tk) / std::sqrt(tau);
    return {norm_sf(x), norm_cdf(x)};
}

Outcomes drawdown_probs(const DrawdownBarrier& d, const ConditionalState& s, double tau) {
    const double k_t = need(s.run_max_from_0, "running maximum from 0") - s.w_t;
    const double root = std::sqrt(tau);
    const double down = (d.c - k_t) / root;
    const double up = (d.c + k_t) / root;
    return {norm_cdf(down) - norm_sf(up), norm_sf(down) + norm_sf(up)};
}

bool pathwise_absorbed(const PathwiseBarrier& pw, const ConditionalState& s) {
    return need(s.run_max_from_tk, "running maximum from t_k") > s.w_tk + pw.b_offset;
}

// P(max of a Brownian motion over tau stays below a distance d) = erf(d / sqrt(2 tau))
Outcomes barrier_survival(double d, double tau) {
    const double z = d / std::sqrt(2.0 * tau);
    return {std::erfc(z), std::erf(z)};
}

Outcomes pathwise_probs(const PathwiseBarrier& pw, const ConditionalState& s, double tau) {
    if (pathwise_absorbed(pw, s)) return {1.0, 0.0};
    return barrier_survival(s.w_tk + pw.b_offset - s.w_t, tau);
}

Outcomes joint_probs(const ConditionalState& s, double tau) {
    const double root = std::sqrt(tau);
    const double xw = (s.w_t - s.w_tk) / root;
    const double xb = (need(s.b_t, "second driver level") - need(s.b_tk, "second driver level at t_k")) / root;
    const double sw = norm_sf(xw);
    const double sb = norm_sf(xb);
    return {sw + sb - sw * sb, norm_cdf(xw) * norm_cdf(xb)};
}

Outcomes base_probs(const BaseRegime& base, const ConditionalState& s, double tau) {
    return std::visit(overloaded{
                          [&](const IncrementSign&) { return increment_probs(s, tau); },
                          [&](const DrawdownBarrier& d) { return drawdown_probs(d, s, tau); },
                          [&](const PathwiseBarrier& pw) { return pathwise_probs(pw, s, tau); },
                      },
                      base);
}

double base_numerator(const BaseRegime& base, const ConditionalState& s, double tau) {
    const double root = std::sqrt(tau);
    return std::visit(overloaded{
                          [&](const IncrementSign&) { return norm_pdf((s.w_t - s.w_tk) / root) / root; },
                          [&](const DrawdownBarrier& d) {
                              const double k_t = need(s.run_max_from_0, "running maximum from 0") - s.w_t;
                              return (norm_pdf((d.c + k_t) / root) - norm_pdf((d.c - k_t) / root)) / root;
                          },
                          [&](const PathwiseBarrier& pw) {
                              if (pathwise_absorbed(pw, s)) return 0.0;
                              const double barrier = s.w_tk + pw.b_offset;
                              return -2.0 / root * norm_pdf((barrier - s.w_t) / root);
                          },
                      },
                      base);
}

double base_unconditional1(const BaseRegime& base, std::size_t k, const TimeGrid& grid) {
    return std::visit(overloaded{
                          [&](const IncrementSign&) { return 0.5; },
                          [&](const DrawdownBarrier& d) {
                              return 2.0 * norm_sf(d.c / std::sqrt(grid.jump_times[k + 1]));
                          },
                          [&](const PathwiseBarrier& pw) {
                              return barrier_survival(pw.b_offset, grid.interval_length(k)).p1;
                          },
                      },
                      base);
}

std::vector<std::uint8_t> realize_base(const BaseRegime& base, const PathBundle& bundle, const TimeGrid& grid) {
    const std::size_t n = grid.n_intervals();
    const std::size_t m = grid.substeps;
    std::vector<std::uint8_t> eps(n, 0);
    std::visit(overloaded{
                   [&](const IncrementSign&) {
                       for (std::size_t k = 0; k < n; ++k) eps[k] = bundle.w[(k + 1) * m] > bundle.w[k * m];
                   },
                   [&](const DrawdownBarrier& d) {
                       const auto run_max = running_max_path(bundle.w, bundle.w_step_max, 0);
                       for (std::size_t k = 0; k < n; ++k) {
                           const std::size_t j = (k + 1) * m;
                           eps[k] = run_max[j] - bundle.w[j] > d.c;
                       }
                   },
                   [&](const PathwiseBarrier& pw) {
                       const bool steps = bundle.has_step_max();
                       for (std::size_t k = 0; k < n; ++k) {
                           double top = bundle.w[k * m];
                           for (std::size_t j = k * m; j < (k + 1) * m; ++j) {
                               top = std::max(top, steps ? bundle.w_step_max[j] : bundle.w[j + 1]);
                           }
                           eps[k] = top <= bundle.w[k * m] + pw.b_offset;
                       }
                   },
               },
               base);
    return eps;
}

}  // namespace

std::string regime_name(const RegimeSpec& spec) {
    return std::visit(overloaded{
                          [](const IncrementSign&) { return std::string("increment_sign"); },
                          [](const DrawdownBarrier&) { return std::string("drawdown_barrier"); },
                          [](const PathwiseBarrier&) { return std::string("pathwise_barrier"); },
                          [](const Noisy&) { return std::string("noisy"); },
                          [](const JointIncrementSign&) { return std::string("joint_increment_sign"); },
                      },
                      spec);
}

bool needs_second_driver(const RegimeSpec& spec) noexcept {
    return std::holds_alternative<JointIncrementSign>(spec);
}

bool needs_maxima(const RegimeSpec& spec) noexcept {
    if (const auto* noisy = std::get_if<Noisy>(&spec)) return !std::holds_alternative<IncrementSign>(noisy->base);
    return std::holds_alternative<DrawdownBarrier>(spec) || std::holds_alternative<PathwiseBarrier>(spec);
}

bool is_complete_market(const RegimeSpec& spec) noexcept { return !needs_second_driver(spec); }

RegimeSpec as_regime(const BaseRegime& base) {
    return std::visit([](const auto& b) -> RegimeSpec { return b; }, base);
}

void validate(const RegimeSpec& spec, const TimeGrid& grid) {
    auto check_base = [](const BaseRegime& base) {
        std::visit(overloaded{
                       [](const IncrementSign&) {},
                       [](const DrawdownBarrier& d) {
                           if (!(d.c > 0.0) || !std::isfinite(d.c))
                               throw std::invalid_argument("drawdown barrier c must be positive");
                       },
                       [](const PathwiseBarrier& pw) {
                           if (!(pw.b_offset > 0.0) || !std::isfinite(pw.b_offset))
                               throw std::invalid_argument("pathwise barrier offset must be positive");
                       },
                   },
                   base);
    };
    std::visit(overloaded{
                   [&](const Noisy& noisy) {
                       check_base(noisy.base);
                       if (noisy.p.size() != grid.n_intervals())
                           throw std::invalid_argument("noisy chain needs one noise level per interval");
                       for (double p : noisy.p) {
                           if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("noise levels must lie in (0, 1]");
                       }
                   },
                   [](const JointIncrementSign&) {},
                   [&](const auto& plain) { check_base(plain); },
               },
               spec);
}

ConditionalState state_at(const PathBundle& bundle, const TimeGrid& grid, std::size_t j) {
    if (j + 1 >= grid.n_fine() || bundle.w.size() != grid.n_fine()) {
        throw std::out_of_range("state_at: fine index must precede the horizon");
    }
    ConditionalState s;
    s.k = grid.interval_of(j);
    s.t = grid.fine_times[j];
    const std::size_t jk = grid.jump_index(s.k);
    s.w_t = bundle.w[j];
    s.w_tk = bundle.w[jk];

    const bool steps = bundle.has_step_max();
    double top = bundle.w[0];
    double top_k = bundle.w[jk];
    for (std::size_t i = 0; i < j; ++i) {
        const double v = steps ? bundle.w_step_max[i] : bundle.w[i + 1];
        top = std::max(top, v);
        if (i >= jk) top_k = std::max(top_k, v);
    }
    s.run_max_from_0 = top;
    s.run_max_from_tk = top_k;
    if (bundle.has_b()) {
        s.b_t = bundle.b[j];
        s.b_tk = bundle.b[jk];
    }
    return s;
}

void for_each_state(const PathBundle& bundle, const TimeGrid& grid,
                    const std::function<void(std::size_t, const ConditionalState&)>& fn) {
    const std::size_t n_fine = grid.n_fine();
    if (bundle.w.size() != n_fine) throw std::invalid_argument("for_each_state: path does not match grid");
    const bool steps = bundle.has_step_max();
    const bool two = bundle.has_b();
    ConditionalState s;
    double top = bundle.w[0];
    double top_k = bundle.w[0];
    for (std::size_t j = 0; j + 1 < n_fine; ++j) {
        const std::size_t k = grid.interval_of(j);
        const std::size_t jk = grid.jump_index(k);
        if (j == jk) top_k = bundle.w[j];
        s.k = k;
        s.t = grid.fine_times[j];
        s.w_t = bundle.w[j];
        s.w_tk = bundle.w[jk];
        s.run_max_from_0 = top;
        s.run_max_from_tk = top_k;
        if (two) {
            s.b_t = bundle.b[j];
            s.b_tk = bundle.b[jk];
        }
        fn(j, s);
        const double next = steps ? bundle.w_step_max[j] : bundle.w[j + 1];
        top = std::max(top, next);
        top_k = std::max(top_k, next);
    }
}

std::vector<std::uint8_t> realize_chain(const RegimeSpec& spec, const PathBundle& bundle, const TimeGrid& grid,
                                        RngSpec aux) {
    if (bundle.w.size() != grid.n_fine()) throw std::invalid_argument("realize_chain: path does not match grid");
    const std::size_t n = grid.n_intervals();
    const std::size_t m = grid.substeps;
    return std::visit(
        overloaded{
            [&](const Noisy& noisy) {
                validate(spec, grid);
                auto eps = realize_base(noisy.base, bundle, grid);
                UniformStream u(aux, Substream::Auxiliary, 0);
                for (std::size_t k = 0; k < n; ++k) {
                    const bool keep = u.next() < noisy.p[k];
                    eps[k] = static_cast<std::uint8_t>(keep && eps[k]);
                }
                return eps;
            },
            [&](const JointIncrementSign&) {
                if (!bundle.has_b()) throw std::invalid_argument("joint increment chain requires the second driver");
                std::vector<std::uint8_t> eps(n, 0);
                for (std::size_t k = 0; k < n; ++k) {
                    eps[k] = bundle.w[(k + 1) * m] > bundle.w[k * m] && bundle.b[(k + 1) * m] > bundle.b[k * m];
                }
                return eps;
            },
            [&](const auto& plain) { return realize_base(plain, bundle, grid); },
        },
        spec);
}

std::vector<std::uint8_t> realize_base_chain(const RegimeSpec& spec, const PathBundle& bundle,
                                             const TimeGrid& grid) {
    if (const auto* noisy = std::get_if<Noisy>(&spec)) {
        if (bundle.w.size() != grid.n_fine()) throw std::invalid_argument("realize_chain: path does not match grid");
        return realize_base(noisy->base, bundle, grid);
    }
    return realize_chain(spec, bundle, grid, RngSpec{});
}

double conditional_prob(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid) {
    check_binary(e);
    const double tau = remaining(state, grid);
    const Outcomes p = std::visit(overloaded{
                                      [&](const Noisy& noisy) {
                                          const double level = noise_level(noisy, state.k);
                                          const Outcomes b = base_probs(noisy.base, state, tau);
                                          return Outcomes{(1.0 - level) + level * b.p0, level * b.p1};
                                      },
                                      [&](const JointIncrementSign&) { return joint_probs(state, tau); },
                                      [&](const auto& plain) { return base_probs(plain, state, tau); },
                                  },
                                  spec);
    return p[e];
}

double unconditional_prob(const RegimeSpec& spec, int e, std::size_t k, const TimeGrid& grid) {
    check_binary(e);
    if (k >= grid.n_intervals()) throw std::out_of_range("unconditional_prob: interval index out of range");
    const double p1 = std::visit(overloaded{
                                     [&](const Noisy& noisy) {
                                         return noise_level(noisy, k) * base_unconditional1(noisy.base, k, grid);
                                     },
                                     [](const JointIncrementSign&) { return 0.25; },
                                     [&](const auto& plain) { return base_unconditional1(plain, k, grid); },
                                 },
                                 spec);
    return e == 1 ? p1 : 1.0 - p1;
}

double jacod_density(const RegimeSpec& spec, int e, const ConditionalState& state, const TimeGrid& grid) {
    const double denom = unconditional_prob(spec, e, state.k, grid);
    if (!(denom > 0.0)) throw std::domain_error("jacod_density: outcome has zero probability");
    return conditional_prob(spec, e, state, grid) / denom;
}

double malliavin_numerator(const RegimeSpec& spec, const ConditionalState& state, const TimeGrid& grid,
                           int driver) {
    if (driver != 0 && driver != 1) throw std::invalid_argument("driver must be 0 (W) or 1 (B)");
    const double tau = remaining(state, grid);
    return std::visit(overloaded{
                          [&](const Noisy& noisy) {
                              if (driver == 1) return 0.0;
                              return noise_level(noisy, state.k) * base_numerator(noisy.base, state, tau);
                          },
                          [&](const JointIncrementSign&) {
                              const double root = std::sqrt(tau);
                              const double xw = (state.w_t - state.w_tk) / root;
                              const double xb = (need(state.b_t, "second driver level") -
                                                 need(state.b_tk, "second driver level at t_k")) /
                                                root;
                              return driver == 0 ? norm_cdf(xb) * norm_pdf(xw) / root
                                                 : norm_cdf(xw) * norm_pdf(xb) / root;
                          },
                          [&](const auto& plain) {
                              if (driver == 1) return 0.0;
                              return base_numerator(plain, state, tau);
                          },
                      },
                      spec);
}

double settled_prob(const RegimeSpec& spec, int e, std::size_t k, std::uint8_t base_indicator) {
    check_binary(e);
    double p1 = base_indicator ? 1.0 : 0.0;
    if (const auto* noisy = std::get_if<Noisy>(&spec)) p1 *= noise_level(*noisy, k);
    return e == 1 ? p1 : 1.0 - p1;
}

}  // namespace insider
