#include "insider/valuation.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "insider/drift.hpp"
#include "insider/market.hpp"
#include "insider/parallel.hpp"
#include "insider/stats.hpp"
#include "overloaded.hpp"

namespace insider {

using detail::overloaded;

namespace {

struct UnitRule {
    std::vector<double> u;
    std::vector<double> w;
};

template <unsigned N>
UnitRule unit_rule_n() {
    using rule = boost::math::quadrature::gauss<double, N>;
    const auto& x = rule::abscissa();
    const auto& wt = rule::weights();
    UnitRule out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            out.u.push_back(0.5);
            out.w.push_back(0.5 * wt[i]);
            continue;
        }
        for (double sgn : {-1.0, 1.0}) {
            out.u.push_back(0.5 * (1.0 + sgn * x[i]));
            out.w.push_back(0.5 * wt[i]);
        }
    }
    return out;
}

// Gauss-Legendre rule on (0, 1) with nodes sorted by decreasing u.
UnitRule unit_rule(std::size_t nodes) {
    UnitRule r;
    switch (nodes) {
        case 8: r = unit_rule_n<8>(); break;
        case 16: r = unit_rule_n<16>(); break;
        case 32: r = unit_rule_n<32>(); break;
        default: throw std::invalid_argument("quadrature: nodes must be 8, 16 or 32");
    }
    std::vector<std::size_t> order(r.u.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.u[a] > r.u[b]; });
    UnitRule sorted;
    for (std::size_t i : order) {
        sorted.u.push_back(r.u[i]);
        sorted.w.push_back(r.w[i]);
    }
    return sorted;
}

// Grid whose interval k holds t_k followed by the nodes t_{k+1} - dt_k u_i^2.
// Not uniform, but every interval has the same number of points, which is all
// the path sampler and the chain realization rely on.
TimeGrid node_grid(const TimeGrid& grid, const UnitRule& rule) {
    TimeGrid out;
    out.jump_times = grid.jump_times;
    out.substeps = rule.u.size() + 1;
    for (std::size_t k = 0; k < grid.n_intervals(); ++k) {
        const double t0 = grid.jump_times[k];
        const double t1 = grid.jump_times[k + 1];
        const double dt = t1 - t0;
        out.fine_times.push_back(t0);
        for (double u : rule.u) out.fine_times.push_back(t1 - dt * u * u);
    }
    out.fine_times.push_back(grid.jump_times.back());
    return out;
}

// Integrates g(state, realized eps) over each interval with the u-substitution.
template <class Integrand>
IntervalIntegral integrate_over_nodes(const RegimeSpec& spec, const TimeGrid& grid, const McOptions& opts,
                                      Integrand&& g) {
    if (opts.n_paths < 2) throw std::invalid_argument("Monte Carlo integral needs at least two paths");
    const UnitRule rule = unit_rule(opts.nodes);
    const TimeGrid nodes = node_grid(grid, rule);
    const std::size_t n = grid.n_intervals();
    const SampleOptions sample{needs_second_driver(spec), needs_maxima(spec)};

    std::vector<std::vector<RunningStats>> blocks(kDefaultBlocks, std::vector<RunningStats>(n));
    std::vector<RunningStats> totals_blocks(kDefaultBlocks);
    for_each_block(opts.n_paths, kDefaultBlocks, [&](std::size_t blk, std::size_t begin, std::size_t end) {
        std::vector<double> per(n);
        for (std::size_t i = begin; i < end; ++i) {
            const RngSpec rng{opts.seed, i};
            PathBundle bundle = sample_paths(nodes, rng, sample);
            bundle.eps = realize_chain(spec, bundle, nodes, rng);
            std::fill(per.begin(), per.end(), 0.0);
            for_each_state(bundle, nodes, [&](std::size_t j, const ConditionalState& s) {
                const std::size_t local = j - nodes.jump_index(s.k);
                if (local == 0) return;  // t_k itself is not a node
                const double u = rule.u[local - 1];
                const double dt = grid.interval_length(s.k);
                per[s.k] += rule.w[local - 1] * 2.0 * dt * u * g(s, nodes, bundle.eps[s.k]);
            });
            double total = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                blocks[blk][k].add(per[k]);
                total += per[k];
            }
            totals_blocks[blk].add(total);
        }
    });

    IntervalIntegral out;
    std::vector<RunningStats> merged(n);
    RunningStats total;
    for (std::size_t blk = 0; blk < kDefaultBlocks; ++blk) {
        for (std::size_t k = 0; k < n; ++k) merged[k].merge(blocks[blk][k]);
        total.merge(totals_blocks[blk]);
    }
    for (std::size_t k = 0; k < n; ++k) out.per_interval.push_back({merged[k].mean(), merged[k].stderr_mean()});
    out.value = total.mean();
    out.se = total.stderr_mean();
    return out;
}

double utility_from_log(const UtilitySpec& u, double log_x) {
    return std::visit(overloaded{
                          [&](const LogUtility&) { return log_x; },
                          [&](const PowerUtility& p) { return std::exp(p.gamma * log_x) / p.gamma; },
                      },
                      u);
}

}  // namespace

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binary_entropy: probability outside [0, 1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
    return h;
}

double entropy_term(const std::vector<double>& probs) {
    double sum = 0.0;
    for (double p : probs) sum += binary_entropy(p);
    return sum;
}

double noisy_entropy_gap_h(double x, double y) { return binary_entropy(x) - x * y * binary_entropy(y); }

IntervalIntegral malliavin_term(const RegimeSpec& spec, const TimeGrid& grid, const McOptions& opts) {
    if (std::holds_alternative<IncrementSign>(spec)) {
        IntervalIntegral out;
        out.analytic = true;
        for (std::size_t k = 0; k < grid.n_intervals(); ++k) {
            const double v = std::sqrt(grid.interval_length(k) / (2.0 * std::numbers::pi));
            out.per_interval.push_back({v, 0.0});
            out.value += v;
        }
        return out;
    }
    return integrate_over_nodes(spec, grid, opts, [&](const ConditionalState& s, const TimeGrid& g, int) {
        return malliavin_numerator(spec, s, g, 0);
    });
}

IntervalIntegral information_energy_mc(const RegimeSpec& spec, const TimeGrid& grid, const McOptions& opts) {
    return integrate_over_nodes(spec, grid, opts, [&](const ConditionalState& s, const TimeGrid& g, int e) {
        const double a = alpha(spec, e, s, g);
        double energy = 0.5 * a * a;
        if (needs_second_driver(spec)) {
            const double c = gamma(spec, e, s, g);
            energy += 0.5 * c * c;
        }
        return energy;
    });
}

InformationValue value_of_information_closed(const RegimeSpec& spec, const MarketCoefficients& coeffs,
                                             const TimeGrid& grid, const McOptions& opts) {
    if (std::holds_alternative<JointIncrementSign>(spec)) {
        throw std::invalid_argument("value of information: the closed form holds for the complete market only");
    }
    if (std::holds_alternative<Noisy>(spec)) {
        throw std::invalid_argument("value of information: use noisy_value_decomposition for noisy chains");
    }
    const IntervalIntegral mall = malliavin_term(spec, grid, opts);
    const double spread = coeffs.m1() - coeffs.m0();
    InformationValue out;
    for (std::size_t k = 0; k < grid.n_intervals(); ++k) {
        IntervalValue iv;
        iv.prob1 = unconditional_prob(spec, 1, k, grid);
        iv.entropy = binary_entropy(iv.prob1);
        iv.malliavin = mall.per_interval[k].value;
        iv.malliavin_stderr = mall.per_interval[k].se;
        iv.value = iv.entropy + spread * iv.malliavin;
        out.entropy_term += iv.entropy;
        out.per_interval.push_back(iv);
    }
    out.malliavin_term = mall.value;
    out.malliavin_stderr = mall.se;
    out.value = out.entropy_term + spread * out.malliavin_term;
    return out;
}

NoisyValue noisy_value_decomposition(const Noisy& spec, const MarketCoefficients& coeffs, const TimeGrid& grid,
                                     const McOptions& opts) {
    const RegimeSpec full = spec;
    validate(full, grid);
    const RegimeSpec base = as_regime(spec.base);
    const IntervalIntegral mall = malliavin_term(base, grid, opts);
    const double spread = coeffs.m1() - coeffs.m0();

    NoisyValue out;
    double se2 = 0.0;
    for (std::size_t k = 0; k < grid.n_intervals(); ++k) {
        const double x = unconditional_prob(base, 1, k, grid);
        const double p = spec.p[k];
        const double mk = mall.per_interval[k].value;

        // mutual information of eps~_k and F_T, plus the premium carried by eps~
        const double info_noisy = binary_entropy(p * x) - x * binary_entropy(p);
        const double gtilde_vf = info_noisy + spread * p * mk;
        const double g_vf = binary_entropy(x) + spread * mk;
        const double g_gtilde = binary_entropy(x) - binary_entropy(p * x) + x * binary_entropy(p) +
                                spread * (1.0 - p) * mk;

        out.v_gtilde_minus_vf += gtilde_vf;
        out.v_g_minus_vf += g_vf;
        out.v_g_minus_gtilde += g_gtilde;
        out.h_values.push_back(noisy_entropy_gap_h(x, p));

        IntervalValue iv;
        iv.prob1 = p * x;
        iv.entropy = info_noisy;
        iv.malliavin = p * mk;
        iv.malliavin_stderr = p * mall.per_interval[k].se;
        iv.value = gtilde_vf;
        out.per_interval.push_back(iv);
        se2 += iv.malliavin_stderr * iv.malliavin_stderr;
    }
    out.malliavin_stderr = std::sqrt(se2);
    return out;
}

void validate(const Scenario& scenario) {
    scenario.coeffs.validate();
    validate(scenario.regime, scenario.grid);
    validate(scenario.utility);
    if (scenario.strategies.empty()) throw std::invalid_argument("scenario needs at least one strategy");
    if (!(scenario.x0 > 0.0)) throw std::invalid_argument("x0 must be positive");
    if (scenario.n_paths < 2) throw std::invalid_argument("n_paths must be at least 2");
    for (const auto& s : scenario.strategies) {
        if (const auto* c = std::get_if<CrraOptimalG>(&s)) validate(UtilitySpec{PowerUtility{c->gamma}});
        if (const auto* m = std::get_if<MertonFrozen>(&s); m && m->e != 0 && m->e != 1) {
            throw std::invalid_argument("merton_frozen regime must be 0 or 1");
        }
    }
}

PathBundle simulate_world(const Scenario& scenario, RngSpec rng) {
    const SampleOptions sample{needs_second_driver(scenario.regime), needs_maxima(scenario.regime)};
    PathBundle bundle = sample_paths(scenario.grid, rng, sample);
    bundle.eps = realize_chain(scenario.regime, bundle, scenario.grid, rng);
    decompose(bundle, scenario.regime, scenario.grid);
    return bundle;
}

double log_optimal_log_wealth(const Scenario& scenario, const PathBundle& world) {
    if (is_complete_market(scenario.regime)) {
        return log_optimal_terminal_exact(scenario.regime, scenario.coeffs, world, scenario.grid, scenario.x0);
    }
    return simulate_wealth(LogOptimalG{}, scenario.coeffs, world.eps, world, scenario.grid, scenario.x0)
        .terminal_log_utility;
}

namespace {

std::string scheme_of(const Strategy& s, const RegimeSpec& spec) {
    return std::visit(overloaded{
                          [&](const LogOptimalG&) { return std::string(is_complete_market(spec) ? "exact" : "log_euler"); },
                          [](const CrraOptimalG&) { return std::string("terminal_wealth"); },
                          [](const auto&) { return std::string("log_euler"); },
                      },
                      s);
}

ScenarioEvaluation evaluate_impl(const Scenario& scenario, std::size_t n_paths, RngSpec base) {
    validate(scenario);
    if (n_paths < 2) throw std::invalid_argument("Monte Carlo estimate needs at least two paths");
    const std::size_t n_strat = scenario.strategies.size();

    // log terminal wealth per strategy and path; CRRA slots hold x0 / X^G_T
    std::vector<double> log_wealth(n_paths * n_strat, 0.0);
    std::vector<std::uint8_t> flagged(n_paths, 0);

    for_each_block(n_paths, kDefaultBlocks, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const PathBundle world = simulate_world(scenario, RngSpec{base.seed, base.stream_id + i});
            flagged[i] = world.saturated > 0;
            double log_g = 0.0;
            bool have_g = false;
            for (std::size_t s = 0; s < n_strat; ++s) {
                const Strategy& strat = scenario.strategies[s];
                double value = 0.0;
                if (std::holds_alternative<LogOptimalG>(strat) || std::holds_alternative<CrraOptimalG>(strat)) {
                    if (!have_g) {
                        log_g = log_optimal_log_wealth(scenario, world);
                        have_g = true;
                    }
                    value = std::holds_alternative<LogOptimalG>(strat) ? log_g : std::log(scenario.x0) - log_g;
                } else {
                    value = simulate_wealth(strat, scenario.coeffs, world.eps, world, scenario.grid, scenario.x0)
                                .terminal_log_utility;
                }
                log_wealth[i * n_strat + s] = value;
            }
        }
    });

    ScenarioEvaluation out;
    for (auto f : flagged) out.flagged_paths += f;
    const bool rejected =
        static_cast<double>(out.flagged_paths) > kMaxFlaggedFraction * static_cast<double>(n_paths);

    for (std::size_t s = 0; s < n_strat; ++s) {
        const Strategy& strat = scenario.strategies[s];
        UtilityEstimate est;
        est.name = strategy_name(strat);
        est.scheme = scheme_of(strat, scenario.regime);
        est.flagged_paths = out.flagged_paths;
        est.n_paths = n_paths;
        est.rejected = rejected;
        RunningStats stats;
        if (const auto* crra = std::get_if<CrraOptimalG>(&strat)) {
            const UtilitySpec power = PowerUtility{crra->gamma};
            std::vector<double> deflated(n_paths);
            for (std::size_t i = 0; i < n_paths; ++i) deflated[i] = std::exp(log_wealth[i * n_strat + s]);
            const double y = crra_budget_multiplier(power, deflated, scenario.x0);
            out.budget_multiplier = y;
            for (std::size_t i = 0; i < n_paths; ++i) {
                const double x = inverse_marginal(power, y * deflated[i]);
                stats.add(utility_from_log(scenario.utility, std::log(x)));
            }
        } else {
            for (std::size_t i = 0; i < n_paths; ++i) {
                stats.add(utility_from_log(scenario.utility, log_wealth[i * n_strat + s]));
            }
        }
        est.mean = stats.mean();
        est.se = stats.stderr_mean();
        out.strategies.push_back(est);
    }
    return out;
}

}  // namespace

UtilityEstimate mc_expected_utility(const Strategy& strategy, const Scenario& scenario, std::size_t n_paths,
                                    RngSpec rng) {
    Scenario single = scenario;
    single.strategies = {strategy};
    return evaluate_impl(single, n_paths, rng).strategies.front();
}

ScenarioEvaluation evaluate_scenario(const Scenario& scenario) {
    return evaluate_impl(scenario, scenario.n_paths, RngSpec{scenario.seed, 0});
}

}  // namespace insider
