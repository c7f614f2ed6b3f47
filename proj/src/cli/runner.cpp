#include "insider/cli/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "insider/drift.hpp"
#include "insider/market.hpp"

namespace insider::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ScenarioError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
        if (!ok.count(item.key())) fail(where + "." + item.key(), "unknown key");
    }
}

const json& require(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail(where, std::string("missing required key '") + key + "'");
    return obj.at(key);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where, "must be finite");
    return d;
}

std::uint64_t unsigned_int(const json& v, const std::string& where) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        fail(where, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::string type_of(const json& obj, const std::string& where) {
    const json& t = require(obj, where, "type");
    if (!t.is_string()) fail(where + ".type", "expected a string");
    return t.get<std::string>();
}

BaseRegime parse_base(const json& j, const std::string& where) {
    const std::string type = type_of(j, where);
    if (type == "increment_sign") {
        check_keys(j, where, {"type"});
        return IncrementSign{};
    }
    if (type == "drawdown_barrier") {
        check_keys(j, where, {"type", "c"});
        const double c = number(require(j, where, "c"), where + ".c");
        if (!(c > 0.0)) fail(where + ".c", "drawdown barrier must be positive");
        return DrawdownBarrier{c};
    }
    if (type == "pathwise_barrier") {
        check_keys(j, where, {"type", "b_offset"});
        const double b = number(require(j, where, "b_offset"), where + ".b_offset");
        if (!(b > 0.0)) fail(where + ".b_offset", "barrier offset must be positive");
        return PathwiseBarrier{b};
    }
    fail(where + ".type", "unknown or non-base regime '" + type + "'");
}

RegimeSpec parse_regime(const json& j, const std::string& where, std::size_t n_intervals) {
    const std::string type = type_of(j, where);
    if (type == "noisy") {
        check_keys(j, where, {"type", "base", "p"});
        Noisy noisy;
        noisy.base = parse_base(require(j, where, "base"), where + ".base");
        const json& p = require(j, where, "p");
        if (p.is_array()) {
            for (std::size_t i = 0; i < p.size(); ++i) noisy.p.push_back(number(p[i], where + ".p[" + std::to_string(i) + "]"));
        } else {
            noisy.p.assign(n_intervals, number(p, where + ".p"));
        }
        if (noisy.p.size() != n_intervals) fail(where + ".p", "needs one noise level per interval");
        for (std::size_t i = 0; i < noisy.p.size(); ++i) {
            if (!(noisy.p[i] > 0.0 && noisy.p[i] <= 1.0)) fail(where + ".p", "noise levels must lie in (0, 1]");
        }
        return noisy;
    }
    if (type == "joint_increment_sign") {
        check_keys(j, where, {"type"});
        return JointIncrementSign{};
    }
    return as_regime(parse_base(j, where));
}

Strategy parse_strategy(const json& j, const std::string& where) {
    const std::string type = type_of(j, where);
    if (type == "log_optimal") {
        check_keys(j, where, {"type"});
        return LogOptimalG{};
    }
    if (type == "constant_mix") {
        check_keys(j, where, {"type", "pi"});
        return ConstantMix{number(require(j, where, "pi"), where + ".pi")};
    }
    if (type == "merton_frozen") {
        check_keys(j, where, {"type", "e"});
        const auto e = unsigned_int(require(j, where, "e"), where + ".e");
        if (e > 1) fail(where + ".e", "regime must be 0 or 1");
        return MertonFrozen{static_cast<int>(e)};
    }
    if (type == "crra_optimal") {
        check_keys(j, where, {"type", "gamma"});
        const double g = number(require(j, where, "gamma"), where + ".gamma");
        if (!(g < 1.0) || g == 0.0) fail(where + ".gamma", "needs gamma < 1 and gamma != 0");
        return CrraOptimalG{g};
    }
    fail(where + ".type", "unknown strategy '" + type + "'");
}

UtilitySpec parse_utility(const json& j, const std::string& where) {
    const std::string type = type_of(j, where);
    if (type == "log") {
        check_keys(j, where, {"type"});
        return LogUtility{};
    }
    if (type == "power") {
        check_keys(j, where, {"type", "gamma"});
        const double g = number(require(j, where, "gamma"), where + ".gamma");
        if (!(g < 1.0) || g == 0.0) fail(where + ".gamma", "needs gamma < 1 and gamma != 0");
        return PowerUtility{g};
    }
    fail(where + ".type", "unknown utility '" + type + "'");
}

Scenario from_json(const json& root) {
    const std::string top = "scenario";
    check_keys(root, top,
               {"grid", "coefficients", "regime", "strategies", "utility", "n_paths", "seed", "x0", "output_dir"});
    Scenario sc;

    const json& g = require(root, top, "grid");
    check_keys(g, top + ".grid", {"jump_times", "substeps"});
    const json& jt = require(g, top + ".grid", "jump_times");
    if (!jt.is_array()) fail(top + ".grid.jump_times", "expected an array");
    std::vector<double> times;
    for (std::size_t i = 0; i < jt.size(); ++i) {
        times.push_back(number(jt[i], top + ".grid.jump_times[" + std::to_string(i) + "]"));
    }
    const auto substeps = unsigned_int(require(g, top + ".grid", "substeps"), top + ".grid.substeps");
    try {
        sc.grid = build_grid(times, static_cast<std::size_t>(substeps));
    } catch (const std::invalid_argument& ex) {
        fail(top + ".grid", ex.what());
    }

    const json& c = require(root, top, "coefficients");
    const std::string cw = top + ".coefficients";
    check_keys(c, cw, {"r0", "r1", "eta0", "eta1", "xi0", "xi1"});
    sc.coeffs.r0 = number(require(c, cw, "r0"), cw + ".r0");
    sc.coeffs.r1 = number(require(c, cw, "r1"), cw + ".r1");
    sc.coeffs.eta0 = number(require(c, cw, "eta0"), cw + ".eta0");
    sc.coeffs.eta1 = number(require(c, cw, "eta1"), cw + ".eta1");
    sc.coeffs.xi0 = number(require(c, cw, "xi0"), cw + ".xi0");
    sc.coeffs.xi1 = number(require(c, cw, "xi1"), cw + ".xi1");
    if (!(sc.coeffs.r0 > 0.0)) fail(cw + ".r0", "short rates must be positive");
    if (!(sc.coeffs.r1 > 0.0)) fail(cw + ".r1", "short rates must be positive");
    if (!(sc.coeffs.xi0 > 0.0)) fail(cw + ".xi0", "volatilities must be positive");
    if (!(sc.coeffs.xi1 > 0.0)) fail(cw + ".xi1", "volatilities must be positive");
    if (sc.coeffs.xi0 == sc.coeffs.xi1) fail(cw + ".xi1", "volatilities must differ between regimes (xi0 == xi1)");

    sc.regime = parse_regime(require(root, top, "regime"), top + ".regime", sc.grid.n_intervals());

    const json& st = require(root, top, "strategies");
    if (!st.is_array() || st.empty()) fail(top + ".strategies", "expected a non-empty array");
    for (std::size_t i = 0; i < st.size(); ++i) {
        sc.strategies.push_back(parse_strategy(st[i], top + ".strategies[" + std::to_string(i) + "]"));
    }

    sc.utility = root.contains("utility") ? parse_utility(root.at("utility"), top + ".utility") : UtilitySpec{LogUtility{}};
    if (root.contains("n_paths")) {
        sc.n_paths = static_cast<std::size_t>(unsigned_int(root.at("n_paths"), top + ".n_paths"));
        if (sc.n_paths < 2) fail(top + ".n_paths", "must be at least 2");
    } else {
        sc.n_paths = 10000;
    }
    sc.seed = root.contains("seed") ? unsigned_int(root.at("seed"), top + ".seed") : 1;
    if (root.contains("x0")) {
        sc.x0 = number(root.at("x0"), top + ".x0");
        if (!(sc.x0 > 0.0)) fail(top + ".x0", "initial wealth must be positive");
    }
    if (root.contains("output_dir")) {
        if (!root.at("output_dir").is_string()) fail(top + ".output_dir", "expected a string");
        sc.output_dir = root.at("output_dir").get<std::string>();
    }

    try {
        validate(sc);
    } catch (const std::invalid_argument& ex) {
        fail(top, ex.what());
    }
    return sc;
}

json base_to_json(const BaseRegime& base) {
    return std::visit(
        [](const auto& b) -> json {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, IncrementSign>) {
                return {{"type", "increment_sign"}};
            } else if constexpr (std::is_same_v<T, DrawdownBarrier>) {
                return {{"type", "drawdown_barrier"}, {"c", b.c}};
            } else {
                return {{"type", "pathwise_barrier"}, {"b_offset", b.b_offset}};
            }
        },
        base);
}

json to_json(const Scenario& sc) {
    json regime = std::visit(
        [](const auto& r) -> json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Noisy>) {
                return {{"type", "noisy"}, {"base", base_to_json(r.base)}, {"p", r.p}};
            } else if constexpr (std::is_same_v<T, JointIncrementSign>) {
                return {{"type", "joint_increment_sign"}};
            } else {
                return base_to_json(r);
            }
        },
        sc.regime);
    json strategies = json::array();
    for (const auto& s : sc.strategies) {
        strategies.push_back(std::visit(
            [](const auto& v) -> json {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, LogOptimalG>) {
                    return {{"type", "log_optimal"}};
                } else if constexpr (std::is_same_v<T, ConstantMix>) {
                    return {{"type", "constant_mix"}, {"pi", v.pi}};
                } else if constexpr (std::is_same_v<T, MertonFrozen>) {
                    return {{"type", "merton_frozen"}, {"e", v.e}};
                } else {
                    return {{"type", "crra_optimal"}, {"gamma", v.gamma}};
                }
            },
            s));
    }
    json utility = std::holds_alternative<LogUtility>(sc.utility)
                       ? json{{"type", "log"}}
                       : json{{"type", "power"}, {"gamma", std::get<PowerUtility>(sc.utility).gamma}};
    return {
        {"grid", {{"jump_times", sc.grid.jump_times}, {"substeps", sc.grid.substeps}}},
        {"coefficients",
         {{"r0", sc.coeffs.r0}, {"r1", sc.coeffs.r1}, {"eta0", sc.coeffs.eta0}, {"eta1", sc.coeffs.eta1},
          {"xi0", sc.coeffs.xi0}, {"xi1", sc.coeffs.xi1}}},
        {"regime", regime},
        {"strategies", strategies},
        {"utility", utility},
        {"n_paths", sc.n_paths},
        {"seed", sc.seed},
        {"x0", sc.x0},
    };
}

std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

void open_or_throw(std::ofstream& out, const std::filesystem::path& p) {
    out.open(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::filesystem::filesystem_error("cannot open for writing", p, std::make_error_code(std::errc::io_error));
    out.imbue(std::locale::classic());
}

// Seed offset that keeps the closed-form Monte Carlo independent of the paths.
constexpr std::uint64_t kClosedFormSeedOffset = 0x5DEECE66DULL;

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ScenarioError(std::string("scenario: malformed JSON: ") + ex.what());
    }
    return from_json(root);
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string scenario_hash(const Scenario& scenario) {
    const std::string canonical = to_json(scenario).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

int run(Scenario scenario, const RunOptions& opts) {
    namespace fs = std::filesystem;
    if (opts.seed) scenario.seed = *opts.seed;
    if (opts.paths) scenario.n_paths = *opts.paths;
    if (opts.out_dir) scenario.output_dir = *opts.out_dir;
    try {
        validate(scenario);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "scenario: " << ex.what() << "\n";
        return kExitInvalid;
    }

    const fs::path dir(scenario.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << dir.string() << ": cannot create output directory: " << ec.message() << "\n";
        return kExitIo;
    }

    const ScenarioEvaluation eval = evaluate_scenario(scenario);
    const McOptions mc{scenario.n_paths, scenario.seed + kClosedFormSeedOffset, 16};
    const double vf = f_baseline_value(scenario.coeffs, scenario.regime, scenario.grid, scenario.x0);
    const double spread = scenario.coeffs.m1() - scenario.coeffs.m0();

    json closed = {{"vf", vf}};
    std::vector<IntervalValue> breakdown;
    std::optional<double> value;
    double mall_se = 0.0;
    if (const auto* noisy = std::get_if<Noisy>(&scenario.regime)) {
        const NoisyValue nv = noisy_value_decomposition(*noisy, scenario.coeffs, scenario.grid, mc);
        double entropy = 0.0, mall = 0.0;
        for (const auto& iv : nv.per_interval) {
            entropy += iv.entropy;
            mall += iv.malliavin;
        }
        closed["entropy_term"] = entropy;
        closed["malliavin_term"] = mall;
        closed["malliavin_stderr"] = nv.malliavin_stderr;
        closed["value_of_information"] = nv.v_gtilde_minus_vf;
        closed["v_g_minus_gtilde"] = nv.v_g_minus_gtilde;
        closed["v_g_minus_vf"] = nv.v_g_minus_vf;
        breakdown = nv.per_interval;
        value = nv.v_gtilde_minus_vf;
        mall_se = nv.malliavin_stderr;
    } else if (is_complete_market(scenario.regime)) {
        const InformationValue iv = value_of_information_closed(scenario.regime, scenario.coeffs, scenario.grid, mc);
        closed["entropy_term"] = iv.entropy_term;
        closed["malliavin_term"] = iv.malliavin_term;
        closed["malliavin_stderr"] = iv.malliavin_stderr;
        closed["value_of_information"] = iv.value;
        breakdown = iv.per_interval;
        value = iv.value;
        mall_se = iv.malliavin_stderr;
    } else {
        closed["entropy_term"] = nullptr;
        closed["malliavin_term"] = nullptr;
        closed["malliavin_stderr"] = nullptr;
        closed["value_of_information"] = nullptr;
    }

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["scenario_hash"] = scenario_hash(scenario);
    report["regime"] = regime_name(scenario.regime);
    report["utility"] = utility_name(scenario.utility);
    report["n_paths"] = scenario.n_paths;
    report["seed"] = scenario.seed;
    report["x0"] = scenario.x0;
    json per = json::array();
    bool rejected = false;
    for (const auto& est : eval.strategies) {
        per.push_back({{"name", est.name},
                       {"scheme", est.scheme},
                       {"mc_mean", est.mean},
                       {"mc_stderr", est.se},
                       {"flagged_paths", est.flagged_paths}});
        rejected = rejected || est.rejected;
    }
    report["per_strategy"] = per;
    report["closed_form"] = closed;

    if (value && std::holds_alternative<LogUtility>(scenario.utility)) {
        for (std::size_t s = 0; s < scenario.strategies.size(); ++s) {
            if (!std::holds_alternative<LogOptimalG>(scenario.strategies[s])) continue;
            const auto& est = eval.strategies[s];
            const double gain = est.mean - vf;
            const double se = std::sqrt(est.se * est.se + spread * spread * mall_se * mall_se);
            report["log_optimal_check"] = {{"mc_minus_vf", gain},
                                           {"closed_form", *value},
                                           {"difference", gain - *value},
                                           {"stderr", se},
                                           {"within_3_stderr", std::abs(gain - *value) <= 3.0 * se}};
            break;
        }
    }
    if (eval.budget_multiplier > 0.0) report["budget_multiplier"] = eval.budget_multiplier;
    report["flags"] = {{"saturated_paths", eval.flagged_paths},
                       {"flagged_fraction", static_cast<double>(eval.flagged_paths) / static_cast<double>(scenario.n_paths)},
                       {"batch_rejected", rejected}};

    try {
        std::ofstream out;
        open_or_throw(out, dir / "report.json");
        out << report.dump(2) << "\n";

        std::ofstream sum;
        open_or_throw(sum, dir / "summary.csv");
        sum << "k,t_start,t_end,prob1,entropy,malliavin,malliavin_stderr,value\n";
        for (std::size_t k = 0; k < breakdown.size(); ++k) {
            const auto& iv = breakdown[k];
            sum << k << ',' << fmt(scenario.grid.jump_times[k]) << ',' << fmt(scenario.grid.jump_times[k + 1]) << ','
                << fmt(iv.prob1) << ',' << fmt(iv.entropy) << ',' << fmt(iv.malliavin) << ','
                << fmt(iv.malliavin_stderr) << ',' << fmt(iv.value) << '\n';
        }

        if (opts.paths_dump > 0) {
            Strategy shown = LogOptimalG{};
            for (const auto& s : scenario.strategies) {
                if (!std::holds_alternative<CrraOptimalG>(s)) {
                    shown = s;
                    break;
                }
            }
            std::ofstream csv;
            open_or_throw(csv, dir / "paths.csv");
            csv << "path,t,W,W_hat,alpha,eps,S,X\n";
            const auto& grid = scenario.grid;
            for (std::size_t i = 0; i < opts.paths_dump; ++i) {
                const PathBundle world = simulate_world(scenario, RngSpec{scenario.seed, i});
                const AssetPaths assets = simulate_assets(scenario.coeffs, world.eps, world, grid);
                const WealthPath wealth = simulate_wealth(shown, scenario.coeffs, world.eps, world, grid, scenario.x0);
                for (std::size_t j = 0; j < grid.n_fine(); ++j) {
                    const std::size_t k = std::min(grid.interval_of(j), grid.n_intervals() - 1);
                    csv << i << ',' << fmt(grid.fine_times[j]) << ',' << fmt(world.w[j]) << ',' << fmt(world.w_hat[j])
                        << ',' << fmt(world.alpha[j]) << ',' << static_cast<int>(world.eps[k]) << ','
                        << fmt(assets.s[j]) << ',' << fmt(wealth.x[j]) << '\n';
                }
            }
        }
    } catch (const fs::filesystem_error& ex) {
        std::cerr << ex.path1().string() << ": " << ex.what() << "\n";
        return kExitIo;
    }

    if (rejected) {
        std::cerr << "batch rejected: " << eval.flagged_paths << " of " << scenario.n_paths
                  << " paths hit the drift cap\n";
        return kExitRejected;
    }
    return kExitOk;
}

}  // namespace insider::cli
