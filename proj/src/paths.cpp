#include "insider/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace insider {
namespace {

constexpr std::size_t kMaxLanes = 0xFFFF;

void fill_driver(const TimeGrid& grid, RngSpec rng, Substream level_sub, Substream max_sub, bool step_maxima,
                 std::vector<double>& path, std::vector<double>& step_max) {
    const std::size_t n = grid.n_intervals();
    const std::size_t m = grid.substeps;
    if (n >= kMaxLanes) throw std::invalid_argument("sample_paths: too many intervals");

    path.assign(grid.n_fine(), 0.0);

    NormalStream levels(rng, level_sub, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const double dt = grid.interval_length(k);
        path[(k + 1) * m] = path[k * m] + std::sqrt(dt) * levels.next();
    }

    for (std::size_t k = 0; k < n; ++k) {
        if (m == 1) break;
        NormalStream interior(rng, level_sub, static_cast<std::uint32_t>(k + 1));
        const std::size_t j0 = k * m;
        const double t_end = grid.fine_times[j0 + m];
        const double y = path[j0 + m];
        for (std::size_t i = 1; i < m; ++i) {
            const std::size_t j = j0 + i;
            const double s = grid.fine_times[j - 1];
            const double h = grid.fine_times[j] - s;
            const double remaining = t_end - s;
            const double mean = path[j - 1] + (h / remaining) * (y - path[j - 1]);
            const double var = h * (remaining - h) / remaining;
            path[j] = mean + std::sqrt(std::max(var, 0.0)) * interior.next();
        }
    }

    if (!step_maxima) {
        step_max.clear();
        return;
    }
    step_max.assign(grid.n_fine() - 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        UniformStream u(rng, max_sub, static_cast<std::uint32_t>(k));
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = k * m + i;
            step_max[j] = bridge_max(path[j], path[j + 1], grid.fine_times[j + 1] - grid.fine_times[j], u.next());
        }
    }
}

}  // namespace

double bridge_max(double a, double b, double h, double u) noexcept {
    const double d = b - a;
    const double m = 0.5 * (a + b + std::sqrt(d * d - 2.0 * h * std::log(u)));
    return std::max({m, a, b});
}

PathBundle sample_paths(const TimeGrid& grid, RngSpec rng, SampleOptions opts) {
    PathBundle bundle;
    fill_driver(grid, rng, Substream::DriverW, Substream::DriverWMax, opts.step_maxima, bundle.w,
                bundle.w_step_max);
    if (opts.second_driver) {
        fill_driver(grid, rng, Substream::DriverB, Substream::DriverBMax, opts.step_maxima, bundle.b,
                    bundle.b_step_max);
    }
    return bundle;
}

PathBundle sample_paths(const TimeGrid& grid, RngSpec rng, bool with_second_driver) {
    return sample_paths(grid, rng, SampleOptions{with_second_driver, true});
}

double running_max(const std::vector<double>& path, std::size_t from, std::size_t to) {
    if (from > to || to >= path.size()) throw std::out_of_range("running_max: index range out of bounds");
    return *std::max_element(path.begin() + static_cast<std::ptrdiff_t>(from),
                             path.begin() + static_cast<std::ptrdiff_t>(to) + 1);
}

std::vector<double> running_max_path(const std::vector<double>& path, const std::vector<double>& step_max,
                                     std::size_t from) {
    if (from >= path.size()) throw std::out_of_range("running_max_path: start index out of bounds");
    const bool use_steps = !step_max.empty();
    std::vector<double> out(path.size(), 0.0);
    double current = path[from];
    out[from] = current;
    for (std::size_t j = from + 1; j < path.size(); ++j) {
        current = std::max(current, use_steps ? step_max[j - 1] : path[j]);
        out[j] = current;
    }
    return out;
}

}  // namespace insider
