#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "insider/grid.hpp"
#include "insider/rng.hpp"

namespace insider {

struct PathBundle {
    std::vector<double> w;
    std::vector<double> b;  // empty without a second driver

    // Maximum of the driver over each fine step [t_j, t_{j+1}], drawn from the
    // exact Brownian-bridge law given both endpoints. Empty if not sampled.
    std::vector<double> w_step_max;
    std::vector<double> b_step_max;

    std::vector<std::uint8_t> eps;
    std::vector<double> alpha;
    std::vector<double> gamma;
    std::vector<double> w_hat;
    std::vector<double> b_hat;

    std::size_t saturated = 0;  // drift evaluations that hit the cap

    bool has_b() const noexcept { return !b.empty(); }
    bool has_step_max() const noexcept { return !w_step_max.empty(); }
};

struct SampleOptions {
    bool second_driver = false;
    bool step_maxima = true;
};

/// Brownian path(s) on the fine grid. Levels at the jump times come from
/// their own stream, so refining the grid keeps those values fixed; the
/// interior is filled by sequential Brownian-bridge draws.
PathBundle sample_paths(const TimeGrid& grid, RngSpec rng, SampleOptions opts = {});

PathBundle sample_paths(const TimeGrid& grid, RngSpec rng, bool with_second_driver);

/// Maximum of path[from..to] over the sampled points only.
double running_max(const std::vector<double>& path, std::size_t from, std::size_t to);

/// Maximum of a Brownian bridge over a step of length h from a to b.
/// u is a uniform in (0, 1).
double bridge_max(double a, double b, double h, double u) noexcept;

/// Running maxima along the fine grid: out[j] = sup of the path on [t_from, t_j].
/// Uses the step maxima when present, otherwise the sampled points.
std::vector<double> running_max_path(const std::vector<double>& path, const std::vector<double>& step_max,
                                     std::size_t from = 0);

}  // namespace insider
