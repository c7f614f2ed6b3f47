#pragma once

#include <cstddef>
#include <vector>

namespace insider {

/// Jump times t_0 = 0 < ... < t_n = T, each interval cut into m equal steps.
struct TimeGrid {
    std::vector<double> jump_times;
    std::size_t substeps = 1;
    std::vector<double> fine_times;

    std::size_t n_intervals() const noexcept { return jump_times.size() - 1; }
    std::size_t n_fine() const noexcept { return fine_times.size(); }
    double horizon() const noexcept { return jump_times.back(); }
    double interval_length(std::size_t k) const { return jump_times.at(k + 1) - jump_times.at(k); }
    double step(std::size_t k) const { return interval_length(k) / static_cast<double>(substeps); }
    std::size_t jump_index(std::size_t k) const noexcept { return k * substeps; }

    // Interval owning the step that starts at fine index j (j < n_fine() - 1).
    std::size_t interval_of(std::size_t j) const noexcept { return j / substeps; }
};

/// Throws std::invalid_argument on a malformed jump vector.
TimeGrid build_grid(const std::vector<double>& jump_times, std::size_t substeps);

}  // namespace insider
