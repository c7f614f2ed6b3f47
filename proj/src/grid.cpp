#include "insider/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace insider {

TimeGrid build_grid(const std::vector<double>& jump_times, std::size_t substeps) {
    if (jump_times.size() < 2) throw std::invalid_argument("grid: at least two jump times are required");
    if (substeps < 1) throw std::invalid_argument("grid: substeps must be at least 1");
    if (jump_times.front() != 0.0) throw std::invalid_argument("grid: first jump time must be 0");
    for (std::size_t k = 0; k < jump_times.size(); ++k) {
        if (!std::isfinite(jump_times[k])) throw std::invalid_argument("grid: jump times must be finite");
        if (k > 0 && !(jump_times[k] > jump_times[k - 1])) {
            throw std::invalid_argument("grid: jump times must be strictly increasing (index " +
                                        std::to_string(k) + ")");
        }
    }

    TimeGrid grid;
    grid.jump_times = jump_times;
    grid.substeps = substeps;
    const std::size_t n = jump_times.size() - 1;
    grid.fine_times.reserve(n * substeps + 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double t0 = jump_times[k];
        const double h = (jump_times[k + 1] - t0) / static_cast<double>(substeps);
        for (std::size_t i = 0; i < substeps; ++i) grid.fine_times.push_back(t0 + static_cast<double>(i) * h);
    }
    grid.fine_times.push_back(jump_times.back());
    return grid;
}

}  // namespace insider
