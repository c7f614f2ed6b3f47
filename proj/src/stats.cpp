#include "insider/stats.hpp"

#include <algorithm>
#include <stdexcept>

#include "insider/normal.hpp"

namespace insider {

double kolmogorov_sf(double lambda) noexcept {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_normal(std::vector<double> samples, double mean, double sd) {
    if (samples.empty()) throw std::invalid_argument("ks_test_normal: empty sample");
    if (!(sd > 0.0)) throw std::invalid_argument("ks_test_normal: sd must be positive");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = norm_cdf((samples[i] - mean) / sd);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, f - lo, hi - f});
    }
    const double root_n = std::sqrt(n);
    const double lambda = (root_n + 0.12 + 0.11 / root_n) * d;
    return {d, kolmogorov_sf(lambda)};
}

}  // namespace insider
