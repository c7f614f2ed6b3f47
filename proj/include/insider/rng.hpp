#pragma once

// Counter-based random numbers (Philox4x32-10) keyed by a 64-bit seed.
//
// Every draw is a pure function of (seed, stream_id, substream, index), so a
// Monte Carlo path can be regenerated on any thread in any order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace insider {

struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Independent sub-streams carved out of one (seed, stream_id) pair.
enum class Substream : std::uint32_t {
    DriverW = 0,
    DriverWMax = 1,
    DriverB = 2,
    DriverBMax = 3,
    Auxiliary = 4,  // Bernoulli noise of the noisy chain
    Oracle = 16,    // reserved for test-side reference computations
};

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) noexcept;

/// Uniform doubles in the open interval (0, 1), two per Philox block.
class UniformStream {
public:
    UniformStream(RngSpec spec, Substream sub, std::uint32_t lane = 0) noexcept;

    double next() noexcept;

private:
    void refill() noexcept;

    PhiloxKey key_{};
    PhiloxBlock counter_{};
    std::uint32_t block_index_ = 0;
    std::array<double, 2> cache_{};
    int cached_ = 0;
};

/// Standard normals via Box-Muller over a UniformStream.
class NormalStream {
public:
    NormalStream(RngSpec spec, Substream sub, std::uint32_t lane = 0) noexcept
        : uniforms_(spec, sub, lane) {}

    double next() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniforms_.next();
        const double u2 = uniforms_.next();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double uniform() noexcept { return uniforms_.next(); }

private:
    UniformStream uniforms_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace insider
