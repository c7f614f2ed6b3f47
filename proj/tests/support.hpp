#pragma once

#include <cmath>
#include <cstdint>

#include "insider/rng.hpp"

namespace testsupport {

// Unit-test statistical checks use 4 standard errors: the suite runs a few
// hundred of them, and at 3 a clean run would still fail now and then.
inline bool within(double value, double target, double se, double k = 4.0) {
    return std::abs(value - target) <= k * se;
}

/// Hand-rolled generator for property tests: uniform and normal draws from a
/// dedicated Philox stream.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : z_(insider::RngSpec{seed, 0}, insider::Substream::Oracle, 40) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * z_.uniform(); }
    double normal() { return z_.next(); }
    int coin() { return z_.uniform() < 0.5 ? 0 : 1; }

private:
    insider::NormalStream z_;
};

}  // namespace testsupport
