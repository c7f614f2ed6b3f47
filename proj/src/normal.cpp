#include "insider/normal.hpp"

#include <cmath>
#include <numbers>

namespace insider {
namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double norm_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

NormalValues std_normal(double x) noexcept { return {norm_cdf(x), norm_pdf(x), norm_sf(x)}; }

}  // namespace insider
