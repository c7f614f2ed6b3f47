#pragma once

// Standard normal cdf, density and survival function.

namespace insider {

struct NormalValues {
    double cdf;
    double pdf;
    double sf;
};

NormalValues std_normal(double x) noexcept;

double norm_cdf(double x) noexcept;
double norm_sf(double x) noexcept;
double norm_pdf(double x) noexcept;

}  // namespace insider
