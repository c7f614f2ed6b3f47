#pragma once

namespace insider {

/// Regime-dependent short rate, drift and volatility.
struct MarketCoefficients {
    double r0 = 0.01;
    double r1 = 0.01;
    double eta0 = 0.05;
    double eta1 = 0.1;
    double xi0 = 0.2;
    double xi1 = 0.3;

    double r(int e) const noexcept { return e ? r1 : r0; }
    double eta(int e) const noexcept { return e ? eta1 : eta0; }
    double xi(int e) const noexcept { return e ? xi1 : xi0; }

    // Risk premium (eta_e - r_e) / xi_e.
    double premium(int e) const noexcept { return (eta(e) - r(e)) / xi(e); }
    double m0() const noexcept { return premium(0); }
    double m1() const noexcept { return premium(1); }

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

}  // namespace insider
