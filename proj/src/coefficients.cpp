#include "insider/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace insider {

void MarketCoefficients::validate() const {
    for (double v : {r0, r1, eta0, eta1, xi0, xi1}) {
        if (!std::isfinite(v)) throw std::invalid_argument("coefficients must be finite");
    }
    if (!(r0 > 0.0) || !(r1 > 0.0)) throw std::invalid_argument("short rates must be positive");
    if (!(xi0 > 0.0) || !(xi1 > 0.0)) throw std::invalid_argument("volatilities must be positive");
    if (xi0 == xi1) throw std::invalid_argument("volatilities must differ between regimes (xi0 == xi1)");
}

}  // namespace insider
