#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "qwalk/coin.hpp"

namespace qwalk::testing {

inline CoinState random_coin(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::complex<double> a{g(rng), g(rng)}, b{g(rng), g(rng)};
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return CoinState::make(a / n, b / n);
}

// Random 2x2 density matrix (PSD, unit trace).
inline CoinOperator random_density(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CoinOperator a;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = {g(rng), g(rng)};
    CoinOperator rho = a * a.adjoint();
    return rho / rho.trace();
}

inline CoinOperator random_hermitian(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CoinOperator a;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = {g(rng), g(rng)};
    return 0.5 * (a + a.adjoint());
}

inline double max_abs(const CoinOperator& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace qwalk::testing
