#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qwalk/coin.hpp"
#include "qwalk/stats.hpp"

namespace qwalk {

class PureWalkState;

inline constexpr int kDefaultOracleLimit = 200;

// Joint particle/coin density operator on the lattice -t..t. Position-major
// layout: basis index 2 (x + t) + c with c = 0 for R and 1 for L, so every
// (x, y) pair owns a contiguous-in-c 2x2 coin block.
class LatticeDensityMatrix {
public:
    LatticeDensityMatrix() = default;
    static LatticeDensityMatrix from_pure(const PureWalkState& state);

    int steps() const { return t_; }
    std::size_t dimension() const { return dim_; }
    cdouble at(int x, int c, int y, int d) const;
    const std::vector<cdouble>& entries() const { return entries_; }

    cdouble trace() const;
    double purity() const;
    double hermiticity_defect() const;
    // Eigendecomposition; meant for tests, not for the stepping loop.
    double min_eigenvalue() const;
    Eigen::MatrixXcd to_matrix() const;
    double max_abs_difference(const LatticeDensityMatrix& other) const;

private:
    friend LatticeDensityMatrix initial_density(const CoinState& coin);
    friend LatticeDensityMatrix decoherent_step(const LatticeDensityMatrix& rho, const KrausChannel& channel);

    LatticeDensityMatrix(int t) : t_(t), dim_(2 * (2 * static_cast<std::size_t>(t) + 1)), entries_(dim_ * dim_) {}
    std::size_t basis(int x, int c) const { return 2 * static_cast<std::size_t>(x + t_) + static_cast<std::size_t>(c); }
    cdouble& ref(int x, int c, int y, int d) { return entries_[basis(x, c) * dim_ + basis(y, d)]; }

    int t_ = 0;
    std::size_t dim_ = 0;
    std::vector<cdouble> entries_;
};

// |0><0| (x) |Phi0><Phi0|
LatticeDensityMatrix initial_density(const CoinState& coin);

// rho -> E (sum_n (I (x) A_n) rho (I (x) A_n)^dagger) E^dagger, with E the flip
// followed by the conditional shift. The lattice grows by one site per side.
LatticeDensityMatrix decoherent_step(const LatticeDensityMatrix& rho, const KrausChannel& channel);

// Throws ResourceError when steps > oracle_limit.
LatticeDensityMatrix evolve_density(const CoinState& coin, const KrausChannel& channel, int steps,
                                    int oracle_limit = kDefaultOracleLimit);

// p(x) = sum_c <x,c| rho |x,c>
PositionDistribution position_marginal(const LatticeDensityMatrix& rho);

}  // namespace qwalk
