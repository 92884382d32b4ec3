#include "qwalk/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qwalk/errors.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

cdouble LatticeDensityMatrix::at(int x, int c, int y, int d) const {
    if (std::abs(x) > t_ || std::abs(y) > t_) return {};
    return entries_[basis(x, c) * dim_ + basis(y, d)];
}

LatticeDensityMatrix LatticeDensityMatrix::from_pure(const PureWalkState& state) {
    const int t = state.steps();
    LatticeDensityMatrix rho(t);
    std::vector<cdouble> psi(rho.dim_);
    for (int x = -t; x <= t; ++x) {
        psi[rho.basis(x, 0)] = state.right(x);
        psi[rho.basis(x, 1)] = state.left(x);
    }
    for (std::size_t i = 0; i < rho.dim_; ++i)
        for (std::size_t j = 0; j < rho.dim_; ++j) rho.entries_[i * rho.dim_ + j] = psi[i] * std::conj(psi[j]);
    return rho;
}

cdouble LatticeDensityMatrix::trace() const {
    cdouble s{};
    for (std::size_t i = 0; i < dim_; ++i) s += entries_[i * dim_ + i];
    return s;
}

double LatticeDensityMatrix::purity() const {
    // tr(rho^2) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho
    double s = 0.0;
    for (const auto& v : entries_) s += std::norm(v);
    return s;
}

double LatticeDensityMatrix::hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i; j < dim_; ++j)
            m = std::max(m, std::abs(entries_[i * dim_ + j] - std::conj(entries_[j * dim_ + i])));
    return m;
}

Eigen::MatrixXcd LatticeDensityMatrix::to_matrix() const {
    Eigen::MatrixXcd m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(i, j) = entries_[i * dim_ + j];
    return m;
}

double LatticeDensityMatrix::min_eigenvalue() const {
    const Eigen::MatrixXcd m = to_matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double LatticeDensityMatrix::max_abs_difference(const LatticeDensityMatrix& other) const {
    const int t = std::max(t_, other.t_);
    double m = 0.0;
    for (int x = -t; x <= t; ++x)
        for (int c = 0; c < 2; ++c)
            for (int y = -t; y <= t; ++y)
                for (int d = 0; d < 2; ++d) m = std::max(m, std::abs(at(x, c, y, d) - other.at(x, c, y, d)));
    return m;
}

LatticeDensityMatrix initial_density(const CoinState& coin) {
    const CoinState c = CoinState::make(coin.alpha, coin.beta);
    LatticeDensityMatrix rho(0);
    const CoinOperator chi = c.density();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) rho.ref(0, a, 0, b) = chi(a, b);
    return rho;
}

LatticeDensityMatrix decoherent_step(const LatticeDensityMatrix& rho, const KrausChannel& channel) {
    // Superoperator on a vectorized 2x2 coin block, index 2c + d:
    // S[(c,d),(e,f)] = sum_n G_n(c,e) conj(G_n(d,f)),  G_n = H A_n.
    std::array<cdouble, 16> s{};
    const CoinOperator h = hadamard_coin();
    for (const auto& a : channel.operators()) {
        const CoinOperator g = h * a;
        for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
                for (int e = 0; e < 2; ++e)
                    for (int f = 0; f < 2; ++f) s[(2 * c + d) * 4 + 2 * e + f] += g(c, e) * std::conj(g(d, f));
    }

    const int t = rho.steps();
    LatticeDensityMatrix out(t + 1);
    constexpr std::array<int, 2> shift{+1, -1};
    // Only blocks with x + t and y + t even can be nonzero.
    for (int x = -t; x <= t; x += 2) {
        for (int y = -t; y <= t; y += 2) {
            const std::size_t r0 = rho.basis(x, 0) * rho.dim_ + rho.basis(y, 0);
            const std::array<cdouble, 4> b{rho.entries_[r0], rho.entries_[r0 + 1], rho.entries_[r0 + rho.dim_],
                                           rho.entries_[r0 + rho.dim_ + 1]};
            for (int c = 0; c < 2; ++c) {
                for (int d = 0; d < 2; ++d) {
                    const cdouble* row = &s[(2 * c + d) * 4];
                    out.ref(x + shift[c], c, y + shift[d], d) = row[0] * b[0] + row[1] * b[1] + row[2] * b[2] + row[3] * b[3];
                }
            }
        }
    }
    return out;
}

LatticeDensityMatrix evolve_density(const CoinState& coin, const KrausChannel& channel, int steps, int oracle_limit) {
    if (steps < 0) throw DomainError("step count must be non-negative");
    if (steps > oracle_limit) {
        throw ResourceError("density oracle limited to " + std::to_string(oracle_limit) + " steps, requested " +
                            std::to_string(steps) + "; raise the oracle limit to at least " + std::to_string(steps) +
                            " (memory ~ " + std::to_string(64.0 * steps * steps / 1e6) + " MB)");
    }
    LatticeDensityMatrix rho = initial_density(coin);
    for (int i = 0; i < steps; ++i) rho = decoherent_step(rho, channel);
    return rho;
}

PositionDistribution position_marginal(const LatticeDensityMatrix& rho) {
    const int t = rho.steps();
    PositionDistribution d{-t, std::vector<double>(2 * static_cast<std::size_t>(t) + 1, 0.0)};
    for (int x = -t; x <= t; ++x) d.probabilities[static_cast<std::size_t>(x + t)] = rho.at(x, 0, x, 0).real() + rho.at(x, 1, x, 1).real();
    return d;
}

}  // namespace qwalk
