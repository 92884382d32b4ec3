#pragma once

#include <optional>

#include <Eigen/Dense>

#include "qwalk/coin.hpp"
#include "qwalk/stats.hpp"

namespace qwalk {

// Coefficients of O = r0 I + r1 s1 + r2 s2 + r3 s3, with r_i = Tr(s_i O) / 2,
// so a density matrix has r0 = 1/2. The basis is s1 = sigma_x,
// s2 = [[0, i], [-i, 0]] and s3 = sigma_z; with this sign of s2 the
// decoherent flip acts on (r0..r3) exactly as bloch_step_matrix below, and
// left/right multiplication by Z are z_left()/z_right().
using BlochVector = Eigen::Vector4d;
using TransferMatrix4 = Eigen::Matrix4d;
using TransferMatrix3 = Eigen::Matrix3d;

// s_0 .. s_3 of the basis above.
CoinOperator bloch_basis(int i);

BlochVector bloch_decompose(const CoinOperator& hermitian);
CoinOperator bloch_compose(const BlochVector& v);

// Coefficient maps of O -> Z O and O -> O Z on (r0..r3).
Eigen::Matrix4cd z_left();
Eigen::Matrix4cd z_right();

// U_k = (e^{-ik} P_R + e^{ik} P_L) H
CoinOperator coin_unitary_k(double k);

// One decoherent step at wavenumber k (channel of strength p, then U_k) on
// (r0..r3). Row 0 is (1, 0, 0, 0).
TransferMatrix4 bloch_step_matrix(double k, double p);
// The lower-right block acting on (r1, r2, r3).
TransferMatrix3 reduced_step_matrix(double k, double p);
// Closed-form (1 - M_k)^{-1}; throws SingularityError for p <= 0.
TransferMatrix3 resolvent(double k, double p);

// Uniform periodic trapezoidal rule for (1/2pi) int_{-pi}^{pi} dk: nodes
// -pi + 2 pi j / N, weights 1/N. Exact for trigonometric polynomials of
// degree < N.
class QuadratureGrid {
public:
    explicit QuadratureGrid(int nodes);
    // max(64, 4 t + 8): exact for every moment integrand at step t.
    static QuadratureGrid for_steps(int t);

    int size() const { return nodes_; }
    double node(int j) const;
    double weight() const { return 1.0 / nodes_; }

private:
    int nodes_;
};

struct MomentOptions {
    // Overrides QuadratureGrid::for_steps; must be >= 4 t + 8.
    std::optional<int> quadrature_nodes;
};

// <x>_t. For p > 0 uses the resolvent form R (M - M^{t+1}); at p = 0 sums the
// powers directly via binary exponentiation.
double first_moment_exact(const CoinState& coin, double p, int t, const MomentOptions& options = {});
// <x^2>_t, independent of the initial coin.
double second_moment_exact(double p, int t, const MomentOptions& options = {});

// Long-time constant (1-p)/(p(2-p)) [(1-p)(|a|^2-|b|^2) + 2 Re(a* b)]; p in (0, 1].
double first_moment_asymptotic(const CoinState& coin, double p);
// t (1 + 2(1-p)^2/(p(2-p))) - 7 (1-p)^2 / (p^2 (2-p)^2); p in (0, 1].
double second_moment_asymptotic(double p, double t);
// Slope of the asymptotic second moment.
double asymptotic_variance_slope(double p);

// t* = (2/p) log(1/epsilon): beyond it ||M_k^t|| < epsilon.
double crossover_time(double p, double epsilon);

// mean(t), variance(t) = <x^2>_t - <x>_t^2 for t = 1..t_max, accumulated
// incrementally on one quadrature grid sized for t_max.
MomentSeries moment_series(const CoinState& coin, double p, int t_max, const MomentOptions& options = {});

// Power-sum route, valid for every p in [0, 1]: returns (sum_{j=1}^t M^j,
// sum_{j=1}^t sum_{j'=1}^{j-1} M^{j-j'}) via one 9x9 block-matrix power.
std::pair<TransferMatrix3, TransferMatrix3> power_sums(const TransferMatrix3& m, int t);

}  // namespace qwalk
