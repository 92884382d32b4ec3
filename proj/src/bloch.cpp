#include "qwalk/bloch.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

using Matrix9d = Eigen::Matrix<double, 9, 9>;

void check_p(double p, bool allow_zero) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0 || (!allow_zero && p == 0.0)) {
        throw DomainError(std::string("decoherence strength p must lie in ") + (allow_zero ? "[0, 1]" : "(0, 1]") +
                          ", got " + std::to_string(p));
    }
}

template <typename Matrix>
Matrix matrix_power(Matrix base, int n) {
    Matrix result = Matrix::Identity(base.rows(), base.cols());
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Pairwise summation; result depends only on the values, not on who produced them.
double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

int resolve_nodes(const MomentOptions& options, int t) {
    const int minimum = 4 * t + 8;
    if (!options.quadrature_nodes) return QuadratureGrid::for_steps(t).size();
    if (*options.quadrature_nodes < minimum) {
        throw DomainError("quadrature needs at least " + std::to_string(minimum) + " nodes at t = " + std::to_string(t) +
                          ", got " + std::to_string(*options.quadrature_nodes));
    }
    return *options.quadrature_nodes;
}

Eigen::Vector3d traceless_part(const CoinState& coin) {
    const CoinState c = CoinState::make(coin.alpha, coin.beta);
    return bloch_decompose(c.density()).tail<3>();
}

}  // namespace

CoinOperator bloch_basis(int i) {
    using namespace std::complex_literals;
    CoinOperator s;
    switch (i) {
        case 0:
            s << 1.0, 0.0, 0.0, 1.0;
            break;
        case 1:
            s << 0.0, 1.0, 1.0, 0.0;
            break;
        case 2:
            s << 0.0, 1i, -1i, 0.0;
            break;
        case 3:
            s << 1.0, 0.0, 0.0, -1.0;
            break;
        default:
            throw DomainError("Bloch basis index must be 0..3");
    }
    return s;
}

BlochVector bloch_decompose(const CoinOperator& hermitian) {
    BlochVector v;
    for (int i = 0; i < 4; ++i) v(i) = 0.5 * (bloch_basis(i) * hermitian).trace().real();
    return v;
}

CoinOperator bloch_compose(const BlochVector& v) {
    CoinOperator o = CoinOperator::Zero();
    for (int i = 0; i < 4; ++i) o += v(i) * bloch_basis(i);
    return o;
}

Eigen::Matrix4cd z_left() {
    using namespace std::complex_literals;
    Eigen::Matrix4cd m;
    m << 0.0, 0.0, 0.0, 1.0,
         0.0, 0.0, 1i, 0.0,
         0.0, -1i, 0.0, 0.0,
         1.0, 0.0, 0.0, 0.0;
    return m;
}

Eigen::Matrix4cd z_right() {
    using namespace std::complex_literals;
    Eigen::Matrix4cd m;
    m << 0.0, 0.0, 0.0, 1.0,
         0.0, 0.0, -1i, 0.0,
         0.0, 1i, 0.0, 0.0,
         1.0, 0.0, 0.0, 0.0;
    return m;
}

CoinOperator coin_unitary_k(double k) {
    CoinOperator phase = CoinOperator::Zero();
    phase(0, 0) = std::polar(1.0, -k);
    phase(1, 1) = std::polar(1.0, k);
    return phase * hadamard_coin();
}

TransferMatrix4 bloch_step_matrix(double k, double p) {
    check_p(p, true);
    const double c = std::cos(2.0 * k);
    const double s = std::sin(2.0 * k);
    const double d = 1.0 - p;
    TransferMatrix4 m;
    m << 1.0, 0.0, 0.0, 0.0,
         0.0, 0.0, -d * s, c,
         0.0, 0.0, -d * c, -s,
         0.0, d, 0.0, 0.0;
    return m;
}

TransferMatrix3 reduced_step_matrix(double k, double p) { return bloch_step_matrix(k, p).bottomRightCorner<3, 3>(); }

TransferMatrix3 resolvent(double k, double p) {
    check_p(p, true);
    if (p == 0.0) throw SingularityError("(1 - M_k) is singular at p = 0");
    const double c = std::cos(2.0 * k);
    const double s = std::sin(2.0 * k);
    const double d = 1.0 - p;
    TransferMatrix3 m;
    m << 1.0 + d * c, -d * s, d + c,
         -d * s, 1.0 - d * c, -s,
         d * (1.0 + d * c), -d * d * s, 1.0 + d * c;
    return m / (p * (2.0 - p));
}

QuadratureGrid::QuadratureGrid(int nodes) : nodes_(nodes) {
    if (nodes < 1) throw DomainError("quadrature grid needs at least one node");
}

QuadratureGrid QuadratureGrid::for_steps(int t) { return QuadratureGrid(std::max(64, 4 * t + 8)); }

double QuadratureGrid::node(int j) const { return -std::numbers::pi + 2.0 * std::numbers::pi * j / nodes_; }

std::pair<TransferMatrix3, TransferMatrix3> power_sums(const TransferMatrix3& m, int t) {
    if (t < 0) throw DomainError("step count must be non-negative");
    // B = [[M, I, 0], [0, I, I], [0, 0, I]]; the top block row of B^n is
    // (M^n, sum_{i<n} M^i, sum_{i<n-1} (n-1-i) M^i).
    Matrix9d b = Matrix9d::Zero();
    b.block<3, 3>(0, 0) = m;
    b.block<3, 3>(0, 3).setIdentity();
    b.block<3, 3>(3, 3).setIdentity();
    b.block<3, 3>(3, 6).setIdentity();
    b.block<3, 3>(6, 6).setIdentity();
    const Matrix9d bn = matrix_power(b, t + 1);
    const TransferMatrix3 id = TransferMatrix3::Identity();
    return {bn.block<3, 3>(0, 3) - id, bn.block<3, 3>(0, 6) - static_cast<double>(t) * id};
}

double first_moment_exact(const CoinState& coin, double p, int t, const MomentOptions& options) {
    check_p(p, true);
    if (t < 0) throw DomainError("step count must be non-negative");
    const Eigen::Vector3d r = traceless_part(coin);
    if (t == 0) return 0.0;
    const QuadratureGrid grid(resolve_nodes(options, t));
    std::vector<double> values(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j) {
        const double k = grid.node(j);
        const TransferMatrix3 m = reduced_step_matrix(k, p);
        TransferMatrix3 sum;
        if (p > 0.0) {
            sum = resolvent(k, p) * (m - matrix_power(m, t + 1));
        } else {
            sum = power_sums(m, t).first;
        }
        // Tr{Z O} = 2 r3
        values[static_cast<std::size_t>(j)] = 2.0 * sum.row(2).dot(r);
    }
    return pairwise_sum(values.data(), values.size()) * grid.weight();
}

double second_moment_exact(double p, int t, const MomentOptions& options) {
    check_p(p, true);
    if (t < 0) throw DomainError("step count must be non-negative");
    if (t == 0) return 0.0;
    const QuadratureGrid grid(resolve_nodes(options, t));
    const TransferMatrix3 id = TransferMatrix3::Identity();
    std::vector<double> values(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j) {
        const double k = grid.node(j);
        const TransferMatrix3 m = reduced_step_matrix(k, p);
        TransferMatrix3 pairs;
        if (p > 0.0) {
            // sum_{j=1}^t sum_{j'<j} M^{j-j'} = R M [t - R (1 - M^t)]
            const TransferMatrix3 r = resolvent(k, p);
            pairs = r * m * (static_cast<double>(t) * id - r * (id - matrix_power(m, t)));
        } else {
            pairs = power_sums(m, t).second;
        }
        values[static_cast<std::size_t>(j)] = 2.0 * pairs(2, 2);
    }
    return static_cast<double>(t) + pairwise_sum(values.data(), values.size()) * grid.weight();
}

double first_moment_asymptotic(const CoinState& coin, double p) {
    check_p(p, false);
    const CoinState c = CoinState::make(coin.alpha, coin.beta);
    const double d = 1.0 - p;
    const double bracket = d * (std::norm(c.alpha) - std::norm(c.beta)) + 2.0 * (std::conj(c.alpha) * c.beta).real();
    return d / (p * (2.0 - p)) * bracket;
}

double asymptotic_variance_slope(double p) {
    check_p(p, false);
    const double d = 1.0 - p;
    return 1.0 + 2.0 * d * d / (p * (2.0 - p));
}

double second_moment_asymptotic(double p, double t) {
    check_p(p, false);
    const double d = 1.0 - p;
    const double g = p * (2.0 - p);
    return t * asymptotic_variance_slope(p) - 7.0 * d * d / (g * g);
}

double crossover_time(double p, double epsilon) {
    check_p(p, false);
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
    return 2.0 / p * std::log(1.0 / epsilon);
}

MomentSeries moment_series(const CoinState& coin, double p, int t_max, const MomentOptions& options) {
    check_p(p, true);
    if (t_max < 1) throw DomainError("t_max must be >= 1");
    const Eigen::Vector3d r = traceless_part(coin);
    const QuadratureGrid grid(resolve_nodes(options, t_max));
    const auto n = static_cast<std::size_t>(t_max) + 1;
    std::vector<CompensatedSum> first(n), second(n);

    // Third rows only: v_t = e3^T M^t, q_t = sum_{j<=t} v_j, s_t = s_{t-1} + q_{t-1}.
    for (int j = 0; j < grid.size(); ++j) {
        const TransferMatrix3 m = reduced_step_matrix(grid.node(j), p);
        Eigen::RowVector3d v(0.0, 0.0, 1.0);
        Eigen::RowVector3d q = Eigen::RowVector3d::Zero();
        Eigen::RowVector3d s = Eigen::RowVector3d::Zero();
        for (std::size_t t = 1; t < n; ++t) {
            s += q;
            v = v * m;
            q += v;
            first[t].add(2.0 * q.dot(r.transpose()));
            second[t].add(2.0 * s(2));
        }
    }

    MomentSeries series;
    series.reserve(n - 1);
    for (std::size_t t = 1; t < n; ++t) {
        MomentEntry e;
        e.t = static_cast<int>(t);
        e.mean = first[t].value() * grid.weight();
        const double x2 = static_cast<double>(t) + second[t].value() * grid.weight();
        e.variance = x2 - e.mean * e.mean;
        series.push_back(e);
    }
    return series;
}

}  // namespace qwalk
