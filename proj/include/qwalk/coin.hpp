#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qwalk {

using cdouble = std::complex<double>;

// 2x2 operator on the coin, basis order (R, L): |R> = e0, |L> = e1.
using CoinOperator = Eigen::Matrix2cd;

inline constexpr double kAlgebraTolerance = 1e-12;

CoinOperator hadamard_coin();
CoinOperator projector_right();
CoinOperator projector_left();
// Z = P_R - P_L
CoinOperator pauli_z();

struct CoinState {
    cdouble alpha{1.0, 0.0};  // amplitude on |R>
    cdouble beta{0.0, 0.0};   // amplitude on |L>

    // Throws DomainError unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
    static CoinState make(cdouble alpha, cdouble beta);
    static CoinState right() { return {}; }
    static CoinState left() { return {cdouble{0.0}, cdouble{1.0}}; }

    double norm_squared() const { return std::norm(alpha) + std::norm(beta); }
    Eigen::Vector2cd vector() const { return {alpha, beta}; }
    // |Phi><Phi|
    CoinOperator density() const;
};

enum class ChannelModel { Measurement, Dephasing, WeakMeasurement };

std::string_view to_string(ChannelModel model);
// Accepts "measurement", "dephasing", "weak" / "weak_measurement".
ChannelModel parse_channel_model(std::string_view name);

// The same decoherence strength expressed in all three parameterizations,
// tied by 1 - p = cos(2 theta) = 2 sqrt(q (1 - q)), q on the >= 1/2 branch.
struct ChannelStrength {
    double p = 0.0;
    double theta = 0.0;
    double q = 0.5;

    static ChannelStrength from_p(double p);
    static ChannelStrength from_theta(double theta);
    static ChannelStrength from_q(double q);
};

ChannelStrength equivalent_parameters(double value, ChannelModel native);

class KrausChannel {
public:
    // Throws InvariantError if sum A^dagger A != I within 1e-12 or the operator
    // count does not match the model.
    KrausChannel(std::vector<CoinOperator> operators, ChannelModel model, double native_strength);

    const std::vector<CoinOperator>& operators() const { return operators_; }
    ChannelModel model() const { return model_; }
    // Strength in the model's own units (p, theta or q as given).
    double native_strength() const { return native_strength_; }
    const ChannelStrength& strength() const { return strength_; }
    double p() const { return strength_.p; }

    // Largest entry of |sum A^dagger A - I|.
    double completeness_defect() const;

private:
    std::vector<CoinOperator> operators_;
    ChannelModel model_;
    double native_strength_;
    ChannelStrength strength_;
};

// {sqrt(p) P_R, sqrt(p) P_L, sqrt(1-p) I}
KrausChannel measurement_channel(double p);
// (1/sqrt2) diag(e^{+-i theta}, e^{-+i theta}), theta in [0, pi/4]
KrausChannel dephasing_channel(double theta);
// {sqrt(q) P_R + sqrt(1-q) P_L, sqrt(1-q) P_R + sqrt(q) P_L}
KrausChannel weak_measurement_channel(double q);
KrausChannel make_channel(ChannelModel model, double native_strength);

// chi -> sum_n A_n chi A_n^dagger
CoinOperator apply_channel(const KrausChannel& channel, const CoinOperator& chi);

}  // namespace qwalk
