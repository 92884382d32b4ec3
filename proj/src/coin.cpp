#include "qwalk/coin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;
// Slack on closed domain endpoints so that e.g. a printed pi/4 is accepted.
constexpr double kDomainSlack = 1e-12;

double check_unit_interval(double value, const char* what) {
    if (!std::isfinite(value) || value < -kDomainSlack || value > 1.0 + kDomainSlack) {
        throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(value));
    }
    return std::clamp(value, 0.0, 1.0);
}

std::size_t expected_operator_count(ChannelModel model) {
    return model == ChannelModel::Measurement ? 3 : 2;
}

}  // namespace

CoinOperator hadamard_coin() {
    const double s = std::numbers::sqrt2 / 2.0;
    CoinOperator h;
    h << s, s, s, -s;
    return h;
}

CoinOperator projector_right() {
    CoinOperator m = CoinOperator::Zero();
    m(0, 0) = 1.0;
    return m;
}

CoinOperator projector_left() {
    CoinOperator m = CoinOperator::Zero();
    m(1, 1) = 1.0;
    return m;
}

CoinOperator pauli_z() { return projector_right() - projector_left(); }

CoinState CoinState::make(cdouble alpha, cdouble beta) {
    CoinState c{alpha, beta};
    const double n = c.norm_squared();
    if (!std::isfinite(n) || std::abs(n - 1.0) > kAlgebraTolerance) {
        throw DomainError("coin state must be normalized (|alpha|^2 + |beta|^2 = " + std::to_string(n) + ")");
    }
    return c;
}

CoinOperator CoinState::density() const {
    const Eigen::Vector2cd v = vector();
    return v * v.adjoint();
}

std::string_view to_string(ChannelModel model) {
    switch (model) {
        case ChannelModel::Measurement:
            return "measurement";
        case ChannelModel::Dephasing:
            return "dephasing";
        case ChannelModel::WeakMeasurement:
            return "weak_measurement";
    }
    return "unknown";
}

ChannelModel parse_channel_model(std::string_view name) {
    if (name == "measurement") return ChannelModel::Measurement;
    if (name == "dephasing") return ChannelModel::Dephasing;
    if (name == "weak" || name == "weak_measurement") return ChannelModel::WeakMeasurement;
    throw DomainError("unknown channel model '" + std::string(name) + "'");
}

ChannelStrength ChannelStrength::from_p(double p) {
    p = check_unit_interval(p, "p");
    ChannelStrength s;
    s.p = p;
    s.theta = 0.5 * std::acos(1.0 - p);
    s.q = 0.5 * (1.0 + std::sqrt(p * (2.0 - p)));
    return s;
}

ChannelStrength ChannelStrength::from_theta(double theta) {
    if (!std::isfinite(theta) || theta < -kDomainSlack || theta > kQuarterPi + kDomainSlack) {
        throw DomainError("theta must lie in [0, pi/4], got " + std::to_string(theta));
    }
    theta = std::clamp(theta, 0.0, kQuarterPi);
    ChannelStrength s;
    // 1 - cos 2theta, written to keep precision at small theta
    const double sn = std::sin(theta);
    s.p = std::clamp(2.0 * sn * sn, 0.0, 1.0);
    s.theta = theta;
    s.q = 0.5 * (1.0 + std::sin(2.0 * theta));
    return s;
}

ChannelStrength ChannelStrength::from_q(double q) {
    q = check_unit_interval(q, "q");
    const double qc = std::max(q, 1.0 - q);
    ChannelStrength s;
    s.p = std::clamp(1.0 - 2.0 * std::sqrt(qc * (1.0 - qc)), 0.0, 1.0);
    s.theta = 0.5 * std::acos(1.0 - s.p);
    s.q = qc;
    return s;
}

ChannelStrength equivalent_parameters(double value, ChannelModel native) {
    switch (native) {
        case ChannelModel::Measurement:
            return ChannelStrength::from_p(value);
        case ChannelModel::Dephasing:
            return ChannelStrength::from_theta(value);
        case ChannelModel::WeakMeasurement:
            return ChannelStrength::from_q(value);
    }
    throw DomainError("unknown channel model");
}

KrausChannel::KrausChannel(std::vector<CoinOperator> operators, ChannelModel model, double native_strength)
    : operators_(std::move(operators)),
      model_(model),
      native_strength_(native_strength),
      strength_(equivalent_parameters(native_strength, model)) {
    if (operators_.size() != expected_operator_count(model_)) {
        throw InvariantError("channel model " + std::string(to_string(model_)) + " expects " +
                             std::to_string(expected_operator_count(model_)) + " Kraus operators, got " +
                             std::to_string(operators_.size()));
    }
    const double defect = completeness_defect();
    if (!(defect <= kAlgebraTolerance)) {
        throw InvariantError("Kraus operators violate completeness (defect " + std::to_string(defect) + ")");
    }
}

double KrausChannel::completeness_defect() const {
    CoinOperator sum = CoinOperator::Zero();
    for (const auto& a : operators_) sum += a.adjoint() * a;
    return (sum - CoinOperator::Identity()).cwiseAbs().maxCoeff();
}

KrausChannel measurement_channel(double p) {
    p = check_unit_interval(p, "p");
    const double sp = std::sqrt(p);
    return KrausChannel({sp * projector_right(), sp * projector_left(),
                         std::sqrt(1.0 - p) * CoinOperator::Identity()},
                        ChannelModel::Measurement, p);
}

KrausChannel dephasing_channel(double theta) {
    const double th = ChannelStrength::from_theta(theta).theta;
    const cdouble plus = std::polar(std::numbers::sqrt2 / 2.0, th);
    const cdouble minus = std::conj(plus);
    CoinOperator a0 = CoinOperator::Zero();
    CoinOperator a1 = CoinOperator::Zero();
    a0(0, 0) = plus;
    a0(1, 1) = minus;
    a1(0, 0) = minus;
    a1(1, 1) = plus;
    return KrausChannel({a0, a1}, ChannelModel::Dephasing, th);
}

KrausChannel weak_measurement_channel(double q) {
    q = check_unit_interval(q, "q");
    const double a = std::sqrt(q);
    const double b = std::sqrt(1.0 - q);
    return KrausChannel({a * projector_right() + b * projector_left(), b * projector_right() + a * projector_left()},
                        ChannelModel::WeakMeasurement, q);
}

KrausChannel make_channel(ChannelModel model, double native_strength) {
    switch (model) {
        case ChannelModel::Measurement:
            return measurement_channel(native_strength);
        case ChannelModel::Dephasing:
            return dephasing_channel(native_strength);
        case ChannelModel::WeakMeasurement:
            return weak_measurement_channel(native_strength);
    }
    throw DomainError("unknown channel model");
}

CoinOperator apply_channel(const KrausChannel& channel, const CoinOperator& chi) {
    CoinOperator out = CoinOperator::Zero();
    for (const auto& a : channel.operators()) out += a * chi * a.adjoint();
    return out;
}

}  // namespace qwalk
