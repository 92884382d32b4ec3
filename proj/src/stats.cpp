#include "qwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qwalk/errors.hpp"

namespace qwalk {

double PositionDistribution::at(int x) const {
    const long i = static_cast<long>(x) - offset;
    if (i < 0 || i >= static_cast<long>(probabilities.size())) return 0.0;
    return probabilities[static_cast<std::size_t>(i)];
}

double PositionDistribution::total() const {
    return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

double moment(const PositionDistribution& dist, int order) {
    if (order < 0) throw DomainError("moment order must be non-negative");
    double sum = 0.0;
    for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
        const double x = dist.offset + static_cast<double>(i);
        sum += std::pow(x, order) * dist.probabilities[i];
    }
    return sum;
}

PositionDistribution classical_binomial(int t) {
    if (t < 0) throw DomainError("step count must be non-negative");
    // Unnormalized binomial coefficients by multiplicative recurrence outward
    // from the central term; tails underflow to zero instead of overflowing.
    std::vector<double> c(static_cast<std::size_t>(t) + 1, 0.0);
    const int mid = t / 2;
    c[mid] = 1.0;
    for (int k = mid; k < t; ++k) c[k + 1] = c[k] * (t - k) / (k + 1);
    for (int k = mid; k > 0; --k) c[k - 1] = c[k] * k / (t - k + 1);
    // symmetric pairwise accumulation keeps the sum independent of orientation
    double norm = 0.0;
    for (int k = 0; k < (t + 1) / 2; ++k) norm += c[k] + c[t - k];
    if (t % 2 == 0) norm += c[mid];

    PositionDistribution d{-t, std::vector<double>(2 * static_cast<std::size_t>(t) + 1, 0.0)};
    for (int k = 0; k <= t; ++k) d.probabilities[2 * static_cast<std::size_t>(k)] = c[k] / norm;
    return d;
}

namespace {

template <typename Fn>
void for_union(const PositionDistribution& a, const PositionDistribution& b, Fn&& fn) {
    if (a.probabilities.empty() && b.probabilities.empty()) return;
    int lo = a.probabilities.empty() ? b.min_x() : a.min_x();
    int hi = a.probabilities.empty() ? b.max_x() : a.max_x();
    if (!b.probabilities.empty()) {
        lo = std::min(lo, b.min_x());
        hi = std::max(hi, b.max_x());
    }
    for (int x = lo; x <= hi; ++x) fn(a.at(x), b.at(x));
}

}  // namespace

double total_variation(const PositionDistribution& a, const PositionDistribution& b) {
    double sum = 0.0;
    for_union(a, b, [&](double pa, double pb) { sum += std::abs(pa - pb); });
    return 0.5 * sum;
}

double max_abs_difference(const PositionDistribution& a, const PositionDistribution& b) {
    double m = 0.0;
    for_union(a, b, [&](double pa, double pb) { m = std::max(m, std::abs(pa - pb)); });
    return m;
}

MomentEntry summarize(const PositionDistribution& dist, int t) {
    MomentEntry e;
    e.t = t;
    e.mean = moment(dist, 1);
    e.variance = moment(dist, 2) - e.mean * e.mean;
    return e;
}

void RawMomentSums::resize(std::size_t steps_plus_one) {
    for (auto* v : {&m1, &m2, &m1_sq, &m2_sq, &m1_m2}) v->assign(steps_plus_one, 0.0);
}

void RawMomentSums::add(const RawMomentSums& other) {
    if (m1.empty()) resize(other.m1.size());
    runs += other.runs;
    for (std::size_t i = 0; i < m1.size(); ++i) {
        m1[i] += other.m1[i];
        m2[i] += other.m2[i];
        m1_sq[i] += other.m1_sq[i];
        m2_sq[i] += other.m2_sq[i];
        m1_m2[i] += other.m1_m2[i];
    }
}

void RawMomentSums::subtract(const RawMomentSums& other) {
    runs -= other.runs;
    for (std::size_t i = 0; i < m1.size(); ++i) {
        m1[i] -= other.m1[i];
        m2[i] -= other.m2[i];
        m1_sq[i] -= other.m1_sq[i];
        m2_sq[i] -= other.m2_sq[i];
        m1_m2[i] -= other.m1_m2[i];
    }
}

MomentSeries RawMomentSums::to_series() const {
    MomentSeries series;
    if (runs == 0) return series;
    const double n = static_cast<double>(runs);
    series.reserve(m1.size());
    for (std::size_t t = 0; t < m1.size(); ++t) {
        MomentEntry e;
        e.t = static_cast<int>(t);
        const double a = m1[t] / n;
        const double b = m2[t] / n;
        e.mean = a;
        e.variance = b - a * a;
        if (runs >= 2) {
            const double c11 = std::max(0.0, (m1_sq[t] - n * a * a) / (n - 1.0));
            const double c22 = std::max(0.0, (m2_sq[t] - n * b * b) / (n - 1.0));
            const double c12 = (m1_m2[t] - n * a * b) / (n - 1.0);
            e.stderr_mean = std::sqrt(c11 / n);
            e.stderr_variance = std::sqrt(std::max(0.0, 4.0 * a * a * c11 - 4.0 * a * c12 + c22) / n);
        }
        series.push_back(e);
    }
    return series;
}

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw DomainError("least_squares needs >= 2 paired points");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw DomainError("least_squares: abscissae are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (xs.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - fit.intercept - fit.slope * xs[i];
            rss += r * r;
        }
        fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

JackknifeEstimate jackknife(const RawMomentSums& total, std::span<const RawMomentSums> groups,
                            const std::function<double(const MomentSeries&)>& statistic) {
    JackknifeEstimate est;
    est.value = statistic(total.to_series());
    const std::size_t g = groups.size();
    if (g < 2) return est;
    std::vector<double> leave_out(g);
    for (std::size_t i = 0; i < g; ++i) {
        RawMomentSums rest = total;
        rest.subtract(groups[i]);
        leave_out[i] = statistic(rest.to_series());
    }
    const double mean = std::accumulate(leave_out.begin(), leave_out.end(), 0.0) / static_cast<double>(g);
    double ss = 0.0;
    for (double v : leave_out) ss += (v - mean) * (v - mean);
    est.standard_error = std::sqrt(ss * static_cast<double>(g - 1) / static_cast<double>(g));
    return est;
}

}  // namespace qwalk
