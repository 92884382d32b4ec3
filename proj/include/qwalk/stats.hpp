#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace qwalk {

// p(x) over consecutive positions offset, offset+1, ...
struct PositionDistribution {
    int offset = 0;
    std::vector<double> probabilities;

    static PositionDistribution point_mass(int x) { return {x, {1.0}}; }

    int min_x() const { return offset; }
    int max_x() const { return offset + static_cast<int>(probabilities.size()) - 1; }
    // Zero outside the stored range.
    double at(int x) const;
    double total() const;
};

struct MomentEntry {
    int t = 0;
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> stderr_mean;
    std::optional<double> stderr_variance;
};

using MomentSeries = std::vector<MomentEntry>;

// sum_x x^order p(x)
double moment(const PositionDistribution& dist, int order);

// C(t, (t+x)/2) / 2^t on the parity-allowed support, offset -t.
PositionDistribution classical_binomial(int t);

// (1/2) sum |a - b| over the union of supports.
double total_variation(const PositionDistribution& a, const PositionDistribution& b);

// Largest |a(x) - b(x)| over the union of supports.
double max_abs_difference(const PositionDistribution& a, const PositionDistribution& b);

MomentEntry summarize(const PositionDistribution& dist, int t = 0);

// Running sums of one trajectory-level quantity pair (m1, m2) = (<x>, <x^2>)
// per time step; the building block of ensemble moment statistics.
struct RawMomentSums {
    std::uint64_t runs = 0;
    std::vector<double> m1, m2, m1_sq, m2_sq, m1_m2;  // indexed by t

    void resize(std::size_t steps_plus_one);
    void add(const RawMomentSums& other);
    void subtract(const RawMomentSums& other);
    // Mean, variance of the ensemble-mean distribution, and standard errors
    // (sample std / sqrt(runs), delta method for the variance).
    MomentSeries to_series() const;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;  // from residuals
};

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys);

// Delete-one-group jackknife of a statistic of the moment series. `total`
// must equal the sum of `groups`.
struct JackknifeEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

JackknifeEstimate jackknife(const RawMomentSums& total, std::span<const RawMomentSums> groups,
                            const std::function<double(const MomentSeries&)>& statistic);

}  // namespace qwalk
