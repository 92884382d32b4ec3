#include <doctest.h>

#include <cmath>
#include <random>

#include "qwalk/errors.hpp"
#include "qwalk/stats.hpp"

using namespace qwalk;

TEST_CASE("classical binomial") {
    const auto d4 = classical_binomial(4);
    CHECK(d4.offset == -4);
    REQUIRE(d4.probabilities.size() == 9);
    const double expected[] = {1, 0, 4, 0, 6, 0, 4, 0, 1};
    for (int i = 0; i < 9; ++i) CHECK(std::abs(d4.probabilities[i] - expected[i] / 16.0) <= 1e-16);

    const auto d3 = classical_binomial(3);
    CHECK(d3.at(-3) == 0.125);
    CHECK(d3.at(1) == 0.375);
    CHECK(d3.at(0) == 0.0);
    CHECK(classical_binomial(0).probabilities == std::vector<double>{1.0});

    for (int t : {1, 2, 17, 100, 501, 1000}) {
        const auto d = classical_binomial(t);
        CHECK(std::abs(d.total() - 1.0) <= 1e-13);
        CHECK(std::abs(moment(d, 1)) <= 1e-12 * t);
        CHECK(std::abs(summarize(d).variance - t) <= 1e-12 * t);
        for (int x = -t; x <= t; ++x) CHECK(d.at(x) == d.at(-x));
    }
    const auto big = classical_binomial(5000);
    CHECK(std::abs(big.total() - 1.0) <= 1e-12);
    CHECK(std::isfinite(big.at(0)));
    CHECK_THROWS_AS(classical_binomial(-1), DomainError);
}

TEST_CASE("distance measures") {
    const PositionDistribution a{-1, {0.5, 0.0, 0.5}};
    const PositionDistribution b{0, {0.25, 0.75}};
    // union -1..1: |0.5-0| + |0-0.25| + |0.5-0.75| = 1.0
    CHECK(total_variation(a, b) == doctest::Approx(0.5));
    CHECK(max_abs_difference(a, b) == doctest::Approx(0.5));
    CHECK(total_variation(a, a) == 0.0);
    CHECK(total_variation(PositionDistribution::point_mass(-3), PositionDistribution::point_mass(5)) == 1.0);
    CHECK(total_variation(a, b) == total_variation(b, a));

    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u;
    auto random_dist = [&](int offset, int n) {
        PositionDistribution d{offset, std::vector<double>(n)};
        double s = 0.0;
        for (auto& p : d.probabilities) s += (p = u(gen));
        for (auto& p : d.probabilities) p /= s;
        return d;
    };
    for (int i = 0; i < 50; ++i) {
        const auto x = random_dist(-5, 11), y = random_dist(-2, 9), z = random_dist(-7, 4);
        CHECK(total_variation(x, z) <= total_variation(x, y) + total_variation(y, z) + 1e-15);
        CHECK(total_variation(x, y) <= 1.0);
        CHECK(max_abs_difference(x, y) <= 2.0 * total_variation(x, y) + 1e-15);
    }
}

TEST_CASE("summary of a distribution") {
    // unitary walk from |R> after three steps
    const PositionDistribution d{-3, {0.125, 0, 0.125, 0, 0.625, 0, 0.125}};
    const auto s = summarize(d, 3);
    CHECK(s.t == 3);
    CHECK(s.mean == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.variance == doctest::Approx(2.75).epsilon(1e-15));
    CHECK_FALSE(s.stderr_mean.has_value());
    CHECK(moment(d, 0) == 1.0);
    CHECK(moment(d, 2) == doctest::Approx(3.0));
    CHECK_THROWS_AS(moment(d, -1), DomainError);
}

namespace {

RawMomentSums single_run(double m1, double m2) {
    RawMomentSums s;
    s.resize(1);
    s.runs = 1;
    s.m1[0] = m1;
    s.m2[0] = m2;
    s.m1_sq[0] = m1 * m1;
    s.m2_sq[0] = m2 * m2;
    s.m1_m2[0] = m1 * m2;
    return s;
}

}  // namespace

TEST_CASE("moment sums and standard errors") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> g;
    std::vector<double> a, b;
    RawMomentSums total;
    for (int i = 0; i < 400; ++i) {
        a.push_back(1.0 + 0.3 * g(gen));
        b.push_back(5.0 + 2.0 * g(gen) + a.back());
        total.add(single_run(a.back(), b.back()));
    }
    const double n = 400.0;
    double ma = 0, mb = 0;
    for (int i = 0; i < 400; ++i) ma += a[i] / n, mb += b[i] / n;
    double saa = 0, sbb = 0, sab = 0;
    for (int i = 0; i < 400; ++i) {
        saa += (a[i] - ma) * (a[i] - ma) / (n - 1);
        sbb += (b[i] - mb) * (b[i] - mb) / (n - 1);
        sab += (a[i] - ma) * (b[i] - mb) / (n - 1);
    }
    const auto series = total.to_series();
    REQUIRE(series.size() == 1);
    CHECK(series[0].mean == doctest::Approx(ma).epsilon(1e-13));
    CHECK(series[0].variance == doctest::Approx(mb - ma * ma).epsilon(1e-13));
    CHECK(*series[0].stderr_mean == doctest::Approx(std::sqrt(saa / n)).epsilon(1e-9));
    // gradient of b - a^2 is (-2a, 1)
    const double delta = (4 * ma * ma * saa - 4 * ma * sab + sbb) / n;
    CHECK(*series[0].stderr_variance == doctest::Approx(std::sqrt(delta)).epsilon(1e-9));

    const auto one = single_run(2.0, 5.0).to_series();
    CHECK(one[0].variance == 1.0);
    CHECK_FALSE(one[0].stderr_mean.has_value());
    CHECK(RawMomentSums{}.to_series().empty());

    RawMomentSums copy = total;
    copy.add(single_run(3.0, 4.0));
    copy.subtract(single_run(3.0, 4.0));
    CHECK(copy.runs == total.runs);
    CHECK(copy.m1[0] == doctest::Approx(total.m1[0]).epsilon(1e-15));
}

TEST_CASE("least squares") {
    const std::vector<double> xs{0, 1, 2, 3, 4};
    const std::vector<double> ys{1, 3, 5, 7, 9};
    const auto fit = least_squares(xs, ys);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.slope_stderr == doctest::Approx(0.0));
    // residuals (+1, -1, 0, -1, +1) around y = 2x + 1: rss 4, sxx 10
    const std::vector<double> noisy{2, 2, 5, 6, 10};
    const auto f2 = least_squares(xs, noisy);
    CHECK(f2.slope == doctest::Approx(2.0));
    CHECK(f2.intercept == doctest::Approx(1.0));
    CHECK(f2.slope_stderr == doctest::Approx(std::sqrt(4.0 / 3.0 / 10.0)));
    CHECK_THROWS_AS(least_squares(std::vector<double>{1.0}, std::vector<double>{1.0}), DomainError);
    CHECK_THROWS_AS(least_squares(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}), DomainError);
}

TEST_CASE("jackknife over groups") {
    std::mt19937_64 gen(13);
    std::normal_distribution<double> g;
    std::vector<RawMomentSums> groups(10);
    std::vector<double> group_means;
    RawMomentSums total;
    for (auto& grp : groups) {
        double s = 0.0;
        for (int i = 0; i < 30; ++i) {
            const double v = g(gen);
            grp.add(single_run(v, v * v));
            s += v;
        }
        group_means.push_back(s / 30.0);
        total.add(grp);
    }
    const auto est = jackknife(total, groups, [](const MomentSeries& s) { return s[0].mean; });
    // For the mean with equal group sizes the jackknife error is the standard
    // error of the group means.
    double gm = 0.0;
    for (double v : group_means) gm += v / 10.0;
    double ss = 0.0;
    for (double v : group_means) ss += (v - gm) * (v - gm);
    CHECK(est.value == doctest::Approx(gm).epsilon(1e-12));
    CHECK(est.standard_error == doctest::Approx(std::sqrt(ss / (10.0 * 9.0))).epsilon(1e-9));

    const auto lone = jackknife(total, std::span(groups).first(1), [](const MomentSeries& s) { return s[0].mean; });
    CHECK(lone.standard_error == 0.0);
}
