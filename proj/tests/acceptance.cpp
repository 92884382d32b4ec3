#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qwalk/bloch.hpp"
#include "qwalk/density.hpp"
#include "qwalk/stats.hpp"
#include "qwalk/walk.hpp"
#include "test_helpers.hpp"

using namespace qwalk;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << (ok ? "" : "!") << what;
    }
};

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

const CoinState kRight = CoinState::right();
const double kThetas[] = {pi / 16, pi / 8, 3 * pi / 16, pi / 4};

void classical_limit(Outcome& o) {
    const auto d = position_marginal(evolve_density(kRight, measurement_channel(1.0), 100));
    const double diff = max_abs_difference(d, classical_binomial(100));
    const auto s = summarize(d);
    o.require(diff <= 1e-10, "max|p - binomial| = " + num(diff));
    o.require(std::abs(s.variance - 100.0) <= 1e-9, "variance = " + num(s.variance));
    o.require(std::abs(s.mean) <= 1e-9, "mean = " + num(s.mean));
}

const EnsembleResult& pi8_ensemble() {
    static const EnsembleResult e =
        run_ensemble(kRight, dephasing_channel(pi / 8), 500, 10000, 20240601, {.workers = 0, .groups = 20});
    return e;
}

void asymptotic_mean(Outcome& o) {
    const double p = ChannelStrength::from_theta(pi / 8).p;
    const double target = first_moment_asymptotic(kRight, p);
    o.require(std::abs(target - 1.0) <= 1e-12, "limit formula = " + num(target));
    const double exact = first_moment_exact(kRight, p, 500);
    o.require(std::abs(exact - 1.0) <= 1e-3, "exact <x>_500 = " + num(exact));
    const auto& m = pi8_ensemble().moments.back();
    const double z = std::abs(m.mean - target) / *m.stderr_mean;
    o.require(z <= 3.0, "MC <x>_500 = " + num(m.mean) + " +- " + num(*m.stderr_mean) + " (z = " + num(z) + ")");
}

std::pair<std::vector<double>, std::vector<double>> window(const MomentSeries& s, int lo, int hi) {
    std::vector<double> ts, vs;
    for (const auto& e : s) {
        if (e.t >= lo && e.t <= hi) {
            ts.push_back(e.t);
            vs.push_back(e.variance);
        }
    }
    return {ts, vs};
}

void linear_variance(Outcome& o) {
    const double p = ChannelStrength::from_theta(pi / 8).p;
    const double slope_expected = asymptotic_variance_slope(p);
    const auto exact = moment_series(kRight, p, 500);
    const auto [ts, vs] = window(exact, 300, 500);
    const auto fit = least_squares(ts, vs);
    o.require(std::abs(slope_expected - 3.0) <= 1e-12, "formula slope = " + num(slope_expected));
    o.require(std::abs(fit.slope - 3.0) <= 0.02, "exact slope = " + num(fit.slope));
    const double mean_inf = first_moment_asymptotic(kRight, p);
    const double intercept_expected = -14.0 - mean_inf * mean_inf;
    o.require(std::abs(fit.intercept - intercept_expected) <= 0.5,
              "exact intercept = " + num(fit.intercept) + " vs " + num(intercept_expected));

    const auto& e = pi8_ensemble();
    auto mc_slope = [](const MomentSeries& s) {
        const auto [x, y] = window(s, 300, 500);
        return least_squares(x, y).slope;
    };
    const auto jk = jackknife(e.sums, e.groups, mc_slope);
    const double z = std::abs(jk.value - fit.slope) / jk.standard_error;
    o.require(z <= 3.0, "MC slope = " + num(jk.value) + " +- " + num(jk.standard_error) + " (z = " + num(z) + ")");
}

void unitary_growth(Outcome& o) {
    PureWalkState s(kRight);
    MomentEntry at200, at400;
    for (int t = 1; t <= 400; ++t) {
        s.unitary_step();
        if (t == 200) at200 = summarize(s.distribution(), t);
        if (t == 400) at400 = summarize(s.distribution(), t);
    }
    const double vr = at400.variance / at200.variance;
    const double mr = at400.mean / at200.mean;
    o.require(vr >= 3.8 && vr <= 4.2, "variance ratio = " + num(vr));
    o.require(std::abs(mr - 2.0) <= 0.2, "mean ratio = " + num(mr));
}

void triangulation(Outcome& o) {
    double worst = 0.0;
    for (double theta : kThetas) {
        const double p = ChannelStrength::from_theta(theta).p;
        const auto ch = dephasing_channel(theta);
        auto rho = initial_density(kRight);
        for (int t = 1; t <= 40; ++t) {
            rho = decoherent_step(rho, ch);
            const auto d = position_marginal(rho);
            worst = std::max({worst, std::abs(first_moment_exact(kRight, p, t) - moment(d, 1)),
                              std::abs(second_moment_exact(p, t) - moment(d, 2))});
        }
    }
    o.require(worst <= 1e-8, "bloch vs density max diff = " + num(worst));

    double worst0 = 0.0;
    PureWalkState s(kRight);
    for (int t = 1; t <= 40; ++t) {
        s.unitary_step();
        const auto d = s.distribution();
        worst0 = std::max({worst0, std::abs(first_moment_exact(kRight, 0.0, t) - moment(d, 1)),
                           std::abs(second_moment_exact(0.0, t) - moment(d, 2))});
    }
    o.require(worst0 <= 1e-10, "p=0 exact vs pure state max diff = " + num(worst0));
}

void channel_equivalence(Outcome& o) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> angle(0.0, pi / 4);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto s = ChannelStrength::from_theta(angle(gen));
        const CoinOperator rho = qwalk::testing::random_density(gen);
        const CoinOperator a = apply_channel(measurement_channel(s.p), rho);
        const CoinOperator b = apply_channel(dephasing_channel(s.theta), rho);
        const CoinOperator c = apply_channel(weak_measurement_channel(s.q), rho);
        worst = std::max({worst, qwalk::testing::max_abs(a - b), qwalk::testing::max_abs(a - c)});
    }
    o.require(worst <= 1e-12, "apply_channel max diff = " + num(worst));

    double worst_marginal = 0.0;
    for (double theta : kThetas) {
        const auto s = ChannelStrength::from_theta(theta);
        const auto a = position_marginal(evolve_density(kRight, measurement_channel(s.p), 30));
        const auto b = position_marginal(evolve_density(kRight, dephasing_channel(s.theta), 30));
        const auto c = position_marginal(evolve_density(kRight, weak_measurement_channel(s.q), 30));
        worst_marginal = std::max({worst_marginal, max_abs_difference(a, b), max_abs_difference(a, c)});
    }
    o.require(worst_marginal <= 1e-10, "t=30 marginal max diff = " + num(worst_marginal));
}

void small_cases(Outcome& o) {
    // |0,R> -> (|1,R> + |-1,L>)/sqrt2 -> (|2,R> + |0,R> + |0,L> - |-2,L>)/2
    // -> (|3,R> + |1,L> - |-1,R> + |-3,L>)/(2 sqrt2) + |1,R>/sqrt2
    const std::vector<std::vector<std::pair<int, double>>> expected{
        {{-1, 0.5}, {1, 0.5}},
        {{-2, 0.25}, {0, 0.5}, {2, 0.25}},
        {{-3, 0.125}, {-1, 0.125}, {1, 0.625}, {3, 0.125}},
    };
    PureWalkState s(kRight);
    double worst = 0.0;
    for (int t = 1; t <= 3; ++t) {
        s.unitary_step();
        const auto d = s.distribution();
        PositionDistribution want{-t, std::vector<double>(2 * t + 1, 0.0)};
        for (auto [x, p] : expected[t - 1]) want.probabilities[x + t] = p;
        worst = std::max(worst, max_abs_difference(d, want));
    }
    o.require(worst <= 1e-12, "t=1..3 max diff = " + num(worst));
}

void crossover(Outcome& o) {
    const double p = 0.01;
    const double slope_inf = asymptotic_variance_slope(p);
    auto variance = [&](int t) {
        const double m = first_moment_exact(kRight, p, t);
        return second_moment_exact(p, t) - m * m;
    };
    auto local_slope = [&](int t) { return 0.5 * (variance(t + 1) - variance(t - 1)); };
    const double early = local_slope(20);
    o.require(early > 3.0 * slope_inf, "slope(20) = " + num(early) + " vs 3 x " + num(slope_inf));
    const int late_t = static_cast<int>(std::lround(4.0 * crossover_time(p, 1e-3)));
    const double late = local_slope(late_t);
    o.require(std::abs(late / slope_inf - 1.0) <= 0.05,
              "slope(" + std::to_string(late_t) + ") = " + num(late) + " vs " + num(slope_inf));
}

void initial_state_independence(Outcome& o) {
    std::mt19937_64 gen(9);
    const auto ch = dephasing_channel(pi / 8);
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < 20; ++i) {
        const double x2 = moment(position_marginal(evolve_density(qwalk::testing::random_coin(gen), ch, 30)), 2);
        lo = std::min(lo, x2);
        hi = std::max(hi, x2);
    }
    o.require(hi - lo <= 1e-8, "<x^2>_30 spread = " + num(hi - lo) + " around " + num(lo));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism(Outcome& o) {
    const fs::path dir = fs::temp_directory_path() / "qwalk_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto launch = [&](const std::string& stem, const std::string& extra) {
        const std::string cmd = std::string(QWALK_CLI_PATH) +
                                " trajectory --theta 0.39269908169872414 --steps 120 --runs 2000 --seed 31337 --out " +
                                (dir / stem).string() + " " + extra + " > " + (dir / (stem + ".log")).string() + " 2>&1";
        return std::system(cmd.c_str());
    };
    o.require(launch("a", "") == 0, "first run");
    o.require(launch("b", "") == 0, "second run");
    o.require(launch("c", "--workers 1") == 0, "1 worker");
    o.require(launch("d", "--workers 4") == 0, "4 workers");
    o.require(launch("e", "--format json --workers 3") == 0, "json run");
    o.require(launch("f", "--format json --workers 1") == 0, "json run 1 worker");
    int identical = 0, compared = 0;
    for (const char* suffix : {".distribution.csv", ".moments.csv", ".meta.json"}) {
        const std::string ref = slurp(dir / (std::string("a") + suffix));
        for (const char* other : {"b", "c", "d"}) {
            ++compared;
            if (!ref.empty() && ref == slurp(dir / (std::string(other) + suffix))) ++identical;
        }
    }
    ++compared;
    if (slurp(dir / "e.json") == slurp(dir / "f.json") && !slurp(dir / "e.json").empty()) ++identical;
    o.require(identical == compared, std::to_string(identical) + "/" + std::to_string(compared) + " files identical");
}

struct Criterion {
    int id;
    std::string title;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    int only = 0;
    app.add_option("--only", only, "Run a single criterion (1-10)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "classical limit p=1, t=100", classical_limit},
        {2, "asymptotic first moment theta=pi/8", asymptotic_mean},
        {3, "linear variance growth theta=pi/8", linear_variance},
        {4, "unitary quadratic spreading and linear drift", unitary_growth},
        {5, "Bloch / density / pure-state triangulation", triangulation},
        {6, "channel equivalence across parameterizations", channel_equivalence},
        {7, "hand-tracked small cases", small_cases},
        {8, "crossover from quadratic to linear growth p=0.01", crossover},
        {9, "second moment independent of the initial coin", initial_state_independence},
        {10, "trajectory output determinism", determinism},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " | " << o.detail.str()
                  << " | " << num(secs) << " s" << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
