#include "qwalk/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <tuple>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwalk/bloch.hpp"
#include "qwalk/density.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/io.hpp"
#include "qwalk/stats.hpp"
#include "qwalk/walk.hpp"

namespace qwalk::cli {

namespace {

// Tolerances of the cross-validation report.
constexpr double kExactTolerance = 1e-8;     // Bloch formulas vs density oracle
constexpr double kIdentityTolerance = 1e-10; // identity-channel and binomial comparisons
constexpr double kMaxZScore = 4.0;           // Monte Carlo moments vs exact, per t
constexpr double kTvFactor = 3.0;            // Monte Carlo TV vs expected sampling TV

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || end != cell.c_str() + cell.size()) {
            throw UsageError(std::string(flag) + ": cannot parse '" + cell + "' as a number");
        }
        values.push_back(v);
    }
    if (values.empty()) throw UsageError(std::string(flag) + " needs a value");
    return values;
}

CoinState parse_coin(const std::string& text) {
    const auto v = parse_list(text, "--coin");
    if (v.size() != 4) throw UsageError("--coin expects re_a,im_a,re_b,im_b");
    return CoinState::make({v[0], v[1]}, {v[2], v[3]});
}

void write_error(std::ostream& err, std::string_view kind, const std::string& message) {
    err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

KrausChannel channel_of(const RunConfig& c, double strength) { return make_channel(*c.model, strength); }

RunMetadata metadata(const RunConfig& c, const std::string& method, std::optional<double> strength) {
    RunMetadata m;
    m.method = method;
    if (c.model && strength) {
        m.channel = c.model;
        m.strength = equivalent_parameters(*strength, *c.model);
    }
    m.coin = c.coin;
    m.steps = c.steps;
    m.seed = c.seed;
    return m;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix) {
    return std::filesystem::path(stem.string() + suffix);
}

void emit(const RunConfig& c, const RunMetadata& meta, const std::optional<PositionDistribution>& dist,
          const std::optional<MomentSeries>& series, nlohmann::json extra_data, std::ostream& out) {
    if (c.format == OutputFormat::Json) {
        nlohmann::json data = std::move(extra_data);
        if (dist) data["distribution"] = to_json(*dist);
        if (series) data["moments"] = to_json(*series);
        const auto path = with_suffix(c.out, ".json");
        write_json(path, meta, data);
        out << "wrote " << path.string() << '\n';
        return;
    }
    if (dist) {
        const auto path = with_suffix(c.out, ".distribution.csv");
        write_distribution_csv(path, *dist);
        out << "wrote " << path.string() << '\n';
    }
    if (series) {
        const auto path = with_suffix(c.out, ".moments.csv");
        write_moments_csv(path, *series);
        out << "wrote " << path.string() << '\n';
    }
    const auto meta_path = with_suffix(c.out, ".meta.json");
    write_text(meta_path, to_json(meta).dump(2) + "\n");
    out << "wrote " << meta_path.string() << '\n';
}

struct DensityRun {
    PositionDistribution marginal;
    MomentSeries series;  // t = 0..steps
};

DensityRun density_run(const CoinState& coin, const KrausChannel& channel, int steps, int limit) {
    if (steps > limit) (void)evolve_density(coin, channel, steps, limit);  // throws ResourceError
    DensityRun r;
    LatticeDensityMatrix rho = initial_density(coin);
    r.series.push_back(summarize(position_marginal(rho), 0));
    for (int t = 1; t <= steps; ++t) {
        rho = decoherent_step(rho, channel);
        r.series.push_back(summarize(position_marginal(rho), t));
    }
    r.marginal = position_marginal(rho);
    return r;
}

std::pair<PositionDistribution, MomentSeries> unitary_run(const CoinState& coin, int steps) {
    PureWalkState s = initial_state(coin);
    MomentSeries series{summarize(s.distribution(), 0)};
    for (int t = 1; t <= steps; ++t) {
        s.unitary_step();
        series.push_back(summarize(s.distribution(), t));
    }
    return {s.distribution(), series};
}

double expected_sampling_tv(const EnsembleResult& e) {
    double s = 0.0;
    for (double se : e.distribution_stderr) s += se;
    return 0.5 * std::sqrt(2.0 / std::numbers::pi) * s;
}

int cmd_unitary(const RunConfig& c, std::ostream& out) {
    auto [dist, series] = unitary_run(c.coin, c.steps);
    emit(c, metadata(c, "unitary", std::nullopt), dist, series, nlohmann::json::object(), out);
    return kOk;
}

int cmd_trajectory(const RunConfig& c, double strength, std::ostream& out) {
    const KrausChannel ch = channel_of(c, strength);
    const EnsembleResult e = run_ensemble(c.coin, ch, c.steps, c.runs, *c.seed, {c.workers, 20});
    RunMetadata meta = metadata(c, "trajectory", strength);
    meta.runs = c.runs;
    emit(c, meta, e.mean_distribution, e.moments, {{"distribution_stderr", e.distribution_stderr}}, out);
    return kOk;
}

int cmd_density(const RunConfig& c, double strength, std::ostream& out) {
    const KrausChannel ch = channel_of(c, strength);
    const DensityRun r = density_run(c.coin, ch, c.steps, c.oracle_limit);
    RunMetadata meta = metadata(c, "density", strength);
    meta.extra["oracle_limit"] = c.oracle_limit;
    emit(c, meta, r.marginal, r.series, nlohmann::json::object(), out);
    return kOk;
}

int cmd_moments(const RunConfig& c, double strength, std::ostream& out) {
    const double p = equivalent_parameters(strength, *c.model).p;
    if (c.asymptotic && p == 0.0) {
        throw DomainError("asymptotic moments are undefined at p = 0 (the unitary walk drifts linearly)");
    }
    const MomentOptions opts{c.quad_nodes};
    const MomentSeries series = moment_series(c.coin, p, std::max(c.steps, 1), opts);
    RunMetadata meta = metadata(c, "moments", strength);
    meta.extra["quadrature_nodes"] = c.quad_nodes.value_or(QuadratureGrid::for_steps(std::max(c.steps, 1)).size());

    nlohmann::json asym = nlohmann::json::object();
    if (c.asymptotic) {
        const double mean_inf = first_moment_asymptotic(c.coin, p);
        meta.extra["crossover_time"] = crossover_time(p, c.epsilon);
        meta.extra["epsilon"] = c.epsilon;
        meta.extra["asymptotic_slope"] = asymptotic_variance_slope(p);
        meta.extra["mean_asymptotic"] = mean_inf;
        std::string csv = "t,mean_asymptotic,second_moment_asymptotic,variance_asymptotic\n";
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& e : series) {
            const double x2 = second_moment_asymptotic(p, e.t);
            csv += std::to_string(e.t) + ',' + format_double(mean_inf) + ',' + format_double(x2) + ',' +
                   format_double(x2 - mean_inf * mean_inf) + '\n';
            rows.push_back({{"t", e.t}, {"mean_asymptotic", mean_inf}, {"second_moment_asymptotic", x2},
                            {"variance_asymptotic", x2 - mean_inf * mean_inf}});
        }
        if (c.format == OutputFormat::Csv) {
            const auto path = with_suffix(c.out, ".asymptotic.csv");
            write_text(path, csv);
            out << "wrote " << path.string() << '\n';
        } else {
            asym["asymptotic"] = std::move(rows);
        }
    }
    emit(c, meta, std::nullopt, series, std::move(asym), out);
    return kOk;
}

struct Check {
    std::string name;
    double value;
    double limit;
    bool pass() const { return value <= limit; }
};

int cmd_compare(const RunConfig& c, double strength, std::ostream& out) {
    const KrausChannel ch = channel_of(c, strength);
    const double p = ch.p();
    const int steps = c.steps;
    const DensityRun dens = density_run(c.coin, ch, steps, c.oracle_limit);
    std::vector<Check> checks;

    const auto nan = std::nan("");
    std::vector<double> mean_bloch(steps + 1, nan), var_bloch(steps + 1, nan);
    std::vector<double> mean_mc(steps + 1, nan), var_mc(steps + 1, nan), se_mean(steps + 1, nan), se_var(steps + 1, nan);
    mean_bloch[0] = var_bloch[0] = 0.0;

    if (p == 0.0) {
        const auto [udist, useries] = unitary_run(c.coin, steps);
        double moment_diff = 0.0;
        for (int t = 0; t <= steps; ++t) {
            moment_diff = std::max({moment_diff, std::abs(useries[t].mean - dens.series[t].mean),
                                    std::abs(useries[t].variance - dens.series[t].variance)});
            mean_mc[t] = useries[t].mean;
            var_mc[t] = useries[t].variance;
        }
        checks.push_back({"unitary_vs_density_distribution", max_abs_difference(udist, dens.marginal), kIdentityTolerance});
        checks.push_back({"unitary_vs_density_moments", moment_diff, kIdentityTolerance});
    } else {
        if (steps >= 1) {
            const MomentSeries bl = moment_series(c.coin, p, steps, MomentOptions{c.quad_nodes});
            double dm = 0.0, dv = 0.0;
            for (const auto& e : bl) {
                mean_bloch[e.t] = e.mean;
                var_bloch[e.t] = e.variance;
                dm = std::max(dm, std::abs(e.mean - dens.series[e.t].mean));
                dv = std::max(dv, std::abs(e.variance - dens.series[e.t].variance));
            }
            checks.push_back({"bloch_vs_density_mean", dm, kExactTolerance});
            checks.push_back({"bloch_vs_density_variance", dv, kExactTolerance});
        }
        const EnsembleResult e = run_ensemble(c.coin, ch, steps, c.runs, *c.seed, {c.workers, 20});
        double zm = 0.0, zv = 0.0;
        for (int t = 0; t <= steps; ++t) {
            const auto& m = e.moments[t];
            mean_mc[t] = m.mean;
            var_mc[t] = m.variance;
            se_mean[t] = m.stderr_mean.value_or(0.0);
            se_var[t] = m.stderr_variance.value_or(0.0);
            auto z = [](double a, double b, double se) {
                const double d = std::abs(a - b);
                if (se < 1e-12) return d <= 1e-9 ? 0.0 : INFINITY;
                return d / se;
            };
            zm = std::max(zm, z(m.mean, dens.series[t].mean, se_mean[t]));
            zv = std::max(zv, z(m.variance, dens.series[t].variance, se_var[t]));
        }
        checks.push_back({"trajectory_vs_density_mean_z", zm, kMaxZScore});
        checks.push_back({"trajectory_vs_density_variance_z", zv, kMaxZScore});
        const double tv_limit = kTvFactor * expected_sampling_tv(e) + 1e-12;
        checks.push_back({"trajectory_vs_density_tv", total_variation(e.mean_distribution, dens.marginal), tv_limit});
        if (p == 1.0) {
            const PositionDistribution bin = classical_binomial(steps);
            checks.push_back({"binomial_vs_density", max_abs_difference(bin, dens.marginal), kIdentityTolerance});
            checks.push_back({"binomial_vs_trajectory_tv", total_variation(e.mean_distribution, bin), tv_limit});
        }
    }

    std::string csv =
        "t,mean_density,mean_bloch,mean_trajectory,stderr_mean_trajectory,variance_density,variance_bloch,"
        "variance_trajectory,stderr_variance_trajectory\n";
    nlohmann::json table = nlohmann::json::array();
    for (int t = 0; t <= steps; ++t) {
        const auto& d = dens.series[t];
        csv += std::to_string(t);
        for (double v : {d.mean, mean_bloch[t], mean_mc[t], se_mean[t], d.variance, var_bloch[t], var_mc[t], se_var[t]})
            csv += ',' + format_double(v);
        csv += '\n';
        auto j = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
        table.push_back({{"t", t}, {"mean_density", d.mean}, {"mean_bloch", j(mean_bloch[t])},
                         {"mean_trajectory", j(mean_mc[t])}, {"stderr_mean_trajectory", j(se_mean[t])},
                         {"variance_density", d.variance}, {"variance_bloch", j(var_bloch[t])},
                         {"variance_trajectory", j(var_mc[t])}, {"stderr_variance_trajectory", j(se_var[t])}});
    }

    bool ok = true;
    nlohmann::json report = nlohmann::json::array();
    std::vector<std::string> failed;
    for (const auto& ck : checks) {
        report.push_back({{"name", ck.name}, {"value", ck.value}, {"limit", ck.limit}, {"pass", ck.pass()}});
        out << (ck.pass() ? "PASS " : "FAIL ") << ck.name << " value=" << format_double(ck.value)
            << " limit=" << format_double(ck.limit) << '\n';
        if (!ck.pass()) {
            ok = false;
            failed.push_back(ck.name);
        }
    }

    RunMetadata meta = metadata(c, "compare", strength);
    meta.runs = p == 0.0 ? 0 : c.runs;
    meta.extra["checks"] = report;
    meta.extra["pass"] = ok;
    if (c.format == OutputFormat::Json) {
        const auto path = with_suffix(c.out, ".json");
        write_json(path, meta, {{"table", table}});
        out << "wrote " << path.string() << '\n';
    } else {
        const auto path = with_suffix(c.out, ".compare.csv");
        write_text(path, csv);
        out << "wrote " << path.string() << '\n';
        const auto meta_path = with_suffix(c.out, ".meta.json");
        write_text(meta_path, to_json(meta).dump(2) + "\n");
        out << "wrote " << meta_path.string() << '\n';
    }
    if (!ok) {
        std::string names;
        for (const auto& f : failed) names += (names.empty() ? "" : ",") + f;
        throw CheckFailure("checks failed: " + names);
    }
    return kOk;
}

int dispatch(const RunConfig& c, const std::string& command, std::optional<double> strength, std::ostream& out) {
    if (command == "unitary") return cmd_unitary(c, out);
    if (command == "trajectory") return cmd_trajectory(c, *strength, out);
    if (command == "density") return cmd_density(c, *strength, out);
    if (command == "moments") return cmd_moments(c, *strength, out);
    if (command == "compare") return cmd_compare(c, *strength, out);
    throw UsageError("unknown command '" + command + "'");
}

int default_steps(const std::string& command) {
    if (command == "density") return kDefaultOracleLimit;
    if (command == "compare") return 40;
    return 500;
}

}  // namespace

std::filesystem::path default_output_stem(const std::string& command) {
    if (const char* dir = std::getenv("QWALK_OUTPUT_DIR"); dir && *dir) return std::filesystem::path(dir) / command;
    return std::filesystem::path(command);
}

int execute(const RunConfig& config, std::ostream& out) {
    RunConfig c = config;
    const std::string& effective = c.command == "sweep" ? c.sweep_command : c.command;
    if (!c.seed && (effective == "trajectory" || effective == "compare")) {
        std::random_device rd;
        c.seed = (std::uint64_t{rd()} << 32) | rd();
    }
    if (c.command != "sweep") {
        const std::optional<double> s = c.strengths.empty() ? std::nullopt : std::optional(c.strengths.front());
        return dispatch(c, c.command, s, out);
    }
    for (std::size_t i = 0; i < c.strengths.size(); ++i) {
        RunConfig one = c;
        one.out = c.out.string() + "_" + std::to_string(i);
        out << "sweep " << i << ": " << to_string(*c.model) << " = " << format_double(c.strengths[i]) << '\n';
        dispatch(one, c.sweep_command, c.strengths[i], out);
    }
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete-time quantum walk on the line with a decoherent coin"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    struct Raw {
        std::string p, theta, q, coin, out, format = "csv", sweep_command;
        int steps = 0;
        std::uint64_t runs = 10000, seed = 0;
        int quad_nodes = 0, oracle_limit = kDefaultOracleLimit;
        unsigned workers = 0;
        bool asymptotic = false;
        double epsilon = 1e-3;
    } raw;
    struct Opts {
        CLI::Option *p = nullptr, *theta = nullptr, *q = nullptr, *steps = nullptr, *seed = nullptr,
                    *quad = nullptr, *coin = nullptr, *out = nullptr, *runs = nullptr;
    };
    std::map<std::string, Opts> opts;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"unitary", "Unitary Hadamard walk: distribution at t and moments 0..t"},
        {"trajectory", "Quantum-trajectory Monte Carlo ensemble with a decoherent coin"},
        {"density", "Exact density-operator evolution on the truncated lattice"},
        {"moments", "Exact (and optionally asymptotic) moments from the Bloch transfer matrices"},
        {"compare", "Cross-validate trajectory, density and Bloch results"},
        {"sweep", "Repeat a command over a comma-separated strength list"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        Opts& o = opts[name];
        o.steps = sub->add_option("--steps", raw.steps, "Number of walk steps")->check(CLI::NonNegativeNumber);
        o.coin = sub->add_option("--coin", raw.coin, "Initial coin re_a,im_a,re_b,im_b (default |R>)");
        o.out = sub->add_option("--out", raw.out, "Output path stem (default $QWALK_OUTPUT_DIR/<command>)");
        sub->add_option("--format", raw.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        if (name == "unitary") continue;
        o.p = sub->add_option("--p", raw.p, "Measurement probability p in [0, 1]");
        o.theta = sub->add_option("--theta", raw.theta, "Dephasing angle theta in [0, pi/4] (radians)");
        o.q = sub->add_option("--q", raw.q, "Weak-measurement bias q in [1/2, 1]");
        o.runs = sub->add_option("--runs", raw.runs, "Monte Carlo trajectories")->check(CLI::PositiveNumber);
        o.seed = sub->add_option("--seed", raw.seed, "Master seed (chosen and recorded if omitted)");
        o.quad = sub->add_option("--quad-nodes", raw.quad_nodes, "Quadrature node count override");
        sub->add_option("--oracle-limit", raw.oracle_limit, "Largest step count for the density oracle");
        sub->add_option("--workers", raw.workers, "Worker threads for the ensemble (0 = all cores)");
        sub->add_flag("--asymptotic", raw.asymptotic, "Also write the long-time formulas (moments)");
        sub->add_option("--epsilon", raw.epsilon, "Tolerance defining the crossover time");
        if (name == "sweep") {
            sub->add_option("--command", raw.sweep_command, "Command to repeat")
                ->required()
                ->check(CLI::IsMember({"trajectory", "density", "moments", "compare"}));
        }
    }

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            out << app.help();
            return kOk;
        } catch (const CLI::CallForVersion&) {
            out << version() << '\n';
            return kOk;
        } catch (const CLI::ParseError& e) {
            std::ostringstream help;
            help << app.help();
            write_error(err, "usage", e.what());
            err << help.str();
            return kUsage;
        }

        RunConfig c;
        c.command = app.get_subcommands().front()->get_name();
        const Opts& o = opts[c.command];
        c.steps = o.steps->count() ? raw.steps : default_steps(c.command == "sweep" ? raw.sweep_command : c.command);
        c.runs = raw.runs;
        if (o.coin->count()) c.coin = parse_coin(raw.coin);
        if (o.seed && o.seed->count()) c.seed = raw.seed;
        c.out = o.out->count() ? std::filesystem::path(raw.out) : default_output_stem(c.command);
        c.format = raw.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
        if (o.quad && o.quad->count()) c.quad_nodes = raw.quad_nodes;
        c.oracle_limit = raw.oracle_limit;
        c.workers = raw.workers;
        c.asymptotic = raw.asymptotic;
        c.epsilon = raw.epsilon;
        c.sweep_command = raw.sweep_command;

        if (c.command != "unitary") {
            int given = 0;
            for (auto [opt, model, text] : {std::tuple{o.p, ChannelModel::Measurement, &raw.p},
                                            std::tuple{o.theta, ChannelModel::Dephasing, &raw.theta},
                                            std::tuple{o.q, ChannelModel::WeakMeasurement, &raw.q}}) {
                if (!opt->count()) continue;
                ++given;
                c.model = model;
                c.strengths = parse_list(*text, opt->get_name().c_str());
            }
            if (given != 1) throw UsageError("exactly one of --p, --theta, --q is required");
            if (c.command != "sweep" && c.strengths.size() != 1) {
                throw UsageError("a list of strengths is only accepted by 'sweep'");
            }
            for (double s : c.strengths) (void)equivalent_parameters(s, *c.model);
        }
        return execute(c, out);
    } catch (const UsageError& e) {
        write_error(err, "usage", e.what());
        return kUsage;
    } catch (const ResourceError& e) {
        write_error(err, "resource", e.what());
        return kResource;
    } catch (const DomainError& e) {
        write_error(err, "domain", e.what());
        return kDomain;
    } catch (const IoError& e) {
        write_error(err, "io", e.what());
        return kIo;
    } catch (const CheckFailure& e) {
        write_error(err, "check_failed", e.what());
        return kCheckFailed;
    } catch (const std::exception& e) {
        write_error(err, "internal", e.what());
        return kInternal;
    }
}

}  // namespace qwalk::cli
