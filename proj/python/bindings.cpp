#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qwalk/bloch.hpp"
#include "qwalk/density.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/io.hpp"
#include "qwalk/stats.hpp"
#include "qwalk/walk.hpp"

namespace py = pybind11;
using namespace qwalk;

namespace {

using Coin = std::pair<cdouble, cdouble>;

CoinState to_coin(const Coin& c) { return CoinState::make(c.first, c.second); }

py::dict series_dict(const MomentSeries& series) {
    std::vector<int> t;
    std::vector<double> mean, variance, se_mean, se_var;
    bool errors = !series.empty() && series.back().stderr_mean.has_value();
    for (const auto& e : series) {
        t.push_back(e.t);
        mean.push_back(e.mean);
        variance.push_back(e.variance);
        if (errors) {
            se_mean.push_back(e.stderr_mean.value_or(std::nan("")));
            se_var.push_back(e.stderr_variance.value_or(std::nan("")));
        }
    }
    py::dict d;
    d["t"] = py::array(py::cast(t));
    d["mean"] = py::array(py::cast(mean));
    d["variance"] = py::array(py::cast(variance));
    if (errors) {
        d["stderr_mean"] = py::array(py::cast(se_mean));
        d["stderr_variance"] = py::array(py::cast(se_var));
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_qwalk, m) {
    m.doc() = "Discrete-time Hadamard walk with a decoherent coin";
    m.attr("__version__") = std::string(version());

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

    py::enum_<ChannelModel>(m, "ChannelModel")
        .value("MEASUREMENT", ChannelModel::Measurement)
        .value("DEPHASING", ChannelModel::Dephasing)
        .value("WEAK_MEASUREMENT", ChannelModel::WeakMeasurement);

    py::class_<ChannelStrength>(m, "ChannelStrength")
        .def_readonly("p", &ChannelStrength::p)
        .def_readonly("theta", &ChannelStrength::theta)
        .def_readonly("q", &ChannelStrength::q)
        .def("__repr__", [](const ChannelStrength& s) {
            return "ChannelStrength(p=" + format_double(s.p) + ", theta=" + format_double(s.theta) +
                   ", q=" + format_double(s.q) + ")";
        });

    py::class_<KrausChannel>(m, "KrausChannel")
        .def_property_readonly("operators", &KrausChannel::operators)
        .def_property_readonly("model", &KrausChannel::model)
        .def_property_readonly("strength", &KrausChannel::strength)
        .def_property_readonly("p", &KrausChannel::p)
        .def("completeness_defect", &KrausChannel::completeness_defect)
        .def("apply", [](const KrausChannel& ch, const CoinOperator& chi) { return apply_channel(ch, chi); });

    m.def("measurement_channel", &measurement_channel, py::arg("p"));
    m.def("dephasing_channel", &dephasing_channel, py::arg("theta"));
    m.def("weak_measurement_channel", &weak_measurement_channel, py::arg("q"));
    m.def("equivalent_parameters", &equivalent_parameters, py::arg("value"), py::arg("model"));
    m.def("apply_channel", &apply_channel, py::arg("channel"), py::arg("chi"));

    py::class_<PositionDistribution>(m, "PositionDistribution")
        .def(py::init([](int offset, std::vector<double> p) { return PositionDistribution{offset, std::move(p)}; }),
             py::arg("offset"), py::arg("probabilities"))
        .def_readonly("offset", &PositionDistribution::offset)
        .def_property_readonly("probabilities",
                               [](const PositionDistribution& d) { return py::array(py::cast(d.probabilities)); })
        .def_property_readonly("positions",
                               [](const PositionDistribution& d) {
                                   std::vector<int> x(d.probabilities.size());
                                   for (std::size_t i = 0; i < x.size(); ++i) x[i] = d.offset + static_cast<int>(i);
                                   return py::array(py::cast(x));
                               })
        .def("at", &PositionDistribution::at)
        .def("total", &PositionDistribution::total)
        .def("mean", [](const PositionDistribution& d) { return moment(d, 1); })
        .def("variance", [](const PositionDistribution& d) { return summarize(d).variance; });

    m.def("evolve_unitary", [](int steps, const Coin& coin) { return evolve_unitary(to_coin(coin), steps).distribution(); },
          py::arg("steps"), py::arg("coin") = Coin{1.0, 0.0});

    m.def(
        "evolve_density",
        [](const KrausChannel& ch, int steps, const Coin& coin, int limit) {
            py::gil_scoped_release release;
            return position_marginal(evolve_density(to_coin(coin), ch, steps, limit));
        },
        py::arg("channel"), py::arg("steps"), py::arg("coin") = Coin{1.0, 0.0},
        py::arg("oracle_limit") = kDefaultOracleLimit);

    m.def(
        "run_ensemble",
        [](const KrausChannel& ch, int steps, std::uint64_t runs, std::uint64_t seed, const Coin& coin,
           unsigned workers) {
            EnsembleResult e;
            {
                py::gil_scoped_release release;
                e = run_ensemble(to_coin(coin), ch, steps, runs, seed, {workers, 20});
            }
            py::dict d;
            d["distribution"] = e.mean_distribution;
            d["distribution_stderr"] = py::array(py::cast(e.distribution_stderr));
            d["moments"] = series_dict(e.moments);
            d["runs"] = e.runs;
            d["seed"] = e.master_seed;
            return d;
        },
        py::arg("channel"), py::arg("steps"), py::arg("runs"), py::arg("seed"), py::arg("coin") = Coin{1.0, 0.0},
        py::arg("workers") = 0);

    m.def(
        "first_moment_exact",
        [](double p, int t, const Coin& coin) { return first_moment_exact(to_coin(coin), p, t); }, py::arg("p"),
        py::arg("t"), py::arg("coin") = Coin{1.0, 0.0});
    m.def(
        "second_moment_exact", [](double p, int t) { return second_moment_exact(p, t); }, py::arg("p"), py::arg("t"));
    m.def(
        "moment_series",
        [](double p, int t_max, const Coin& coin) { return series_dict(moment_series(to_coin(coin), p, t_max)); },
        py::arg("p"), py::arg("t_max"), py::arg("coin") = Coin{1.0, 0.0});
    m.def(
        "first_moment_asymptotic", [](double p, const Coin& coin) { return first_moment_asymptotic(to_coin(coin), p); },
        py::arg("p"), py::arg("coin") = Coin{1.0, 0.0});
    m.def("second_moment_asymptotic", &second_moment_asymptotic, py::arg("p"), py::arg("t"));
    m.def("asymptotic_variance_slope", &asymptotic_variance_slope, py::arg("p"));
    m.def("crossover_time", &crossover_time, py::arg("p"), py::arg("epsilon") = 1e-3);

    m.def("classical_binomial", &classical_binomial, py::arg("t"));
    m.def("total_variation", &total_variation, py::arg("a"), py::arg("b"));
}
