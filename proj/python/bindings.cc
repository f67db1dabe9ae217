// Copyright 2026 The stochres Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stochres/capacity.h"
#include "stochres/experiments.h"
#include "stochres/fat_shattering.h"
#include "stochres/quantum_embed.h"
#include "stochres/readout.h"
#include "stochres/reservoir_io.h"
#include "stochres/runner.h"

namespace py = pybind11;
using namespace stochres;

namespace {

py::object to_py(const nlohmann::json &doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

nlohmann::json from_py(const py::object &obj) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

SignalMatrix exact_signals(const Eigen::MatrixXd &probs, const std::optional<Eigen::VectorXd> &weights) {
    SignalMatrix s;
    s.data = probs;
    s.mode = SignalMode::kExactProbability;
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
        s.labels.push_back(static_cast<std::uint64_t>(k));
    }
    int n = 0;
    while ((Eigen::Index{1} << n) < probs.cols()) {
        ++n;
    }
    s.n = n;
    if (weights) {
        s.row_weights = *weights;
    }
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic bit reservoirs: capacities, eigentasks and experiment runners.";
    m.attr("__version__") = tool_version();

    static py::handle error_type = py::exception<Error>(m, "StochresError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error &e) {
            py::object exc = error_type(e.what());
            exc.attr("kind") = std::string(error_kind_name(e.kind()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    m.def(
        "run_exact",
        [](const py::object &spec, const std::vector<double> &drive, std::size_t washout) {
            Reservoir res = build_reservoir(reservoir_spec_from_json(from_py(spec)));
            auto dists = res.run_exact(InputSequence::scalar(drive, washout));
            return probability_signals(dists).data;
        },
        py::arg("spec"), py::arg("drive"), py::arg("washout") = 0,
        "Exact bitstring distributions after washout, one row per step.");

    m.def(
        "moments_from_probabilities",
        [](const std::vector<double> &p, int n) { return moments_from_probabilities(p, n); }, py::arg("probs"),
        py::arg("n"));
    m.def(
        "probabilities_from_moments",
        [](const std::vector<double> &mo, int n) { return probabilities_from_moments(mo, n); }, py::arg("moments"),
        py::arg("n"));

    m.def(
        "gram_matrices",
        [](const Eigen::MatrixXd &probs, std::optional<Eigen::VectorXd> weights) {
            auto g = gram_matrices(exact_signals(probs, weights));
            return py::make_tuple(g.g1, g.g2);
        },
        py::arg("probs"), py::arg("weights") = py::none());

    m.def(
        "eigentask_decomposition",
        [](const Eigen::MatrixXd &g1, const Eigen::MatrixXd &g2, double tol) {
            auto d = eigentask_decomposition(g1, g2, tol);
            py::dict out = to_py(to_json(d));
            out["eigentasks"] = d.eigentasks;
            out["task_readouts"] = d.task_readouts;
            return out;
        },
        py::arg("g1"), py::arg("g2"), py::arg("rank_tolerance") = kDefaultRankTolerance);

    m.def(
        "ipc",
        [](const Eigen::MatrixXd &probs, std::optional<Eigen::VectorXd> weights) {
            SignalMatrix s = exact_signals(probs, weights);
            auto g = gram_matrices(s);
            auto d = eigentask_decomposition(g.g1, g.g2);
            py::dict out;
            out["spectral"] = ipc_spectral(d).value;
            out["probability_trace"] = ipc_probability_rep(s).value;
            out["sigma_sq"] = d.sigma_sq;
            out["retained_rank"] = d.retained_rank;
            return out;
        },
        py::arg("probs"), py::arg("weights") = py::none(),
        "IPC of exact-probability signals by the spectral and probability-trace formulas.");

    m.def(
        "capacity",
        [](const Eigen::MatrixXd &signals, const std::vector<double> &target) {
            SignalMatrix s;
            s.data = signals;
            s.mode = SignalMode::kGeneric;
            for (Eigen::Index k = 0; k < signals.cols(); ++k) {
                s.labels.push_back(static_cast<std::uint64_t>(k));
            }
            return capacity(s, target).capacity;
        },
        py::arg("signals"), py::arg("target"));

    m.def("noisy_shift_register_ipc", &noisy_shift_register_ipc, py::arg("n"), py::arg("noise"));

    m.def(
        "switching_family",
        [](const std::string &kind, std::size_t k, double lo, double hi, double sharpness, std::size_t grid_points) {
            TailKind tk = kind == "polynomial" ? TailKind::kPolynomial : TailKind::kExponential;
            if (kind != "polynomial" && kind != "exponential") {
                throw Error(ErrorKind::kInvalidArgument, "kind must be exponential or polynomial");
            }
            auto fam = switching_family(tk, k, lo, hi, sharpness, grid_points);
            py::dict out = to_py(to_json(fam));
            out["grid"] = fam.grid;
            out["signals"] = fam.signals;
            return out;
        },
        py::arg("kind"), py::arg("k"), py::arg("lo"), py::arg("hi"), py::arg("sharpness"),
        py::arg("grid_points") = 1001);

    m.def(
        "classify_tails",
        [](const std::vector<double> &grid, const std::vector<double> &values) {
            return to_py(to_json(classify_tails(grid, values)));
        },
        py::arg("grid"), py::arg("values"));

    m.def(
        "sample_complexity_curve",
        [](double q, const std::vector<std::size_t> &m0, std::size_t trials, std::uint64_t seed) {
            return to_py(to_json(sample_complexity_curve(q, m0, trials, seed)));
        },
        py::arg("q"), py::arg("m0"), py::arg("trials"), py::arg("seed") = 1);
    m.def("detection_sample_size", &detection_sample_size, py::arg("q"));

    m.def(
        "fat_shattering_lower_bound",
        [](const FunctionTable &values, double gamma, std::optional<std::vector<double>> thresholds) {
            ShatterOptions o;
            o.thresholds = std::move(thresholds);
            auto r = fat_shattering_lower_bound(values, gamma, o);
            return py::make_tuple(r.dimension, to_py(to_json(r.witness)));
        },
        py::arg("values"), py::arg("gamma"), py::arg("thresholds") = py::none());

    m.def(
        "bernoulli_channel",
        [](double p, const Eigen::MatrixXcd &rho) { return bernoulli_channel(p, DensityMatrix{rho}).output.rho; },
        py::arg("p"), py::arg("rho"));
    m.def(
        "rotation_pair",
        [](double p) {
            auto pair = rotation_pair(p);
            return py::make_tuple(Eigen::MatrixXcd(pair.u1), Eigen::MatrixXcd(pair.u2));
        },
        py::arg("p"));
    m.def(
        "correlated_flip_check",
        [](double theta, int qubits, int first, int second) {
            return to_py(to_json(correlated_flip_check(qubits, first, second, theta)));
        },
        py::arg("theta"), py::arg("qubits") = 2, py::arg("first") = 0, py::arg("second") = 1);

    m.def(
        "run_experiment",
        [](const py::object &config) { return to_py(run_experiment(RunConfig::from_json(from_py(config))).to_json()); },
        py::arg("config"), "Run one experiment from a config dict and return its manifest.");
}
