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

#include "stochres/reservoir_io.h"

#include <algorithm>
#include <bit>
#include <fstream>

#include "stochres/errors.h"

namespace stochres {

using nlohmann::json;

namespace json_util {

void reject_unknown_keys(const json &obj, std::initializer_list<std::string_view> allowed, std::string_view context) {
    if (!obj.is_object()) {
        throw Error(ErrorKind::kConfigValidation, std::string(context) + " must be a JSON object");
    }
    for (const auto &item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw Error(ErrorKind::kConfigValidation,
                        "unknown key \"" + item.key() + "\" in " + std::string(context));
        }
    }
}

}  // namespace json_util

namespace {

struct KindName {
    StochasticGate::Kind kind;
    const char *name;
};

constexpr KindName kKernelKinds[] = {
    {StochasticGate::Kind::kIdentity, "identity"},
    {StochasticGate::Kind::kFlip, "flip"},
    {StochasticGate::Kind::kReset, "reset"},
    {StochasticGate::Kind::kLeakyReset, "leaky_reset"},
    {StochasticGate::Kind::kCopy, "copy"},
    {StochasticGate::Kind::kXor, "xor"},
    {StochasticGate::Kind::kCorrelatedFlip, "correlated_flip"},
    {StochasticGate::Kind::kDense, "dense"},
};

const char *kernel_name(StochasticGate::Kind kind) {
    for (const auto &k : kKernelKinds) {
        if (k.kind == kind) {
            return k.name;
        }
    }
    return "identity";
}

StochasticGate::Kind kernel_from_name(const std::string &name) {
    for (const auto &k : kKernelKinds) {
        if (name == k.name) {
            return k.kind;
        }
    }
    throw Error(ErrorKind::kConfigValidation, "unknown kernel_kind \"" + name + "\"");
}

json drive_to_json(const DriveFunction &f) {
    const char *kind = f.kind == DriveFunction::Kind::kConstant     ? "constant"
                       : f.kind == DriveFunction::Kind::kPolynomial ? "polynomial"
                                                                    : "logistic";
    return json{{"kind", kind}, {"coeffs", f.coeffs}};
}

DriveFunction drive_from_json(const json &j) {
    if (j.is_number()) {
        return DriveFunction::constant(j.get<double>());
    }
    json_util::reject_unknown_keys(j, {"kind", "coeffs"}, "probability");
    std::string kind = j.at("kind").get<std::string>();
    auto coeffs = j.at("coeffs").get<std::vector<double>>();
    if (kind == "constant") {
        return DriveFunction{DriveFunction::Kind::kConstant, coeffs};
    }
    if (kind == "polynomial") {
        return DriveFunction::polynomial(coeffs);
    }
    if (kind == "logistic") {
        if (coeffs.size() != 2) {
            throw Error(ErrorKind::kConfigValidation, "logistic drive needs {scale, offset}");
        }
        return DriveFunction::logistic(coeffs[0], coeffs[1]);
    }
    throw Error(ErrorKind::kConfigValidation, "unknown drive kind \"" + kind + "\"");
}

}  // namespace

json reservoir_spec_to_json(const ReservoirSpec &spec) {
    json gates = json::array();
    for (const auto &g : spec.gates) {
        json params = json::object();
        switch (g.kind) {
            case StochasticGate::Kind::kFlip:
            case StochasticGate::Kind::kReset:
            case StochasticGate::Kind::kCorrelatedFlip:
                params["probability"] = drive_to_json(g.probability);
                break;
            case StochasticGate::Kind::kLeakyReset:
                params["probability"] = drive_to_json(g.probability);
                params["retain"] = g.retain;
                break;
            case StochasticGate::Kind::kDense:
                params["matrix"] = g.matrix;
                break;
            default:
                break;
        }
        if (g.derivative_bound) {
            params["derivative_bound"] = *g.derivative_bound;
        }
        gates.push_back(json{{"support", g.support}, {"kernel_kind", kernel_name(g.kind)}, {"params", params}});
    }
    json doc{{"n", spec.n},
             {"k_max", spec.k_max},
             {"depth_bound", spec.effective_depth_bound()},
             {"gates", gates},
             {"drive_bound_poly", spec.drive_bound_poly},
             {"derivative_bound_poly", spec.derivative_bound_poly}};
    if (spec.initial_distribution) {
        auto p = spec.initial_distribution->probs();
        doc["initial_state"] = std::vector<double>(p.begin(), p.end());
    } else {
        doc["initial_state"] = spec.initial_bitstring;
    }
    return doc;
}

ReservoirSpec reservoir_spec_from_json(const json &doc) {
    json_util::reject_unknown_keys(
        doc, {"n", "k_max", "depth_bound", "gates", "initial_state", "drive_bound_poly", "derivative_bound_poly"},
        "reservoir");
    ReservoirSpec spec;
    try {
        spec.n = doc.at("n").get<int>();
        spec.k_max = doc.value("k_max", 2);
        spec.depth_bound = doc.value("depth_bound", 0);
        if (doc.contains("drive_bound_poly")) {
            spec.drive_bound_poly = doc.at("drive_bound_poly").get<std::vector<double>>();
        }
        if (doc.contains("derivative_bound_poly")) {
            spec.derivative_bound_poly = doc.at("derivative_bound_poly").get<std::vector<double>>();
        }
        for (const auto &gj : doc.at("gates")) {
            json_util::reject_unknown_keys(gj, {"support", "kernel_kind", "params"}, "gate");
            StochasticGate g;
            g.kind = kernel_from_name(gj.at("kernel_kind").get<std::string>());
            g.support = gj.at("support").get<std::vector<int>>();
            json params = gj.value("params", json::object());
            json_util::reject_unknown_keys(params, {"probability", "retain", "matrix", "derivative_bound"},
                                           "gate params");
            if (params.contains("probability")) {
                g.probability = drive_from_json(params.at("probability"));
            }
            g.retain = params.value("retain", 0.0);
            if (params.contains("matrix")) {
                g.matrix = params.at("matrix").get<std::vector<double>>();
            }
            if (params.contains("derivative_bound")) {
                g.derivative_bound = params.at("derivative_bound").get<double>();
            }
            spec.gates.push_back(std::move(g));
        }
        if (doc.contains("initial_state")) {
            const json &init = doc.at("initial_state");
            if (init.is_array()) {
                spec.initial_distribution = BitstringDistribution(spec.n, init.get<std::vector<double>>());
            } else {
                spec.initial_bitstring = init.get<std::uint64_t>();
            }
        }
    } catch (const json::exception &e) {
        throw Error(ErrorKind::kConfigValidation, std::string("malformed reservoir JSON: ") + e.what());
    }
    return spec;
}

std::pair<std::filesystem::path, std::filesystem::path> write_ensemble(const TrajectoryEnsemble &ens,
                                                                       const std::filesystem::path &prefix) {
    static_assert(std::endian::native == std::endian::little, "binary ensemble format is little-endian");
    std::filesystem::path bin = prefix;
    bin += ".bin";
    std::filesystem::path side = prefix;
    side += ".json";
    {
        std::ofstream out(bin, std::ios::binary);
        out.write(reinterpret_cast<const char *>(ens.samples.data()),
                  static_cast<std::streamsize>(ens.samples.size() * sizeof(std::uint64_t)));
        if (!out) {
            throw Error(ErrorKind::kIOFailure, "cannot write " + bin.string());
        }
    }
    {
        std::ofstream out(side);
        json meta{{"n", ens.n},
                  {"S", ens.shots},
                  {"T", ens.steps},
                  {"seed", ens.seed_root},
                  {"washout", ens.washout},
                  {"dtype", "uint64le"},
                  {"layout", "row-major shots x steps"}};
        out << meta.dump(2) << "\n";
        if (!out) {
            throw Error(ErrorKind::kIOFailure, "cannot write " + side.string());
        }
    }
    return {bin, side};
}

TrajectoryEnsemble read_ensemble(const std::filesystem::path &prefix) {
    std::filesystem::path bin = prefix;
    bin += ".bin";
    std::filesystem::path side = prefix;
    side += ".json";
    std::ifstream meta_in(side);
    if (!meta_in) {
        throw Error(ErrorKind::kIOFailure, "cannot read " + side.string());
    }
    json meta = json::parse(meta_in, nullptr, false);
    if (meta.is_discarded()) {
        throw Error(ErrorKind::kIOFailure, "malformed sidecar " + side.string());
    }
    TrajectoryEnsemble ens;
    ens.n = meta.at("n").get<int>();
    ens.shots = meta.at("S").get<std::size_t>();
    ens.steps = meta.at("T").get<std::size_t>();
    ens.seed_root = meta.at("seed").get<std::uint64_t>();
    ens.washout = meta.value("washout", std::size_t{0});
    ens.samples.resize(ens.shots * ens.steps);
    std::ifstream in(bin, std::ios::binary);
    in.read(reinterpret_cast<char *>(ens.samples.data()),
            static_cast<std::streamsize>(ens.samples.size() * sizeof(std::uint64_t)));
    if (!in || in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorKind::kIOFailure, "binary size does not match sidecar for " + bin.string());
    }
    return ens;
}

}  // namespace stochres
