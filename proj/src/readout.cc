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

#include "stochres/readout.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include "json.hpp"
#include "stochres/csv.h"
#include "stochres/errors.h"

namespace stochres {

const char *signal_mode_name(SignalMode mode) {
    switch (mode) {
        case SignalMode::kExactProbability:
            return "exact-probability";
        case SignalMode::kEmpiricalFrequency:
            return "empirical-frequency";
        case SignalMode::kMoment:
            return "moment";
        case SignalMode::kGeneric:
            return "generic";
    }
    return "unknown";
}

namespace {

SignalMode mode_from_name(const std::string &name) {
    for (auto m : {SignalMode::kExactProbability, SignalMode::kEmpiricalFrequency, SignalMode::kMoment,
                   SignalMode::kGeneric}) {
        if (name == signal_mode_name(m)) {
            return m;
        }
    }
    throw Error(ErrorKind::kIOFailure, "unknown signal mode \"" + name + "\"");
}

std::vector<std::uint64_t> identity_labels(std::size_t d) {
    std::vector<std::uint64_t> labels(d);
    for (std::size_t i = 0; i < d; ++i) {
        labels[i] = i;
    }
    return labels;
}

}  // namespace

Eigen::VectorXd SignalMatrix::weights() const {
    const auto t = static_cast<Eigen::Index>(rows());
    if (row_weights.size() == 0) {
        return Eigen::VectorXd::Constant(t, t > 0 ? 1.0 / static_cast<double>(t) : 0.0);
    }
    return row_weights / row_weights.sum();
}

void SignalMatrix::validate() const {
    if (labels.size() != cols()) {
        throw Error(ErrorKind::kInvalidSignals, "label count does not match column count");
    }
    if (row_weights.size() != 0) {
        if (static_cast<std::size_t>(row_weights.size()) != rows() || (row_weights.array() < 0.0).any() ||
            !(row_weights.sum() > 0.0)) {
            throw Error(ErrorKind::kInvalidSignals, "row weights must be non-negative, one per row");
        }
    }
    if (!data.allFinite()) {
        throw Error(ErrorKind::kInvalidSignals, "signals contain non-finite values");
    }
    switch (mode) {
        case SignalMode::kExactProbability:
            for (Eigen::Index t = 0; t < data.rows(); ++t) {
                if ((data.row(t).array() < -1e-12).any() || (data.row(t).array() > 1.0 + 1e-12).any()) {
                    throw Error(ErrorKind::kInvalidSignals, "probability outside [0,1] in row " + std::to_string(t));
                }
                if (std::abs(data.row(t).sum() - 1.0) > 1e-10) {
                    throw Error(ErrorKind::kInvalidSignals, "row " + std::to_string(t) + " does not sum to 1");
                }
            }
            break;
        case SignalMode::kEmpiricalFrequency: {
            if (!shots || *shots == 0) {
                throw Error(ErrorKind::kMissingShotMetadata, "empirical signals need a shot count");
            }
            const double s = static_cast<double>(*shots);
            for (Eigen::Index t = 0; t < data.rows(); ++t) {
                for (Eigen::Index k = 0; k < data.cols(); ++k) {
                    double c = data(t, k) * s;
                    if (std::abs(c - std::round(c)) > 1e-9 * std::max(1.0, s) || c < -1e-9) {
                        throw Error(ErrorKind::kInvalidSignals, "frequency is not a multiple of 1/S");
                    }
                }
                if (std::abs(data.row(t).sum() - 1.0) > 1e-10) {
                    throw Error(ErrorKind::kInvalidSignals, "row " + std::to_string(t) + " does not sum to 1");
                }
            }
            break;
        }
        case SignalMode::kMoment: {
            auto it = std::find(labels.begin(), labels.end(), std::uint64_t{0});
            if (it == labels.end()) {
                throw Error(ErrorKind::kInvalidSignals, "moment signals need the empty-mask column");
            }
            auto col = static_cast<Eigen::Index>(it - labels.begin());
            if (((data.col(col).array() - 1.0).abs() > 1e-12).any()) {
                throw Error(ErrorKind::kInvalidSignals, "empty-mask moment must be identically 1");
            }
            break;
        }
        case SignalMode::kGeneric:
            break;
    }
}

SignalMatrix probability_signals(std::span<const BitstringDistribution> dists) {
    if (dists.empty()) {
        throw Error(ErrorKind::kInvalidArgument, "no distributions");
    }
    const int n = dists.front().n();
    const std::size_t d = dists.front().size();
    SignalMatrix out;
    out.mode = SignalMode::kExactProbability;
    out.n = n;
    out.labels = identity_labels(d);
    out.data.resize(static_cast<Eigen::Index>(dists.size()), static_cast<Eigen::Index>(d));
    for (std::size_t t = 0; t < dists.size(); ++t) {
        if (dists[t].n() != n) {
            throw Error(ErrorKind::kMixedDimensions, "distribution " + std::to_string(t) + " has " +
                                                         std::to_string(dists[t].n()) + " bits, expected " +
                                                         std::to_string(n));
        }
        auto p = dists[t].probs();
        for (std::size_t k = 0; k < d; ++k) {
            out.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = p[k];
        }
    }
    return out;
}

SignalMatrix empirical_probabilities(const TrajectoryEnsemble &ensemble) {
    if (ensemble.shots == 0) {
        throw Error(ErrorKind::kInvalidArgument, "ensemble has no shots");
    }
    SignalMatrix out;
    out.mode = SignalMode::kEmpiricalFrequency;
    out.n = ensemble.n;
    out.shots = ensemble.shots;
    if (ensemble.n <= kMaxExactBits) {
        out.labels = identity_labels(std::size_t{1} << ensemble.n);
    } else {
        std::vector<std::uint64_t> seen = ensemble.samples;
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        out.labels = std::move(seen);
    }
    const double inv = 1.0 / static_cast<double>(ensemble.shots);
    out.data = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ensemble.steps),
                                     static_cast<Eigen::Index>(out.labels.size()));
    const bool dense = ensemble.n <= kMaxExactBits;
    for (std::size_t s = 0; s < ensemble.shots; ++s) {
        for (std::size_t t = 0; t < ensemble.steps; ++t) {
            std::uint64_t b = ensemble.at(s, t);
            std::size_t col = dense ? static_cast<std::size_t>(b)
                                    : static_cast<std::size_t>(
                                          std::lower_bound(out.labels.begin(), out.labels.end(), b) -
                                          out.labels.begin());
            out.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(col)) += 1.0;
        }
    }
    out.data *= inv;
    return out;
}

std::vector<double> moments_from_probabilities(std::span<const double> probs, int n) {
    if (probs.size() != (std::size_t{1} << n)) {
        throw Error(ErrorKind::kInvalidArgument, "expected 2^n entries");
    }
    std::vector<double> f(probs.begin(), probs.end());
    const std::size_t dim = f.size();
    for (int bit = 0; bit < n; ++bit) {
        const std::size_t b = std::size_t{1} << bit;
        for (std::size_t mask = 0; mask < dim; ++mask) {
            if (!(mask & b)) {
                f[mask] += f[mask | b];
            }
        }
    }
    return f;
}

std::vector<double> probabilities_from_moments(std::span<const double> moments, int n) {
    if (moments.size() != (std::size_t{1} << n)) {
        throw Error(ErrorKind::kInvalidArgument, "expected 2^n entries");
    }
    std::vector<double> f(moments.begin(), moments.end());
    const std::size_t dim = f.size();
    for (int bit = 0; bit < n; ++bit) {
        const std::size_t b = std::size_t{1} << bit;
        for (std::size_t mask = 0; mask < dim; ++mask) {
            if (!(mask & b)) {
                f[mask] -= f[mask | b];
            }
        }
    }
    for (std::size_t k = 0; k < dim; ++k) {
        if (f[k] < -1e-10) {
            throw Error(ErrorKind::kNegativeProbability,
                        "bitstring " + std::to_string(k) + " inverts to " + io::format_double(f[k]));
        }
    }
    return f;
}

std::vector<double> moments_for_masks(std::span<const std::uint64_t> bitstrings, std::span<const double> probs,
                                      std::span<const std::uint64_t> masks) {
    if (bitstrings.size() != probs.size()) {
        throw Error(ErrorKind::kInvalidArgument, "bitstrings and probabilities differ in length");
    }
    std::vector<double> out(masks.size(), 0.0);
    for (std::size_t m = 0; m < masks.size(); ++m) {
        for (std::size_t i = 0; i < bitstrings.size(); ++i) {
            if ((bitstrings[i] & masks[m]) == masks[m]) {
                out[m] += probs[i];
            }
        }
    }
    return out;
}

SignalMatrix moment_signals(const SignalMatrix &probabilities) {
    if (probabilities.mode == SignalMode::kMoment) {
        return probabilities;
    }
    const std::size_t dim = std::size_t{1} << probabilities.n;
    if (probabilities.n > kMaxExactBits || probabilities.cols() != dim) {
        throw Error(ErrorKind::kInvalidArgument, "dense moments need all 2^n columns; use moments_for_masks");
    }
    SignalMatrix out = probabilities;
    out.mode = SignalMode::kMoment;
    std::vector<double> row(dim);
    for (Eigen::Index t = 0; t < probabilities.data.rows(); ++t) {
        for (std::size_t k = 0; k < dim; ++k) {
            row[k] = probabilities.data(t, static_cast<Eigen::Index>(k));
        }
        auto m = moments_from_probabilities(row, probabilities.n);
        for (std::size_t k = 0; k < dim; ++k) {
            out.data(t, static_cast<Eigen::Index>(k)) = m[k];
        }
    }
    return out;
}

std::vector<std::size_t> noise_floor_columns(const SignalMatrix &signals) {
    std::vector<std::size_t> out;
    if (!signals.shots) {
        return out;
    }
    const double floor = 1.0 / (10.0 * static_cast<double>(*signals.shots));
    Eigen::VectorXd means = signals.data.transpose() * signals.weights();
    for (Eigen::Index k = 0; k < means.size(); ++k) {
        if (means[k] < floor) {
            out.push_back(static_cast<std::size_t>(k));
        }
    }
    return out;
}

void write_signals_csv(const SignalMatrix &signals, const std::filesystem::path &path) {
    std::vector<std::string> header;
    const char *prefix = "p_";
    if (signals.mode == SignalMode::kMoment) {
        prefix = "m_";
    } else if (signals.mode == SignalMode::kGeneric) {
        prefix = "x_";
    }
    for (auto label : signals.labels) {
        header.push_back(prefix + std::to_string(label));
    }
    std::vector<std::vector<double>> rows(signals.rows(), std::vector<double>(signals.cols()));
    for (std::size_t t = 0; t < signals.rows(); ++t) {
        for (std::size_t k = 0; k < signals.cols(); ++k) {
            rows[t][k] = signals.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k));
        }
    }
    io::write_csv(path, header, rows);
}

SignalMatrix read_signals_csv(const std::filesystem::path &path, int n, SignalMode mode) {
    io::CsvTable table = io::read_csv(path);
    SignalMatrix out;
    out.n = n;
    out.mode = mode;
    for (const auto &h : table.header) {
        if (h.size() < 3) {
            throw Error(ErrorKind::kIOFailure, "bad column label \"" + h + "\"");
        }
        out.labels.push_back(std::stoull(h.substr(2)));
    }
    out.data.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.header.size()));
    for (std::size_t t = 0; t < table.rows.size(); ++t) {
        for (std::size_t k = 0; k < table.header.size(); ++k) {
            out.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = table.rows[t][k];
        }
    }
    return out;
}

void write_signals_binary(const SignalMatrix &signals, const std::filesystem::path &prefix) {
    std::filesystem::path bin = prefix;
    bin += ".bin";
    std::filesystem::path side = prefix;
    side += ".json";
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = signals.data;
    {
        std::ofstream out(bin, std::ios::binary);
        out.write(reinterpret_cast<const char *>(row_major.data()),
                  static_cast<std::streamsize>(row_major.size() * sizeof(double)));
        if (!out) {
            throw Error(ErrorKind::kIOFailure, "cannot write " + bin.string());
        }
    }
    nlohmann::json meta{{"rows", signals.rows()},
                        {"cols", signals.cols()},
                        {"n", signals.n},
                        {"mode", signal_mode_name(signals.mode)},
                        {"labels", signals.labels},
                        {"dtype", "float64le"}};
    if (signals.shots) {
        meta["shots"] = *signals.shots;
    }
    if (signals.row_weights.size() != 0) {
        meta["row_weights"] = std::vector<double>(signals.row_weights.begin(), signals.row_weights.end());
    }
    std::ofstream out(side);
    out << meta.dump(2) << "\n";
    if (!out) {
        throw Error(ErrorKind::kIOFailure, "cannot write " + side.string());
    }
}

SignalMatrix read_signals_binary(const std::filesystem::path &prefix) {
    std::filesystem::path bin = prefix;
    bin += ".bin";
    std::filesystem::path side = prefix;
    side += ".json";
    std::ifstream meta_in(side);
    if (!meta_in) {
        throw Error(ErrorKind::kIOFailure, "cannot read " + side.string());
    }
    nlohmann::json meta = nlohmann::json::parse(meta_in, nullptr, false);
    if (meta.is_discarded()) {
        throw Error(ErrorKind::kIOFailure, "malformed sidecar " + side.string());
    }
    SignalMatrix out;
    out.n = meta.at("n").get<int>();
    out.mode = mode_from_name(meta.at("mode").get<std::string>());
    out.labels = meta.at("labels").get<std::vector<std::uint64_t>>();
    if (meta.contains("shots")) {
        out.shots = meta.at("shots").get<std::size_t>();
    }
    if (meta.contains("row_weights")) {
        auto w = meta.at("row_weights").get<std::vector<double>>();
        out.row_weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    }
    const auto rows = meta.at("rows").get<Eigen::Index>();
    const auto cols = meta.at("cols").get<Eigen::Index>();
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major(rows, cols);
    std::ifstream in(bin, std::ios::binary);
    in.read(reinterpret_cast<char *>(row_major.data()), static_cast<std::streamsize>(rows * cols * sizeof(double)));
    if (!in) {
        throw Error(ErrorKind::kIOFailure, "short read from " + bin.string());
    }
    out.data = row_major;
    return out;
}

}  // namespace stochres
