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

#include "stochres/quantum_embed.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>

#include "stochres/errors.h"
#include "stochres/rng.h"

namespace stochres {

namespace {

using cd = std::complex<double>;

constexpr double kStateTolerance = 1e-12;
constexpr double kPsdTolerance = 1e-10;
constexpr double kPathTolerance = 1e-12;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd x;
    x << 0.0, 1.0, 1.0, 0.0;
    return x;
}

DensityMatrix random_state(CounterStream &rng) {
    Eigen::Matrix2cd a;
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            a(i, j) = cd(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
        }
    }
    Eigen::Matrix2cd rho = a * a.adjoint();
    rho /= rho.trace().real();
    return {rho};
}

EmbedCheck make_check(std::string name, double residual, double tolerance) {
    return {std::move(name), residual, tolerance, residual <= tolerance};
}

}  // namespace

DensityMatrix DensityMatrix::basis_state(int qubits, std::size_t index) {
    if (qubits < 1 || qubits > kMaxEmbedQubits || index >= (std::size_t{1} << qubits)) {
        throw Error(ErrorKind::kInvalidState, "basis state out of range");
    }
    auto dim = Eigen::Index{1} << qubits;
    DensityMatrix d{Eigen::MatrixXcd::Zero(dim, dim)};
    d.rho(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return d;
}

DensityMatrix DensityMatrix::maximally_mixed(int qubits) {
    if (qubits < 1 || qubits > kMaxEmbedQubits) {
        throw Error(ErrorKind::kInvalidState, "qubit count out of range");
    }
    auto dim = Eigen::Index{1} << qubits;
    return {Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim)};
}

int DensityMatrix::qubits() const {
    int q = 0;
    while ((Eigen::Index{1} << q) < rho.rows()) {
        ++q;
    }
    return q;
}

void DensityMatrix::validate() const {
    auto dim = rho.rows();
    if (dim != rho.cols() || dim < 2 || dim > (Eigen::Index{1} << kMaxEmbedQubits) || (dim & (dim - 1)) != 0) {
        throw Error(ErrorKind::kInvalidState, "density matrix must be 2^m x 2^m with 1 <= m <= 4");
    }
    if (!rho.allFinite()) {
        throw Error(ErrorKind::kInvalidState, "non-finite entries");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTolerance) {
        throw Error(ErrorKind::kInvalidState, "not Hermitian");
    }
    if (std::abs(rho.trace() - cd(1.0, 0.0)) > kStateTolerance) {
        throw Error(ErrorKind::kInvalidState, "trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTolerance) {
        throw Error(ErrorKind::kInvalidState, "negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    }
}

double UnitaryPair::unitarity_residual() const {
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    return std::max((u1 * u1.adjoint() - id).cwiseAbs().maxCoeff(), (u2 * u2.adjoint() - id).cwiseAbs().maxCoeff());
}

UnitaryPair rotation_pair(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::kOutOfRange, "p must lie in [0, 1]");
    }
    UnitaryPair pair;
    pair.p = p;
    pair.theta = std::acos(std::sqrt(p));
    // X squares to the identity, so exp(-+ i theta X) = cos(theta) I -+ i sin(theta) X.
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    cd c(std::cos(pair.theta), 0.0);
    cd s(0.0, std::sin(pair.theta));
    pair.u1 = c * id - s * pauli_x();
    pair.u2 = c * id + s * pauli_x();
    return pair;
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd &m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

ChannelResult bernoulli_channel(double p, const DensityMatrix &rho) {
    rho.validate();
    if (rho.rho.rows() != 2) {
        throw Error(ErrorKind::kInvalidState, "channel acts on a single qubit");
    }
    UnitaryPair pair = rotation_pair(p);
    ChannelResult out;
    out.output.rho = 0.5 * (pair.u1 * rho.rho * pair.u1.adjoint() + pair.u2 * rho.rho * pair.u2.adjoint());

    Eigen::MatrixXcd super = 0.5 * (kron(pair.u1.conjugate(), pair.u1) + kron(pair.u2.conjugate(), pair.u2));
    Eigen::VectorXcd v = super * vec(rho.rho);
    out.vectorized_output = Eigen::Map<Eigen::MatrixXcd>(v.data(), 2, 2);
    out.path_disagreement = (out.vectorized_output - out.output.rho).cwiseAbs().maxCoeff();
    if (out.path_disagreement > kPathTolerance) {
        throw Error(ErrorKind::kNumericCheckFailure,
                    "vectorized and direct channel differ by " + std::to_string(out.path_disagreement));
    }
    return out;
}

RateReport verify_rate_relation(std::span<const double> p_path, double dt) {
    if (!(dt > 0.0)) {
        throw Error(ErrorKind::kInvalidArgument, "dt must be positive");
    }
    if (p_path.size() < 3) {
        throw Error(ErrorKind::kInvalidArgument, "path needs at least three samples");
    }
    for (double v : p_path) {
        if (!std::isfinite(v) || v > 1.0) {
            throw Error(ErrorKind::kOutOfRange, "path leaves [0, 1]");
        }
        if (v <= 0.0) {
            throw Error(ErrorKind::kSingularPath, "p touches 0 on the grid");
        }
    }
    RateReport rep;
    for (std::size_t i = 1; i + 1 < p_path.size(); ++i) {
        double da = (std::sqrt(p_path[i + 1]) - std::sqrt(p_path[i - 1])) / (2.0 * dt);
        double dp = (p_path[i + 1] - p_path[i - 1]) / (2.0 * dt);
        double rhs = dp / (2.0 * std::sqrt(p_path[i]));
        double dev = std::abs(da - rhs);
        double scale = std::max(std::abs(da), std::abs(rhs));
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
        if (scale > 0.0) {
            rep.max_relative_deviation = std::max(rep.max_relative_deviation, dev / scale);
        }
        ++rep.points;
    }
    return rep;
}

RateReport verify_rate_relation(const std::function<double(double)> &p, double t0, double t1, double dt) {
    if (!(t1 > t0) || !(dt > 0.0)) {
        throw Error(ErrorKind::kInvalidArgument, "bad time grid");
    }
    auto steps = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
    std::vector<double> path;
    for (std::size_t i = 0; i <= steps; ++i) {
        path.push_back(p(t0 + dt * static_cast<double>(i)));
    }
    return verify_rate_relation(path, dt);
}

double rate_convergence_order(const std::function<double(double)> &p, double t0, double t1, double dt) {
    double coarse = verify_rate_relation(p, t0, t1, dt).max_relative_deviation;
    double fine = verify_rate_relation(p, t0, t1, dt / 2.0).max_relative_deviation;
    if (!(coarse > 0.0) || !(fine > 0.0)) {
        throw Error(ErrorKind::kNumericCheckFailure, "deviation vanished; order undefined");
    }
    return std::log2(coarse / fine);
}

CorrelatedFlipReport correlated_flip_check(int qubits, int first, int second, double theta) {
    if (qubits < 2 || qubits > kMaxEmbedQubits || first < 0 || second < 0 || first >= qubits ||
        second >= qubits || first == second) {
        throw Error(ErrorKind::kInvalidArgument, "bad qubit pair");
    }
    auto dim = Eigen::Index{1} << qubits;
    std::size_t pair_mask = (std::size_t{1} << first) | (std::size_t{1} << second);
    // X_a X_b permutes basis states by flipping both bits.
    Eigen::MatrixXcd xx = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        xx(static_cast<Eigen::Index>(static_cast<std::size_t>(k) ^ pair_mask), k) = 1.0;
    }
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    cd c(std::cos(theta), 0.0);
    cd s(0.0, std::sin(theta));
    Eigen::MatrixXcd u1 = c * id - s * xx;
    Eigen::MatrixXcd u2 = c * id + s * xx;
    DensityMatrix in = DensityMatrix::basis_state(qubits, 0);
    Eigen::MatrixXcd out = 0.5 * (u1 * in.rho * u1.adjoint() + u2 * in.rho * u2.adjoint());
    DensityMatrix{out}.validate();

    CorrelatedFlipReport rep;
    rep.qubits = qubits;
    rep.first = first;
    rep.second = second;
    rep.theta = theta;
    for (Eigen::Index k = 0; k < dim; ++k) {
        double pop = out(k, k).real();
        rep.populations.push_back(pop);
        if (static_cast<std::size_t>(k) == pair_mask) {
            rep.flipped_population = pop;
        } else if (k != 0) {
            rep.leaked_population += std::abs(pop);
        }
    }
    return rep;
}

std::vector<EmbedCheck> embed_check_suite(std::uint64_t seed, std::size_t random_cases) {
    std::vector<EmbedCheck> checks;
    for (double p : {0.0, 0.25, 0.5, 1.0}) {
        ChannelResult r = bernoulli_channel(p, DensityMatrix::basis_state(1, 0));
        double res = std::max({std::abs(r.output.rho(0, 0).real() - p), std::abs(r.output.rho(1, 1).real() - (1.0 - p)),
                               std::abs(r.output.rho(0, 1)), std::abs(r.output.rho(1, 0))});
        char name[64];
        std::snprintf(name, sizeof name, "channel_diagonal_p=%g", p);
        checks.push_back(make_check(name, res, 1e-12));
        std::snprintf(name, sizeof name, "unitarity_p=%g", p);
        checks.push_back(make_check(name, rotation_pair(p).unitarity_residual(), 1e-12));
    }

    double path = 0.0;
    double unital = 0.0;
    double validity = 0.0;
    for (std::size_t i = 0; i < random_cases; ++i) {
        CounterStream rng(seed, 0x6a0ULL, i);
        double p = rng.next_double();
        DensityMatrix rho = random_state(rng);
        ChannelResult r = bernoulli_channel(p, rho);
        path = std::max(path, r.path_disagreement);
        try {
            r.output.validate();
        } catch (const Error &) {
            validity = 1.0;
        }
        ChannelResult mixed = bernoulli_channel(p, DensityMatrix::maximally_mixed(1));
        unital = std::max(unital, (mixed.output.rho - DensityMatrix::maximally_mixed(1).rho).cwiseAbs().maxCoeff());
    }
    checks.push_back(make_check("vectorized_vs_direct", path, 1e-12));
    checks.push_back(make_check("unital", unital, 1e-12));
    checks.push_back(make_check("output_valid", validity, 0.0));

    auto cos2 = [](double t) { return std::cos(t) * std::cos(t); };
    checks.push_back(make_check("rate_relation_cos2_dt=1e-4",
                                verify_rate_relation(cos2, 0.1, 1.4, 1e-4).max_relative_deviation, 1e-6));
    checks.push_back(make_check("rate_relation_order_cos2", std::abs(rate_convergence_order(cos2, 0.1, 1.4, 1e-2) - 2.0),
                                0.2));
    auto linear = [](double t) { return t; };
    checks.push_back(make_check("rate_relation_order_linear",
                                std::abs(rate_convergence_order(linear, 0.1, 0.9, 1e-2) - 2.0), 0.2));

    for (double theta : {0.0, std::numbers::pi / 6.0, std::numbers::pi / 2.0}) {
        CorrelatedFlipReport r = correlated_flip_check(2, 0, 1, theta);
        char name[64];
        std::snprintf(name, sizeof name, "correlated_flip_leak_theta=%.6g", theta);
        checks.push_back(make_check(name, r.leaked_population, 1e-12));
        std::snprintf(name, sizeof name, "correlated_flip_transfer_theta=%.6g", theta);
        double expect = std::sin(theta) * std::sin(theta);
        checks.push_back(make_check(name, std::abs(r.flipped_population - expect), 1e-12));
    }
    return checks;
}

nlohmann::json to_json(const EmbedCheck &check) {
    return {{"name", check.name}, {"residual", check.residual}, {"tolerance", check.tolerance}, {"pass", check.pass}};
}

nlohmann::json to_json(const CorrelatedFlipReport &report) {
    return {
        {"qubits", report.qubits},
        {"pair", {report.first, report.second}},
        {"theta", report.theta},
        {"populations", report.populations},
        {"flipped_population", report.flipped_population},
        {"leaked_population", report.leaked_population},
    };
}

}  // namespace stochres
