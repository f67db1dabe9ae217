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

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace stochres {

inline constexpr int kMaxEmbedQubits = 4;

struct DensityMatrix {
    Eigen::MatrixXcd rho;

    static DensityMatrix basis_state(int qubits, std::size_t index);
    static DensityMatrix maximally_mixed(int qubits);

    int qubits() const;

    /// Hermitian and unit trace to 1e-12, eigenvalues >= -1e-10; throws
    /// InvalidState.
    void validate() const;
};

struct UnitaryPair {
    Eigen::Matrix2cd u1;
    Eigen::Matrix2cd u2;
    double p = 1.0;
    double theta = 0.0;

    /// max over both of |U U^dagger - I|.
    double unitarity_residual() const;
};

/// U1 = exp(-i theta X), U2 = exp(+i theta X) with theta = arccos(sqrt(p)).
UnitaryPair rotation_pair(double p);

struct ChannelResult {
    DensityMatrix output;
    Eigen::MatrixXcd vectorized_output;
    double path_disagreement = 0.0;
};

/// (U1 rho U1^dagger + U2 rho U2^dagger) / 2, cross-checked against the
/// column-stacked superoperator (conj(U1) (x) U1 + conj(U2) (x) U2) / 2.
ChannelResult bernoulli_channel(double p, const DensityMatrix &rho);

/// Column-stacking vec.
Eigen::VectorXcd vec(const Eigen::MatrixXcd &m);

struct RateReport {
    double max_relative_deviation = 0.0;
    double max_abs_deviation = 0.0;
    std::size_t points = 0;
};

/// Central differences of alpha = sqrt(p) against dp/dt / (2 sqrt(p)) on a
/// path sampled every dt.
RateReport verify_rate_relation(std::span<const double> p_path, double dt);

RateReport verify_rate_relation(const std::function<double(double)> &p, double t0, double t1, double dt);

/// Observed order of the deviation between dt and dt / 2.
double rate_convergence_order(const std::function<double(double)> &p, double t0, double t1, double dt);

struct CorrelatedFlipReport {
    int qubits = 2;
    int first = 0;
    int second = 1;
    double theta = 0.0;
    std::vector<double> populations;  // output diagonal
    double flipped_population = 0.0;  // the pair flipped together
    double leaked_population = 0.0;   // everything else except the input state
};

/// Averages exp(-i theta X_a X_b) and exp(+i theta X_a X_b) acting on |0...0>.
CorrelatedFlipReport correlated_flip_check(int qubits, int first, int second, double theta);

struct EmbedCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// The full appendix battery: channel diagonals, path agreement on random
/// states, rate-relation order and correlated flips.
std::vector<EmbedCheck> embed_check_suite(std::uint64_t seed, std::size_t random_cases = 100);

nlohmann::json to_json(const EmbedCheck &check);
nlohmann::json to_json(const CorrelatedFlipReport &report);

}  // namespace stochres
