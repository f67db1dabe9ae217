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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stochres/readout.h"
#include "stochres/target_basis.h"

namespace stochres {

inline constexpr double kDefaultRankTolerance = 1e-10;

struct CapacityOptions {
    /// Capacities below this are flagged and left out of basis sums.
    /// Defaults to 4/sqrt(T) for time-sampled rows and 1e-9 for weighted
    /// (quadrature) rows, where there is no finite-sample overfitting.
    std::optional<double> threshold;
};

struct CapacityReport {
    double capacity = 0.0;      // clipped to [0, 1]
    double raw_capacity = 0.0;  // before clipping
    bool clipped = false;
    Eigen::VectorXd weights;    // readout weights, zero on dropped columns
    std::size_t rows = 0;
    double threshold = 0.0;
    bool below_threshold = false;
    std::vector<std::size_t> dropped_columns;  // identically zero signals
    std::vector<std::string> warnings;
};

/// Factorizes the (weighted) signal matrix once and answers least-squares
/// capacity queries for many targets.
class CapacitySolver {
  public:
    explicit CapacitySolver(const SignalMatrix &signals, const CapacityOptions &options = {});

    CapacityReport solve(std::span<const double> target) const;

    double threshold() const {
        return threshold_;
    }

  private:
    Eigen::VectorXd sqrt_w_;
    std::vector<std::size_t> kept_;
    std::vector<std::size_t> dropped_;
    std::size_t total_cols_ = 0;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
    double threshold_ = 0.0;
    std::vector<std::string> warnings_;
};

/// C_T[y] = 1 - min_w sum_t (w.X(t) - y(t))^2 / sum_t y(t)^2.
CapacityReport capacity(const SignalMatrix &signals, std::span<const double> target,
                        const CapacityOptions &options = {});

/// G1 = input average of <X><X>^T and G2 = input average of <X X^T>, under
/// single-shot (one-hot) readout semantics.
struct GramMatrices {
    Eigen::MatrixXd g1;
    Eigen::MatrixXd g2;
    SignalMode mode = SignalMode::kExactProbability;
    std::optional<std::size_t> shots;
    std::size_t rows = 0;

    /// Second-moment matrix for a readout averaging S shots per step: the
    /// Bernoulli variance term G2 - G1 shrinks by 1/S.
    Eigen::MatrixXd readout_g2(std::size_t readout_shots) const;
};

GramMatrices gram_matrices(const SignalMatrix &signals);

struct EigentaskDecomposition {
    std::vector<double> sigma_sq;      // ascending; +inf for tasks outside the noise support
    Eigen::MatrixXd eigentasks;        // r x r, orthonormal columns, in the retained G1 eigenbasis
    Eigen::MatrixXd g1_basis;          // d x r retained eigenvectors of G1
    Eigen::VectorXd g1_eigenvalues;    // r retained eigenvalues
    Eigen::MatrixXd task_readouts;     // d x r: readout weights realizing each eigentask
    std::size_t signal_count = 0;      // d
    std::size_t retained_rank = 0;     // r
    std::size_t dropped_dims = 0;
    double rank_tolerance = kDefaultRankTolerance;
    std::size_t negative_clipped = 0;  // sigma_sq values raised to 0
    double most_negative = 0.0;
};

/// Spectral decomposition of G1 restricted to eigenvalues >= tol * max,
/// followed by the generalized noise-to-signal matrix on that subspace.
///
/// The subspace form used is
///     (I + Q)^{-1} = D^{1/2} V^T G2^+ V D^{1/2},
/// which equals the inverse of D^{-1/2} V^T G2 V D^{-1/2} whenever G1 has
/// full rank, and keeps the trace identity with the probability
/// representation when it does not.
EigentaskDecomposition eigentask_decomposition(const Eigen::MatrixXd &g1, const Eigen::MatrixXd &g2,
                                               double rank_tolerance = kDefaultRankTolerance);

struct IPCReport {
    enum class Method { kSpectral, kProbabilityTrace, kBasisSum };

    double value = 0.0;
    Method method = Method::kSpectral;
    std::vector<double> terms;
    std::vector<std::string> term_labels;
    std::size_t signal_count = 0;
    std::size_t retained_rank = 0;
    std::size_t skipped_columns = 0;  // probability-trace: zero-mean columns
    std::size_t excluded_terms = 0;   // basis-sum: capacities under threshold
    double threshold = 0.0;
    std::optional<int> max_delay;
    std::optional<int> max_degree;
    std::string note;
};

const char *ipc_method_name(IPCReport::Method method);

/// IPC = sum_k 1 / (1 + sigma_k^2) over the retained rank.
IPCReport ipc_spectral(const EigentaskDecomposition &decomp);

/// IPC = sum_k avg(p_k^2) / avg(p_k), skipping zero-mean columns.
IPCReport ipc_probability_rep(const SignalMatrix &signals);

/// Sum of thresholded capacities over a truncated orthonormal basis. Row t
/// of `signals` is aligned with drive[first_index + t].
IPCReport total_capacity(const SignalMatrix &signals, const TargetBasis &basis, std::span<const double> drive,
                         std::size_t first_index, const CapacityOptions &options = {});

nlohmann::json to_json(const CapacityReport &report);
nlohmann::json to_json(const EigentaskDecomposition &decomp);
nlohmann::json to_json(const IPCReport &report);

}  // namespace stochres
