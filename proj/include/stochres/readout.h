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
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "stochres/reservoir.h"

namespace stochres {

/// kGeneric carries arbitrary real signals (no probability invariants); it
/// is accepted by capacity() but not by the Gram/IPC routines.
enum class SignalMode { kExactProbability, kEmpiricalFrequency, kMoment, kGeneric };

const char *signal_mode_name(SignalMode mode);

/// T x d readout signals. Rows are time steps (or quadrature nodes when
/// `row_weights` is set); columns are bitstrings or subset masks.
struct SignalMatrix {
    Eigen::MatrixXd data;
    SignalMode mode = SignalMode::kExactProbability;
    int n = 0;
    std::vector<std::uint64_t> labels;
    std::optional<std::size_t> shots;  // empirical mode: shots per row
    Eigen::VectorXd row_weights;       // empty means uniform 1/T

    std::size_t rows() const {
        return static_cast<std::size_t>(data.rows());
    }
    std::size_t cols() const {
        return static_cast<std::size_t>(data.cols());
    }

    /// Normalized weights (uniform when none were given).
    Eigen::VectorXd weights() const;

    /// Mode-specific invariants; throws InvalidSignals.
    void validate() const;
};

SignalMatrix probability_signals(std::span<const BitstringDistribution> dists);

/// Frequencies (count / S) per step. Dense over all 2^n bitstrings when
/// n <= kMaxExactBits, otherwise restricted to the observed bitstrings in
/// increasing order.
SignalMatrix empirical_probabilities(const TrajectoryEnsemble &ensemble);

/// Superset-sum (zeta) transform: entry S is the sum of p_k over k ⊇ S,
/// i.e. the expectation of the product of the bits in S. O(n 2^n).
std::vector<double> moments_from_probabilities(std::span<const double> probs, int n);

/// Möbius inversion of moments_from_probabilities. Throws NegativeProbability
/// when an inverted entry falls below -1e-10.
std::vector<double> probabilities_from_moments(std::span<const double> moments, int n);

/// Moments for selected masks from a sparse distribution; for n beyond the
/// dense limit.
std::vector<double> moments_for_masks(std::span<const std::uint64_t> bitstrings, std::span<const double> probs,
                                      std::span<const std::uint64_t> masks);

/// Row-wise zeta transform of a dense probability or frequency matrix.
SignalMatrix moment_signals(const SignalMatrix &probabilities);

/// Columns whose mean falls below 1/(10 S): reported as a noise floor, never zeroed.
std::vector<std::size_t> noise_floor_columns(const SignalMatrix &signals);

/// CSV with a header of column labels ("p_<k>" or "m_<mask>").
void write_signals_csv(const SignalMatrix &signals, const std::filesystem::path &path);
SignalMatrix read_signals_csv(const std::filesystem::path &path, int n, SignalMode mode);

/// `<prefix>.bin` (little-endian float64, row-major) plus `<prefix>.json` sidecar.
void write_signals_binary(const SignalMatrix &signals, const std::filesystem::path &prefix);
SignalMatrix read_signals_binary(const std::filesystem::path &prefix);

}  // namespace stochres
