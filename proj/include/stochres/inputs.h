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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stochres {

/// Driving input U(t) for a reservoir, one vector per time step.
///
/// The scalar drive seen by the gates is the signed value for one-component
/// inputs and the Euclidean norm otherwise.
struct InputSequence {
    std::vector<std::vector<double>> values;
    std::size_t washout_length = 0;
    std::size_t history_window = 1;

    static InputSequence scalar(const std::vector<double> &drive, std::size_t washout = 0);

    std::size_t size() const {
        return values.size();
    }
    double drive(std::size_t t) const;
    std::vector<double> drives() const;

    /// Throws on non-finite entries, ragged vectors or history_window == 0.
    void validate() const;
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // sums to 1
};

/// Gauss-Legendre rule on [lo, hi] with weights normalized to a probability measure.
QuadratureRule gauss_legendre(std::size_t order, double lo = -1.0, double hi = 1.0);

/// Probability measure over scalar inputs.
struct InputMeasure {
    enum class Kind { kUniformInterval, kUniformBinary, kQuadratureGrid };

    Kind kind = Kind::kUniformInterval;
    double lo = -1.0;
    double hi = 1.0;
    std::size_t order = 64;  // quadrature-grid only
    std::uint64_t seed = 0;

    static InputMeasure uniform(double lo, double hi, std::uint64_t seed = 0);
    static InputMeasure binary(double lo, double hi, std::uint64_t seed = 0);
    static InputMeasure quadrature_grid(std::size_t order, double lo, double hi, std::uint64_t seed = 0);

    void validate() const;

    /// iid draws; `stream` selects an independent substream of `seed`.
    std::vector<double> sample(std::size_t count, std::uint64_t stream = 0) const;

    /// A rule integrating polynomials of degree < 2*min_order exactly against
    /// this measure. Discrete measures return their atoms.
    QuadratureRule integration_rule(std::size_t min_order) const;

    double variance() const;
};

}  // namespace stochres
