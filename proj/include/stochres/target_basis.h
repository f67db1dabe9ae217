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
#include <span>
#include <string>
#include <vector>

#include "stochres/inputs.h"

namespace stochres {

/// Product of orthonormal Legendre polynomials in delayed inputs:
/// y(t) = prod_d L_{degrees[d]}(u(t - d)).
struct TargetFunction {
    std::vector<int> degrees;  // indexed by delay, length max_delay + 1
    int total_degree = 0;

    std::string label() const;
};

/// Truncated orthonormal target basis over input histories, in graded
/// lexicographic order (total degree ascending, then the degree tuple
/// descending lexicographically).
class TargetBasis {
  public:
    static TargetBasis legendre(const InputMeasure &measure, int max_delay, int max_degree);

    const InputMeasure &measure() const {
        return measure_;
    }
    int max_delay() const {
        return max_delay_;
    }
    int max_degree() const {
        return max_degree_;
    }
    const std::vector<TargetFunction> &functions() const {
        return functions_;
    }
    std::size_t size() const {
        return functions_.size();
    }

    /// sqrt(2g+1) P_g(z) with z the input mapped affinely onto [-1, 1].
    double univariate(int degree, double x) const;

    /// Target i at drive index t; needs t >= max_delay.
    double evaluate(std::size_t i, std::span<const double> drive, std::size_t t) const;

    /// `count` consecutive values of target i starting at drive index `first`.
    std::vector<double> evaluate_series(std::size_t i, std::span<const double> drive, std::size_t first,
                                        std::size_t count) const;

    /// Largest |<L_a, L_b> - delta_ab| over the univariate family, integrated
    /// exactly against the measure.
    double orthonormality_error() const;

    /// Throws BasisNotOrthonormal when orthonormality_error() > tolerance.
    void check_orthonormal(double tolerance = 1e-6) const;

  private:
    InputMeasure measure_;
    int max_delay_ = 0;
    int max_degree_ = 0;
    std::vector<TargetFunction> functions_;
};

}  // namespace stochres
