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

#include "stochres/target_basis.h"

#include <algorithm>
#include <cmath>

#include "stochres/errors.h"

namespace stochres {

std::string TargetFunction::label() const {
    std::string out;
    for (std::size_t d = 0; d < degrees.size(); ++d) {
        if (degrees[d] == 0) {
            continue;
        }
        if (!out.empty()) {
            out += "*";
        }
        out += "L" + std::to_string(degrees[d]) + "(u[t-" + std::to_string(d) + "])";
    }
    return out.empty() ? "1" : out;
}

namespace {

void enumerate_degrees(std::vector<int> &current, std::size_t pos, int remaining, std::vector<TargetFunction> &out) {
    if (pos == current.size()) {
        TargetFunction f;
        f.degrees = current;
        for (int g : current) {
            f.total_degree += g;
        }
        out.push_back(std::move(f));
        return;
    }
    for (int g = remaining; g >= 0; --g) {
        current[pos] = g;
        enumerate_degrees(current, pos + 1, remaining - g, out);
    }
    current[pos] = 0;
}

}  // namespace

TargetBasis TargetBasis::legendre(const InputMeasure &measure, int max_delay, int max_degree) {
    measure.validate();
    if (max_delay < 0 || max_degree < 0) {
        throw Error(ErrorKind::kInvalidArgument, "truncation must be non-negative");
    }
    TargetBasis basis;
    basis.measure_ = measure;
    basis.max_delay_ = max_delay;
    basis.max_degree_ = max_degree;
    std::vector<int> current(static_cast<std::size_t>(max_delay) + 1, 0);
    enumerate_degrees(current, 0, max_degree, basis.functions_);
    std::stable_sort(basis.functions_.begin(), basis.functions_.end(),
                     [](const TargetFunction &a, const TargetFunction &b) { return a.total_degree < b.total_degree; });
    return basis;
}

double TargetBasis::univariate(int degree, double x) const {
    const double z = (2.0 * x - (measure_.lo + measure_.hi)) / (measure_.hi - measure_.lo);
    double p0 = 1.0;
    if (degree == 0) {
        return 1.0;
    }
    double p1 = z;
    for (int k = 2; k <= degree; ++k) {
        double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    return std::sqrt(2.0 * degree + 1.0) * p1;
}

double TargetBasis::evaluate(std::size_t i, std::span<const double> drive, std::size_t t) const {
    const auto &f = functions_.at(i);
    if (t < static_cast<std::size_t>(max_delay_) || t >= drive.size()) {
        throw Error(ErrorKind::kInvalidArgument, "drive index lacks the history the target needs");
    }
    double v = 1.0;
    for (std::size_t d = 0; d < f.degrees.size(); ++d) {
        if (f.degrees[d] != 0) {
            v *= univariate(f.degrees[d], drive[t - d]);
        }
    }
    return v;
}

std::vector<double> TargetBasis::evaluate_series(std::size_t i, std::span<const double> drive, std::size_t first,
                                                 std::size_t count) const {
    if (first < static_cast<std::size_t>(max_delay_) || first + count > drive.size()) {
        throw Error(ErrorKind::kInvalidArgument, "drive history too short for the target delays");
    }
    std::vector<double> out(count);
    for (std::size_t t = 0; t < count; ++t) {
        out[t] = evaluate(i, drive, first + t);
    }
    return out;
}

double TargetBasis::orthonormality_error() const {
    QuadratureRule rule = measure_.integration_rule(static_cast<std::size_t>(max_degree_) + 2);
    double worst = 0.0;
    for (int a = 0; a <= max_degree_; ++a) {
        for (int b = a; b <= max_degree_; ++b) {
            double inner = 0.0;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                inner += rule.weights[q] * univariate(a, rule.nodes[q]) * univariate(b, rule.nodes[q]);
            }
            worst = std::max(worst, std::abs(inner - (a == b ? 1.0 : 0.0)));
        }
    }
    return worst;
}

void TargetBasis::check_orthonormal(double tolerance) const {
    double err = orthonormality_error();
    if (err > tolerance) {
        throw Error(ErrorKind::kBasisNotOrthonormal,
                    "Legendre family deviates from orthonormality by " + std::to_string(err) +
                        " under this measure (max_degree " + std::to_string(max_degree_) + ")");
    }
}

}  // namespace stochres
