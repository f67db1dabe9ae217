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

#include "stochres/inputs.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "stochres/errors.h"
#include "stochres/rng.h"

namespace stochres {

InputSequence InputSequence::scalar(const std::vector<double> &drive, std::size_t washout) {
    InputSequence seq;
    seq.values.reserve(drive.size());
    for (double u : drive) {
        seq.values.push_back({u});
    }
    seq.washout_length = washout;
    return seq;
}

double InputSequence::drive(std::size_t t) const {
    const auto &v = values[t];
    if (v.size() == 1) {
        return v[0];
    }
    double sq = 0.0;
    for (double x : v) {
        sq += x * x;
    }
    return std::sqrt(sq);
}

std::vector<double> InputSequence::drives() const {
    std::vector<double> out(values.size());
    for (std::size_t t = 0; t < values.size(); ++t) {
        out[t] = drive(t);
    }
    return out;
}

void InputSequence::validate() const {
    if (history_window == 0) {
        throw Error(ErrorKind::kInvalidArgument, "history_window must be >= 1");
    }
    std::size_t m = values.empty() ? 0 : values.front().size();
    for (std::size_t t = 0; t < values.size(); ++t) {
        if (values[t].size() != m || m == 0) {
            throw Error(ErrorKind::kInvalidArgument, "input vectors must share a non-zero length");
        }
        for (double x : values[t]) {
            if (!std::isfinite(x)) {
                throw Error(ErrorKind::kNonfiniteDrive, "input at step " + std::to_string(t) + " is not finite");
            }
        }
    }
}

namespace {

// Legendre P_order(z) and its derivative via the three-term recurrence.
std::pair<double, double> legendre_with_derivative(std::size_t order, double z) {
    double p0 = 1.0;
    double p1 = z;
    for (std::size_t k = 2; k <= order; ++k) {
        double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
    }
    double dp = static_cast<double>(order) * (z * p1 - p0) / (z * z - 1.0);
    return {p1, dp};
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t order, double lo, double hi) {
    if (order == 0) {
        throw Error(ErrorKind::kInvalidArgument, "quadrature order must be positive");
    }
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const std::size_t half = (order + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Newton iteration from the Tricomi initial guess.
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(order) + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            auto [p, dp] = legendre_with_derivative(order, z);
            double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        double dp = legendre_with_derivative(order, z).second;
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[order - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    const double mid = 0.5 * (lo + hi);
    const double half_width = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < order; ++i) {
        rule.nodes[i] = mid + half_width * rule.nodes[i];
        rule.weights[i] *= 0.5;
    }
    return rule;
}

InputMeasure InputMeasure::uniform(double lo, double hi, std::uint64_t seed) {
    InputMeasure m;
    m.kind = Kind::kUniformInterval;
    m.lo = lo;
    m.hi = hi;
    m.seed = seed;
    return m;
}

InputMeasure InputMeasure::binary(double lo, double hi, std::uint64_t seed) {
    InputMeasure m = uniform(lo, hi, seed);
    m.kind = Kind::kUniformBinary;
    return m;
}

InputMeasure InputMeasure::quadrature_grid(std::size_t order, double lo, double hi, std::uint64_t seed) {
    InputMeasure m = uniform(lo, hi, seed);
    m.kind = Kind::kQuadratureGrid;
    m.order = order;
    return m;
}

void InputMeasure::validate() const {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorKind::kInvalidArgument, "input measure requires finite lo < hi");
    }
    if (kind == Kind::kQuadratureGrid && order < 2) {
        throw Error(ErrorKind::kInvalidArgument, "quadrature-grid order must be >= 2");
    }
}

std::vector<double> InputMeasure::sample(std::size_t count, std::uint64_t stream) const {
    validate();
    std::vector<double> out(count);
    CounterStream rng(seed, stream, 0);
    switch (kind) {
        case Kind::kUniformInterval:
            for (auto &x : out) {
                x = lo + (hi - lo) * rng.next_double();
            }
            break;
        case Kind::kUniformBinary:
            for (auto &x : out) {
                x = rng.next_double() < 0.5 ? lo : hi;
            }
            break;
        case Kind::kQuadratureGrid: {
            QuadratureRule rule = gauss_legendre(order, lo, hi);
            std::vector<double> cdf(order);
            double acc = 0.0;
            for (std::size_t i = 0; i < order; ++i) {
                acc += rule.weights[i];
                cdf[i] = acc;
            }
            for (auto &x : out) {
                double r = rng.next_double() * acc;
                std::size_t k = 0;
                while (k + 1 < order && cdf[k] <= r) {
                    ++k;
                }
                x = rule.nodes[k];
            }
            break;
        }
    }
    return out;
}

QuadratureRule InputMeasure::integration_rule(std::size_t min_order) const {
    validate();
    switch (kind) {
        case Kind::kUniformInterval:
            return gauss_legendre(std::max<std::size_t>(min_order, 1), lo, hi);
        case Kind::kUniformBinary:
            return QuadratureRule{{lo, hi}, {0.5, 0.5}};
        case Kind::kQuadratureGrid:
            return gauss_legendre(order, lo, hi);
    }
    return {};
}

double InputMeasure::variance() const {
    QuadratureRule rule = integration_rule(4);
    double mean = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        mean += rule.weights[i] * rule.nodes[i];
    }
    double var = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        var += rule.weights[i] * (rule.nodes[i] - mean) * (rule.nodes[i] - mean);
    }
    return var;
}

}  // namespace stochres
