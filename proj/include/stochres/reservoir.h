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
#include <optional>
#include <span>
#include <vector>

#include "stochres/inputs.h"

namespace stochres {

/// Largest bit count for which a dense 2^n probability vector is materialized.
inline constexpr int kMaxExactBits = 14;
/// Largest bit count supported by sampling (bitstrings are stored as uint64).
inline constexpr int kMaxSampledBits = 63;
/// Points in the u-grid used to probe gate slopes.
inline constexpr int kDerivativeProbePoints = 256;

/// Probability vector over 2^n bitstrings; index = bitstring read as a binary
/// integer with bit i of the index holding bit i of the register.
class BitstringDistribution {
  public:
    BitstringDistribution() = default;
    BitstringDistribution(int n, std::vector<double> probs);

    static BitstringDistribution uniform(int n);
    static BitstringDistribution point_mass(int n, std::uint64_t bitstring);

    int n() const {
        return n_;
    }
    std::size_t size() const {
        return probs_.size();
    }
    std::span<const double> probs() const {
        return probs_;
    }
    double operator[](std::size_t k) const {
        return probs_[k];
    }

    /// Entries non-negative and summing to one within `tolerance`.
    void validate(double tolerance = 1e-12) const;

  private:
    int n_ = 0;
    std::vector<double> probs_;
};

/// Scalar map u -> probability, clipped to [0, 1].
struct DriveFunction {
    enum class Kind { kConstant, kPolynomial, kLogistic };

    Kind kind = Kind::kConstant;
    // constant: {p}; polynomial: c0 + c1 u + c2 u^2 + ...; logistic: {scale, offset}.
    std::vector<double> coeffs{0.0};

    static DriveFunction constant(double p);
    static DriveFunction polynomial(std::vector<double> coeffs);
    static DriveFunction logistic(double scale, double offset);

    double operator()(double u) const;
    bool depends_on_drive() const;
};

/// A k-local stochastic circuit element. Local bit j of the kernel index
/// corresponds to register bit support[j].
struct StochasticGate {
    enum class Kind {
        kIdentity,
        kFlip,            // flip the bit with probability p(u)
        kReset,           // set the bit to 1 with probability p(u), else 0
        kLeakyReset,      // keep the bit with probability `retain`, else reset
        kCopy,            // support {src, dst}: dst <- src
        kXor,             // support {control, target}: target ^= control
        kCorrelatedFlip,  // flip both bits together with probability p(u)
        kDense,           // explicit constant kernel
    };

    Kind kind = Kind::kIdentity;
    std::vector<int> support;
    DriveFunction probability;
    double retain = 0.0;
    std::vector<double> matrix;  // kDense: row-major 2^k x 2^k, (from, to)
    std::optional<double> derivative_bound;

    static StochasticGate identity(std::vector<int> support);
    static StochasticGate flip(int bit, DriveFunction p);
    static StochasticGate reset(int bit, DriveFunction p);
    static StochasticGate leaky_reset(int bit, double retain, DriveFunction p);
    static StochasticGate copy(int src, int dst);
    static StochasticGate xor_gate(int control, int target);
    static StochasticGate correlated_flip(int a, int b, DriveFunction p);
    static StochasticGate dense(std::vector<int> support, std::vector<double> matrix);

    int arity() const {
        return static_cast<int>(support.size());
    }
    bool depends_on_drive() const;

    /// Row-stochastic kernel at drive u, row-major, entry (from, to).
    std::vector<double> kernel(double u) const;
};

/// Input-driven k-local stochastic circuit. `gates` are applied in order once
/// per time step.
struct ReservoirSpec {
    int n = 1;
    int k_max = 2;
    int depth_bound = 0;  // 0 selects the default of 4n gates per step
    std::vector<StochasticGate> gates;
    std::optional<BitstringDistribution> initial_distribution;
    std::uint64_t initial_bitstring = 0;  // used when no distribution is given
    // Polynomials in n (coefficients of n^0, n^1, ...).
    std::vector<double> drive_bound_poly{1.0};
    std::vector<double> derivative_bound_poly{0.0, 2.0};

    int effective_depth_bound() const;
    double drive_bound() const;
    double derivative_bound() const;
};

/// Sampled bitstrings, `shots` trajectories by `steps` post-washout steps.
/// Trajectory s draws from the counter stream (seed_root, s, step).
struct TrajectoryEnsemble {
    int n = 0;
    std::size_t shots = 0;
    std::size_t steps = 0;
    std::size_t washout = 0;
    std::uint64_t seed_root = 0;
    std::vector<std::uint64_t> samples;

    std::uint64_t at(std::size_t shot, std::size_t step) const {
        return samples[shot * steps + step];
    }
};

class Reservoir;

Reservoir build_reservoir(ReservoirSpec spec);
Reservoir build_reservoir(ReservoirSpec spec, int k_max, int depth_bound);

/// A reservoir whose spec passed the locality, depth, stochasticity and
/// drive-derivative checks. Immutable and safe to share across threads.
class Reservoir {
  public:
    const ReservoirSpec &spec() const {
        return spec_;
    }
    int n() const {
        return spec_.n;
    }

    BitstringDistribution initial_state() const;

    BitstringDistribution step_exact(const BitstringDistribution &state, double u) const;
    void step_exact_inplace(std::vector<double> &probs, double u) const;

    /// Post-washout distributions, one per remaining step.
    std::vector<BitstringDistribution> run_exact(const InputSequence &inputs) const;

    TrajectoryEnsemble sample_trajectories(
        const InputSequence &inputs, std::size_t shots, std::uint64_t seed, unsigned threads = 1) const;

  private:
    friend Reservoir build_reservoir(ReservoirSpec spec);
    explicit Reservoir(ReservoirSpec spec) : spec_(std::move(spec)) {
    }

    void check_drive(double u) const;

    ReservoirSpec spec_;
};

/// Applies a k-local kernel to a dense distribution over n bits.
void apply_local_kernel(std::vector<double> &probs, int n, std::span<const int> support, std::span<const double> kernel);

}  // namespace stochres
