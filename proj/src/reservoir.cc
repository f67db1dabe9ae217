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

#include "stochres/reservoir.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "stochres/errors.h"
#include "stochres/rng.h"

namespace stochres {

namespace {

double eval_poly(const std::vector<double> &coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

double clip01(double x) {
    return std::min(1.0, std::max(0.0, x));
}

void require_exact(int n) {
    if (n > kMaxExactBits) {
        throw Error(ErrorKind::kExactModeOverflow,
                    "exact mode holds at most " + std::to_string(kMaxExactBits) + " bits, got " + std::to_string(n));
    }
}

}  // namespace

BitstringDistribution::BitstringDistribution(int n, std::vector<double> probs) : n_(n), probs_(std::move(probs)) {
    if (n < 0 || n > kMaxExactBits) {
        throw Error(ErrorKind::kExactModeOverflow, "distribution over " + std::to_string(n) + " bits");
    }
    if (probs_.size() != (std::size_t{1} << n)) {
        throw Error(ErrorKind::kInvalidDistribution, "expected 2^n probabilities");
    }
    validate();
}

BitstringDistribution BitstringDistribution::uniform(int n) {
    require_exact(n);
    std::size_t dim = std::size_t{1} << n;
    return BitstringDistribution(n, std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

BitstringDistribution BitstringDistribution::point_mass(int n, std::uint64_t bitstring) {
    require_exact(n);
    std::vector<double> p(std::size_t{1} << n, 0.0);
    if (bitstring >= p.size()) {
        throw Error(ErrorKind::kInvalidDistribution, "bitstring out of range");
    }
    p[bitstring] = 1.0;
    return BitstringDistribution(n, std::move(p));
}

void BitstringDistribution::validate(double tolerance) const {
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorKind::kInvalidDistribution, "negative or non-finite probability");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > tolerance) {
        throw Error(ErrorKind::kInvalidDistribution, "probabilities sum to " + std::to_string(total));
    }
}

DriveFunction DriveFunction::constant(double p) {
    return DriveFunction{Kind::kConstant, {p}};
}

DriveFunction DriveFunction::polynomial(std::vector<double> coeffs) {
    return DriveFunction{Kind::kPolynomial, std::move(coeffs)};
}

DriveFunction DriveFunction::logistic(double scale, double offset) {
    return DriveFunction{Kind::kLogistic, {scale, offset}};
}

double DriveFunction::operator()(double u) const {
    switch (kind) {
        case Kind::kConstant:
            return clip01(coeffs.empty() ? 0.0 : coeffs[0]);
        case Kind::kPolynomial:
            return clip01(eval_poly(coeffs, u));
        case Kind::kLogistic:
            return 1.0 / (1.0 + std::exp(-(coeffs.at(0) * u + coeffs.at(1))));
    }
    return 0.0;
}

bool DriveFunction::depends_on_drive() const {
    switch (kind) {
        case Kind::kConstant:
            return false;
        case Kind::kPolynomial:
            return std::any_of(coeffs.begin() + std::min<std::ptrdiff_t>(1, coeffs.size()), coeffs.end(),
                               [](double c) { return c != 0.0; });
        case Kind::kLogistic:
            return coeffs.at(0) != 0.0;
    }
    return false;
}

StochasticGate StochasticGate::identity(std::vector<int> support) {
    StochasticGate g;
    g.kind = Kind::kIdentity;
    g.support = std::move(support);
    return g;
}

StochasticGate StochasticGate::flip(int bit, DriveFunction p) {
    StochasticGate g;
    g.kind = Kind::kFlip;
    g.support = {bit};
    g.probability = std::move(p);
    return g;
}

StochasticGate StochasticGate::reset(int bit, DriveFunction p) {
    StochasticGate g = flip(bit, std::move(p));
    g.kind = Kind::kReset;
    return g;
}

StochasticGate StochasticGate::leaky_reset(int bit, double retain, DriveFunction p) {
    StochasticGate g = flip(bit, std::move(p));
    g.kind = Kind::kLeakyReset;
    g.retain = retain;
    return g;
}

StochasticGate StochasticGate::copy(int src, int dst) {
    StochasticGate g;
    g.kind = Kind::kCopy;
    g.support = {src, dst};
    return g;
}

StochasticGate StochasticGate::xor_gate(int control, int target) {
    StochasticGate g = copy(control, target);
    g.kind = Kind::kXor;
    return g;
}

StochasticGate StochasticGate::correlated_flip(int a, int b, DriveFunction p) {
    StochasticGate g;
    g.kind = Kind::kCorrelatedFlip;
    g.support = {a, b};
    g.probability = std::move(p);
    return g;
}

StochasticGate StochasticGate::dense(std::vector<int> support, std::vector<double> matrix) {
    StochasticGate g;
    g.kind = Kind::kDense;
    g.support = std::move(support);
    g.matrix = std::move(matrix);
    return g;
}

bool StochasticGate::depends_on_drive() const {
    switch (kind) {
        case Kind::kFlip:
        case Kind::kReset:
        case Kind::kLeakyReset:
        case Kind::kCorrelatedFlip:
            return probability.depends_on_drive();
        default:
            return false;
    }
}

std::vector<double> StochasticGate::kernel(double u) const {
    const std::size_t dim = std::size_t{1} << support.size();
    std::vector<double> k(dim * dim, 0.0);
    auto at = [&](std::size_t from, std::size_t to) -> double & { return k[from * dim + to]; };
    switch (kind) {
        case Kind::kIdentity:
            for (std::size_t i = 0; i < dim; ++i) {
                at(i, i) = 1.0;
            }
            break;
        case Kind::kFlip: {
            double p = probability(u);
            at(0, 0) = 1.0 - p;
            at(0, 1) = p;
            at(1, 0) = p;
            at(1, 1) = 1.0 - p;
            break;
        }
        case Kind::kReset: {
            double p = probability(u);
            at(0, 0) = at(1, 0) = 1.0 - p;
            at(0, 1) = at(1, 1) = p;
            break;
        }
        case Kind::kLeakyReset: {
            double p = probability(u);
            double fresh = 1.0 - retain;
            at(0, 1) = fresh * p;
            at(0, 0) = 1.0 - at(0, 1);
            at(1, 0) = fresh * (1.0 - p);
            at(1, 1) = 1.0 - at(1, 0);
            break;
        }
        case Kind::kCopy:
            for (std::size_t i = 0; i < dim; ++i) {
                std::size_t src = i & 1u;
                at(i, src | (src << 1)) = 1.0;
            }
            break;
        case Kind::kXor:
            for (std::size_t i = 0; i < dim; ++i) {
                at(i, i ^ ((i & 1u) << 1)) = 1.0;
            }
            break;
        case Kind::kCorrelatedFlip: {
            double p = probability(u);
            for (std::size_t i = 0; i < dim; ++i) {
                at(i, i) += 1.0 - p;
                at(i, i ^ 3u) += p;
            }
            break;
        }
        case Kind::kDense:
            k = matrix;
            break;
    }
    return k;
}

int ReservoirSpec::effective_depth_bound() const {
    return depth_bound > 0 ? depth_bound : 4 * n;
}

double ReservoirSpec::drive_bound() const {
    return eval_poly(drive_bound_poly, static_cast<double>(n));
}

double ReservoirSpec::derivative_bound() const {
    return eval_poly(derivative_bound_poly, static_cast<double>(n));
}

namespace {

constexpr int kAbsoluteMaxLocality = 6;

void check_kernel_stochastic(const std::vector<double> &k, std::size_t dim, std::size_t gate_index) {
    if (k.size() != dim * dim) {
        throw Error(ErrorKind::kStochasticityViolation,
                    "gate " + std::to_string(gate_index) + " kernel has " + std::to_string(k.size()) + " entries");
    }
    for (std::size_t i = 0; i < dim; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double v = k[i * dim + j];
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorKind::kStochasticityViolation,
                            "gate " + std::to_string(gate_index) + " kernel entry outside [0,1]");
            }
            row += v;
        }
        if (std::abs(row - 1.0) > 1e-12) {
            throw Error(ErrorKind::kStochasticityViolation,
                        "gate " + std::to_string(gate_index) + " row " + std::to_string(i) + " sums to " +
                            std::to_string(row));
        }
    }
}

int expected_arity(StochasticGate::Kind kind) {
    switch (kind) {
        case StochasticGate::Kind::kFlip:
        case StochasticGate::Kind::kReset:
        case StochasticGate::Kind::kLeakyReset:
            return 1;
        case StochasticGate::Kind::kCopy:
        case StochasticGate::Kind::kXor:
        case StochasticGate::Kind::kCorrelatedFlip:
            return 2;
        default:
            return -1;
    }
}

}  // namespace

Reservoir build_reservoir(ReservoirSpec spec, int k_max, int depth_bound) {
    spec.k_max = k_max;
    spec.depth_bound = depth_bound;
    return build_reservoir(std::move(spec));
}

Reservoir build_reservoir(ReservoirSpec spec) {
    if (spec.n < 1 || spec.n > kMaxSampledBits) {
        throw Error(ErrorKind::kInvalidArgument, "n must be in [1, 63]");
    }
    if (spec.k_max < 1 || spec.k_max > kAbsoluteMaxLocality) {
        throw Error(ErrorKind::kLocalityViolation, "k_max must be a small constant in [1, 6]");
    }
    const int depth = spec.effective_depth_bound();
    if (static_cast<int>(spec.gates.size()) > depth) {
        throw Error(ErrorKind::kDepthViolation,
                    std::to_string(spec.gates.size()) + " gates per step exceed depth bound " + std::to_string(depth));
    }
    const double drive_bound = spec.drive_bound();
    if (!(drive_bound > 0.0)) {
        throw Error(ErrorKind::kInvalidArgument, "drive bound must be positive");
    }
    for (std::size_t gi = 0; gi < spec.gates.size(); ++gi) {
        const StochasticGate &gate = spec.gates[gi];
        if (gate.support.empty()) {
            throw Error(ErrorKind::kInvalidArgument, "gate " + std::to_string(gi) + " has empty support");
        }
        if (gate.arity() > spec.k_max) {
            throw Error(ErrorKind::kLocalityViolation, "gate " + std::to_string(gi) + " acts on " +
                                                           std::to_string(gate.arity()) + " bits, k_max is " +
                                                           std::to_string(spec.k_max));
        }
        int want = expected_arity(gate.kind);
        if (want > 0 && gate.arity() != want) {
            throw Error(ErrorKind::kInvalidArgument,
                        "gate " + std::to_string(gi) + " needs support of size " + std::to_string(want));
        }
        std::vector<int> sorted = gate.support;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0 ||
            sorted.back() >= spec.n) {
            throw Error(ErrorKind::kInvalidArgument, "gate " + std::to_string(gi) + " support out of range");
        }
        if (gate.kind == StochasticGate::Kind::kLeakyReset && !(gate.retain >= 0.0 && gate.retain <= 1.0)) {
            throw Error(ErrorKind::kStochasticityViolation, "leaky reset retain outside [0,1]");
        }
        const std::size_t dim = std::size_t{1} << gate.arity();
        check_kernel_stochastic(gate.kernel(0.0), dim, gi);

        if (!gate.depends_on_drive()) {
            continue;
        }
        // Central-difference probe of every kernel entry over the drive range.
        const double bound = gate.derivative_bound.value_or(spec.derivative_bound());
        const double lo = -drive_bound;
        const double hi = drive_bound;
        const double h = 1e-6 * std::max(1.0, drive_bound);
        for (int i = 0; i < kDerivativeProbePoints; ++i) {
            double u = lo + (hi - lo) * i / (kDerivativeProbePoints - 1);
            auto kp = gate.kernel(u + h);
            auto km = gate.kernel(u - h);
            check_kernel_stochastic(gate.kernel(u), dim, gi);
            for (std::size_t e = 0; e < kp.size(); ++e) {
                double slope = std::abs(kp[e] - km[e]) / (2.0 * h);
                if (slope > bound * (1.0 + 1e-9)) {
                    throw Error(ErrorKind::kDriveDerivativeViolation,
                                "gate " + std::to_string(gi) + " slope " + std::to_string(slope) + " at u=" +
                                    std::to_string(u) + " exceeds bound " + std::to_string(bound));
                }
            }
        }
    }
    if (spec.initial_distribution) {
        if (spec.initial_distribution->n() != spec.n) {
            throw Error(ErrorKind::kInvalidDistribution, "initial state has the wrong bit count");
        }
        spec.initial_distribution->validate();
    } else if (spec.n < 64 && spec.initial_bitstring >> spec.n) {
        throw Error(ErrorKind::kInvalidDistribution, "initial bitstring out of range");
    }
    return Reservoir(std::move(spec));
}

void apply_local_kernel(std::vector<double> &probs, int n, std::span<const int> support,
                        std::span<const double> kernel) {
    const std::size_t k = support.size();
    const std::size_t local = std::size_t{1} << k;
    std::vector<std::size_t> offsets(local, 0);
    std::size_t support_mask = 0;
    for (std::size_t l = 0; l < local; ++l) {
        for (std::size_t j = 0; j < k; ++j) {
            if (l >> j & 1u) {
                offsets[l] |= std::size_t{1} << support[j];
            }
        }
    }
    for (int b : support) {
        support_mask |= std::size_t{1} << b;
    }
    std::vector<double> in(local);
    std::vector<double> out(local);
    const std::size_t dim = std::size_t{1} << n;
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & support_mask) {
            continue;
        }
        for (std::size_t l = 0; l < local; ++l) {
            in[l] = probs[base | offsets[l]];
        }
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t from = 0; from < local; ++from) {
            double p = in[from];
            if (p == 0.0) {
                continue;
            }
            const double *row = kernel.data() + from * local;
            for (std::size_t to = 0; to < local; ++to) {
                out[to] += p * row[to];
            }
        }
        for (std::size_t l = 0; l < local; ++l) {
            probs[base | offsets[l]] = out[l];
        }
    }
}

void Reservoir::check_drive(double u) const {
    if (!std::isfinite(u)) {
        throw Error(ErrorKind::kNonfiniteDrive, "drive is not finite");
    }
    double bound = spec_.drive_bound();
    if (std::abs(u) > bound * (1.0 + 1e-12)) {
        throw Error(ErrorKind::kDriveOutOfRange,
                    "|u| = " + std::to_string(std::abs(u)) + " exceeds drive bound " + std::to_string(bound));
    }
}

BitstringDistribution Reservoir::initial_state() const {
    require_exact(spec_.n);
    if (spec_.initial_distribution) {
        return *spec_.initial_distribution;
    }
    return BitstringDistribution::point_mass(spec_.n, spec_.initial_bitstring);
}

void Reservoir::step_exact_inplace(std::vector<double> &probs, double u) const {
    check_drive(u);
    for (const auto &gate : spec_.gates) {
        auto k = gate.kernel(u);
        apply_local_kernel(probs, spec_.n, gate.support, k);
    }
    // Kernels are stochastic to 1e-12; renormalizing keeps long runs from
    // drifting out of the simplex through accumulated rounding.
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double &p : probs) {
        p /= total;
    }
}

BitstringDistribution Reservoir::step_exact(const BitstringDistribution &state, double u) const {
    require_exact(spec_.n);
    if (state.n() != spec_.n) {
        throw Error(ErrorKind::kInvalidDistribution, "state has the wrong bit count");
    }
    state.validate();
    std::vector<double> probs(state.probs().begin(), state.probs().end());
    step_exact_inplace(probs, u);
    return BitstringDistribution(spec_.n, std::move(probs));
}

std::vector<BitstringDistribution> Reservoir::run_exact(const InputSequence &inputs) const {
    require_exact(spec_.n);
    inputs.validate();
    if (inputs.size() <= inputs.washout_length) {
        throw Error(ErrorKind::kEmptyAfterWashout, std::to_string(inputs.size()) + " inputs with washout " +
                                                       std::to_string(inputs.washout_length));
    }
    BitstringDistribution init = initial_state();
    std::vector<double> probs(init.probs().begin(), init.probs().end());
    std::vector<BitstringDistribution> out;
    out.reserve(inputs.size() - inputs.washout_length);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        step_exact_inplace(probs, inputs.drive(t));
        if (t >= inputs.washout_length) {
            out.emplace_back(spec_.n, probs);
        }
    }
    return out;
}

TrajectoryEnsemble Reservoir::sample_trajectories(const InputSequence &inputs, std::size_t shots,
                                                  std::uint64_t seed, unsigned threads) const {
    inputs.validate();
    if (shots == 0) {
        throw Error(ErrorKind::kInvalidArgument, "shots must be >= 1");
    }
    if (inputs.size() <= inputs.washout_length) {
        throw Error(ErrorKind::kEmptyAfterWashout, std::to_string(inputs.size()) + " inputs with washout " +
                                                       std::to_string(inputs.washout_length));
    }
    const std::size_t total_steps = inputs.size();
    const std::size_t kept = total_steps - inputs.washout_length;
    const std::size_t num_gates = spec_.gates.size();

    // Kernels are shared by all shots: precompute per (step, gate).
    std::vector<std::vector<double>> kernels(total_steps * num_gates);
    for (std::size_t t = 0; t < total_steps; ++t) {
        double u = inputs.drive(t);
        check_drive(u);
        for (std::size_t g = 0; g < num_gates; ++g) {
            const auto &gate = spec_.gates[g];
            if (t > 0 && !gate.depends_on_drive()) {
                kernels[t * num_gates + g] = kernels[g];
            } else {
                kernels[t * num_gates + g] = gate.kernel(u);
            }
        }
    }

    std::vector<double> initial_cdf;
    if (spec_.initial_distribution) {
        auto p = spec_.initial_distribution->probs();
        initial_cdf.resize(p.size());
        std::partial_sum(p.begin(), p.end(), initial_cdf.begin());
    }

    TrajectoryEnsemble ens;
    ens.n = spec_.n;
    ens.shots = shots;
    ens.steps = kept;
    ens.washout = inputs.washout_length;
    ens.seed_root = seed;
    ens.samples.assign(shots * kept, 0);

    auto run_shot = [&](std::size_t s) {
        std::uint64_t state = spec_.initial_bitstring;
        if (!initial_cdf.empty()) {
            CounterStream rng(seed, s, 0);
            double r = rng.next_double() * initial_cdf.back();
            state = static_cast<std::uint64_t>(
                std::upper_bound(initial_cdf.begin(), initial_cdf.end(), r) - initial_cdf.begin());
            state = std::min<std::uint64_t>(state, initial_cdf.size() - 1);
        }
        for (std::size_t t = 0; t < total_steps; ++t) {
            CounterStream rng(seed, s, t + 1);
            for (std::size_t g = 0; g < num_gates; ++g) {
                const auto &support = spec_.gates[g].support;
                const auto &k = kernels[t * num_gates + g];
                const std::size_t local = std::size_t{1} << support.size();
                std::size_t from = 0;
                for (std::size_t j = 0; j < support.size(); ++j) {
                    from |= static_cast<std::size_t>(state >> support[j] & 1u) << j;
                }
                const double *row = k.data() + from * local;
                double r = rng.next_double();
                std::size_t to = local - 1;
                double acc = 0.0;
                for (std::size_t j = 0; j < local; ++j) {
                    acc += row[j];
                    if (r < acc) {
                        to = j;
                        break;
                    }
                }
                // A zero-probability tail entry is never selected by the fallback.
                while (row[to] == 0.0 && to > 0) {
                    --to;
                }
                for (std::size_t j = 0; j < support.size(); ++j) {
                    std::uint64_t bit = std::uint64_t{1} << support[j];
                    state = (to >> j & 1u) ? (state | bit) : (state & ~bit);
                }
            }
            if (t >= inputs.washout_length) {
                ens.samples[s * kept + (t - inputs.washout_length)] = state;
            }
        }
    };

    unsigned lanes = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(shots)));
    if (lanes == 1) {
        for (std::size_t s = 0; s < shots; ++s) {
            run_shot(s);
        }
    } else {
        std::vector<std::thread> workers;
        workers.reserve(lanes);
        for (unsigned lane = 0; lane < lanes; ++lane) {
            workers.emplace_back([&, lane] {
                for (std::size_t s = lane; s < shots; s += lanes) {
                    run_shot(s);
                }
            });
        }
        for (auto &w : workers) {
            w.join();
        }
    }
    return ens;
}

}  // namespace stochres
