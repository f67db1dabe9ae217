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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stochres/capacity.h"
#include "stochres/inputs.h"
#include "stochres/reservoir.h"

namespace stochres {

// ---------------------------------------------------------------------------
// System-size scans

using ReservoirFamily = std::function<ReservoirSpec(int n, double noise)>;

/// Shift register driven by a binary input: copies move every bit one place
/// up, bit 0 is reset to 1 with probability (1 + u)/2, and each bit then
/// flips independently with probability `noise`.
ReservoirSpec noisy_shift_register(int n, double noise);

/// Closed-form long-run IPC of noisy_shift_register under a uniform +-1
/// input: prod_{i=1..n} (1 + (1 - 2 noise)^(2i)).
double noisy_shift_register_ipc(int n, double noise);

inline constexpr int kMaxScanBits = 12;

struct ScanBudget {
    std::size_t steps = 4000;   // post-washout steps per n
    std::size_t washout = 0;    // 0 selects 2n
    std::size_t batches = 10;   // batch-means error bars
    std::uint64_t seed = 1;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct ScalingCurve {
    std::vector<int> n;
    std::vector<double> ipc;
    std::vector<double> ipc_stderr;
    double noise = 0.0;
    LinearFit log_ipc_vs_n;
    LinearFit log_ipc_vs_log_n;
    bool subexponential_consistent = false;
    bool ratio_strictly_decreasing = false;  // IPC(n) / 2^n, recorded only
};

ScalingCurve scan_system_size(const ReservoirFamily &family, std::span<const int> n_values, double noise,
                              const InputMeasure &measure, const ScanBudget &budget = {});

// ---------------------------------------------------------------------------
// Tail classification

struct TailFit {
    enum class Kind { kPolynomial, kExponential, kInconclusive };

    Kind kind = Kind::kInconclusive;
    double degree = 0.0;  // from log p against log(u - origin)
    double rate = 0.0;    // from log p against u
    double residual_polynomial = 0.0;
    double residual_exponential = 0.0;
    double region_lo = 0.0;
    double region_hi = 0.0;
    std::size_t points = 0;
};

const char *tail_kind_name(TailFit::Kind kind);

struct TailRegion {
    double lo = 0.0;
    double hi = 0.0;
};

/// Defaults to the upper half of the grid. `origin` shifts the log axis of
/// the polynomial fit, e.g. to a bump center.
TailFit classify_tails(std::span<const double> grid, std::span<const double> values,
                       std::optional<TailRegion> region = std::nullopt, double origin = 0.0);

// ---------------------------------------------------------------------------
// Switching signals

enum class TailKind { kExponential, kPolynomial };

const char *tail_family_name(TailKind kind);

struct SwitchingFamily {
    TailKind kind = TailKind::kExponential;
    std::size_t k = 1;
    double sharpness = 0.0;  // beta for exponential, s for polynomial
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> centers;
    std::vector<double> grid;
    std::vector<std::vector<double>> signals;  // k rows over the grid
    std::vector<double> peaks;                 // signal i evaluated at its own center
    std::vector<double> confusion;
    double normalization_residual = 0.0;

    double min_peak() const;

    /// All k normalized signals at drive u.
    std::vector<double> evaluate(double u) const;
};

SwitchingFamily switching_family(TailKind kind, std::size_t k, double lo, double hi, double sharpness,
                                 std::size_t grid_points = 1001);

/// Half-width at half-maximum of 2^(-beta |x|) is 1/beta; the Lorentzian
/// (1 + (x/s)^2)^(-1) has half-width s.
double hwhm_matched_width(double beta);

struct BetaSweep {
    std::vector<double> beta;
    std::vector<double> min_peak;
    std::optional<double> selected;  // smallest beta reaching the target
};

BetaSweep sweep_exponential_beta(std::size_t k, double lo, double hi, double target_min_peak, double beta_start,
                                 double beta_step, double beta_stop);

// ---------------------------------------------------------------------------
// Deterministic power basis

struct PowerBasisReport {
    int n = 0;
    std::size_t rows = 0;
    std::size_t columns = 0;  // 2^n
    std::size_t numeric_rank = 0;
    double rank_tolerance = kDefaultRankTolerance;
    std::vector<double> g1_eigenvalues;  // descending
    IPCReport capacity;
};

inline constexpr int kMaxPowerBasisBits = 6;

/// Columns x^j, j = 0 .. 2^n - 1 (every product of the signals x^(2^i)),
/// scored against Legendre targets of degree up to 2^n - 1 + extra_degrees.
PowerBasisReport power_basis_demo(int n, std::size_t rows, const InputMeasure &measure, int extra_degrees = 3);

// ---------------------------------------------------------------------------
// Learnability

struct LearnabilityCurve {
    double q = 0.0;
    std::size_t trials = 0;
    std::vector<std::size_t> m0;
    std::vector<double> exact_all_zero;  // (1 - q)^m0
    std::vector<double> empirical_all_zero;
    std::vector<double> binomial_sigma;  // sqrt(p (1 - p) / trials) at the exact p
    std::vector<double> approximation;   // m0 q
    std::vector<bool> small_mq;          // m0 q < 0.1
};

inline constexpr std::size_t kMinLearnabilityTrials = 1000;

LearnabilityCurve sample_complexity_curve(double q, std::span<const std::size_t> m0_grid, std::size_t trials,
                                          std::uint64_t seed);

/// Smallest m0 with 1 - (1 - q)^m0 >= 1/2.
std::size_t detection_sample_size(double q);

struct DetectionRow {
    int n = 0;
    double q = 0.0;
    std::size_t m0 = 0;
    double ln2_over_q = 0.0;
    double relative_gap = 0.0;  // m0 / (ln2 / q) - 1
};

/// q(n) = n^2 / 2^n.
std::vector<DetectionRow> detection_schedule(std::span<const int> n_values);

// ---------------------------------------------------------------------------

nlohmann::json to_json(const LinearFit &fit);
nlohmann::json to_json(const ScalingCurve &curve);
nlohmann::json to_json(const TailFit &fit);
nlohmann::json to_json(const SwitchingFamily &family);
nlohmann::json to_json(const PowerBasisReport &report);
nlohmann::json to_json(const LearnabilityCurve &curve);

}  // namespace stochres
