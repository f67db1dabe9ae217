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

#include "stochres/experiments.h"

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "stochres/errors.h"
#include "stochres/readout.h"
#include "stochres/rng.h"

namespace stochres {
namespace {

double trace_ipc(const ReservoirSpec &spec, std::size_t steps, std::uint64_t seed) {
    Reservoir res = build_reservoir(spec);
    auto drive = InputMeasure::binary(-1, 1, seed).sample(steps + 2 * static_cast<std::size_t>(spec.n));
    auto dists = res.run_exact(InputSequence::scalar(drive, 2 * static_cast<std::size_t>(spec.n)));
    return ipc_probability_rep(probability_signals(dists)).value;
}

TEST(ShiftRegister, ClosedForm) {
    for (double lambda : {0.0, 0.05, 0.2, 0.5}) {
        for (int n = 1; n <= 8; ++n) {
            double want = 1.0;
            for (int i = 1; i <= n; ++i) {
                want *= 1.0 + std::pow(1.0 - 2.0 * lambda, 2.0 * i);
            }
            EXPECT_NEAR(noisy_shift_register_ipc(n, lambda), want, 1e-12 * want);
        }
    }
    // Direct computation over a long binary drive.
    for (int n : {2, 4}) {
        double direct = trace_ipc(noisy_shift_register(n, 0.1), 20000, 3);
        EXPECT_NEAR(direct, noisy_shift_register_ipc(n, 0.1), 0.02 * direct);
    }
}

TEST(ShiftRegister, NoiselessVisitsEveryState) {
    for (int n = 1; n <= 8; ++n) {
        EXPECT_NEAR(trace_ipc(noisy_shift_register(n, 0.0), 6000, 5), std::ldexp(1.0, n), 1e-9) << n;
    }
}

TEST(ShiftRegister, FullyDepolarizingIsOne) {
    std::vector<int> ns = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    ScanBudget budget;
    budget.steps = 500;
    auto curve = scan_system_size(noisy_shift_register, ns, 0.5, InputMeasure::binary(-1, 1), budget);
    for (double v : curve.ipc) {
        EXPECT_NEAR(v, 1.0, 1e-9);
    }
}

TEST(ShiftRegister, ScanTracksClosedForm) {
    std::vector<int> ns = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto curve = scan_system_size(noisy_shift_register, ns, 0.05, InputMeasure::binary(-1, 1));
    ASSERT_EQ(curve.ipc.size(), ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        double want = noisy_shift_register_ipc(ns[i], 0.05);
        EXPECT_NEAR(curve.ipc[i], want, 4 * curve.ipc_stderr[i] + 0.02 * want) << ns[i];
    }
    EXPECT_TRUE(curve.ratio_strictly_decreasing);
    EXPECT_TRUE(curve.subexponential_consistent);
    EXPECT_LT(curve.log_ipc_vs_n.slope, std::numbers::ln2);
}

TEST(ShiftRegister, ExactModeLimit) {
    std::vector<int> ns = {kMaxScanBits + 1};
    try {
        scan_system_size(noisy_shift_register, ns, 0.05, InputMeasure::binary(-1, 1));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::kExactModeOverflow);
    }
}

TEST(FitLine, ExactLineAndNoise) {
    std::vector<double> x = {0, 1, 2, 3, 4};
    std::vector<double> y = {1, 3, 5, 7, 9};
    auto f = fit_line(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
    // Residuals (+1, -1, 0, +1, -1) about y = x: stderr = sqrt(4/3 / 10).
    std::vector<double> z = {1, 0, 2, 4, 3};
    auto g = fit_line(x, z);
    EXPECT_NEAR(g.slope, 0.8, 1e-14);
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = z[i] - (g.intercept + g.slope * x[i]);
        sse += r * r;
    }
    EXPECT_NEAR(g.slope_stderr, std::sqrt(sse / 3.0 / 10.0), 1e-12);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return v;
}

TEST(Tails, KnownForms) {
    auto grid = linspace(1, 100, 400);
    std::vector<double> inv_sq, pow2;
    for (double u : grid) {
        inv_sq.push_back(1.0 / (u * u));
    }
    auto fit = classify_tails(grid, inv_sq);
    EXPECT_EQ(fit.kind, TailFit::Kind::kPolynomial);
    EXPECT_NEAR(fit.degree, 2.0, 0.1);

    auto short_grid = linspace(1, 50, 400);
    std::vector<double> bumped;
    for (double u : short_grid) {
        pow2.push_back(std::exp2(-u));
        bumped.push_back(u * u * std::exp2(-u));
    }
    fit = classify_tails(short_grid, pow2);
    EXPECT_EQ(fit.kind, TailFit::Kind::kExponential);
    EXPECT_NEAR(fit.rate, std::numbers::ln2, 0.05 * std::numbers::ln2);
    fit = classify_tails(short_grid, bumped);
    EXPECT_EQ(fit.kind, TailFit::Kind::kExponential);
    EXPECT_NEAR(fit.rate, std::numbers::ln2, 0.10 * std::numbers::ln2);

    pow2[300] = 0.0;
    try {
        classify_tails(short_grid, pow2);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::kNonpositiveSignal);
    }
}

TEST(Tails, PlantedFamiliesRecovered) {
    CounterStream rng(17, 3, 0);
    auto grid = linspace(1, 60, 300);
    int correct = 0;
    for (int draw = 0; draw < 100; ++draw) {
        bool polynomial = draw % 2 == 0;
        double scale = 0.1 + rng.next_double();
        std::vector<double> v;
        if (polynomial) {
            double degree = 1.0 + 3.0 * rng.next_double();
            for (double u : grid) {
                v.push_back(scale * std::pow(u, -degree));
            }
        } else {
            double rate = 0.2 + 0.8 * rng.next_double();
            double prefactor = 2.0 * rng.next_double();
            for (double u : grid) {
                v.push_back(scale * std::pow(u, prefactor) * std::exp(-rate * u));
            }
        }
        auto fit = classify_tails(grid, v);
        auto want = polynomial ? TailFit::Kind::kPolynomial : TailFit::Kind::kExponential;
        correct += fit.kind == want ? 1 : 0;
    }
    EXPECT_GE(correct, 95);
}

TEST(Switching, SingleSignalIsConstant) {
    for (auto kind : {TailKind::kExponential, TailKind::kPolynomial}) {
        auto f = switching_family(kind, 1, 0, 1, 5.0, 101);
        for (double s : f.signals[0]) {
            EXPECT_NEAR(s, 1.0, 1e-15);
        }
        EXPECT_NEAR(f.confusion[0], 0.0, 1e-15);
    }
}

TEST(Switching, NormalizedAndPeaked) {
    for (auto kind : {TailKind::kExponential, TailKind::kPolynomial}) {
        for (std::size_t k : {2u, 4u, 7u}) {
            auto f = switching_family(kind, k, 0, 1, kind == TailKind::kExponential ? 12.0 : 0.05);
            EXPECT_LT(f.normalization_residual, 1e-9);
            for (std::size_t g = 0; g < f.grid.size(); ++g) {
                double total = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    total += f.signals[i][g];
                }
                EXPECT_NEAR(total, 1.0, 1e-12);
            }
            for (std::size_t i = 0; i < k; ++i) {
                EXPECT_NEAR(f.peaks[i], f.evaluate(f.centers[i])[i], 1e-15);
                EXPECT_NEAR(f.centers[i], (static_cast<double>(i) + 0.5) / static_cast<double>(k), 1e-15);
            }
        }
    }
    // Huge sharpness must not underflow into 0/0.
    auto sharp = switching_family(TailKind::kExponential, 4, 0, 1, 5000.0);
    EXPECT_LT(sharp.normalization_residual, 1e-9);
    EXPECT_NEAR(sharp.min_peak(), 1.0, 1e-12);
}

TEST(Switching, ExponentialBeatsPolynomialAtMatchedWidth) {
    auto sweep = sweep_exponential_beta(4, 0, 1, 0.99, 0.5, 0.01, 40.0);
    ASSERT_TRUE(sweep.selected.has_value());
    double beta = *sweep.selected;
    auto expo = switching_family(TailKind::kExponential, 4, 0, 1, beta);
    EXPECT_GE(expo.min_peak(), 0.99);
    auto below = switching_family(TailKind::kExponential, 4, 0, 1, beta - 0.01);
    EXPECT_LT(below.min_peak(), 0.99);
    // 2^(-beta w) = 1/2 at w = 1/beta, the half-width of the polynomial bump at s.
    EXPECT_NEAR(hwhm_matched_width(beta), 1.0 / beta, 1e-15);
    auto poly = switching_family(TailKind::kPolynomial, 4, 0, 1, hwhm_matched_width(beta));
    EXPECT_LT(poly.min_peak(), expo.min_peak());
}

TEST(PowerBasis, SmallCases) {
    auto m = InputMeasure::uniform(-1, 1, 4);
    auto one = power_basis_demo(1, 2000, m);
    EXPECT_EQ(one.numeric_rank, 2u);
    EXPECT_NEAR(one.capacity.value, 2.0, 0.01);
    auto three = power_basis_demo(3, 100000, m);
    EXPECT_EQ(three.columns, 8u);
    EXPECT_EQ(three.numeric_rank, 8u);
    EXPECT_NEAR(three.capacity.value, 8.0, 0.05);
}

using Big = boost::multiprecision::cpp_bin_float_100;

std::size_t big_rank(std::vector<std::vector<Big>> a, const Big &tol) {
    std::size_t rank = 0;
    std::size_t rows = a.size(), cols = a[0].size();
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        for (std::size_t r = rank; r < rows; ++r) {
            if (abs(a[r][c]) > abs(a[piv][c])) {
                piv = r;
            }
        }
        if (abs(a[piv][c]) <= tol) {
            continue;
        }
        std::swap(a[piv], a[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            Big f = a[r][c] / a[rank][c];
            for (std::size_t k = c; k < cols; ++k) {
                a[r][k] -= f * a[rank][k];
            }
        }
        ++rank;
    }
    return rank;
}

TEST(PowerBasis, SixBitsNeverReportsAWrongRank) {
    auto m = InputMeasure::uniform(-1, 1, 4);
    const std::size_t rows = 200;
    auto x = m.sample(rows, 0);
    std::vector<std::vector<Big>> a(rows, std::vector<Big>(64));
    for (std::size_t r = 0; r < rows; ++r) {
        Big p = 1;
        for (std::size_t j = 0; j < 64; ++j) {
            a[r][j] = p;
            p *= Big(x[r]);
        }
    }
    std::size_t true_rank = big_rank(a, Big("1e-80"));
    ASSERT_EQ(true_rank, 64u);
    try {
        auto rep = power_basis_demo(6, rows, m);
        EXPECT_EQ(rep.numeric_rank, true_rank);
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::kConditioningFailure);
        EXPECT_NE(std::string(e.what()).find("rank"), std::string::npos);
    }
}

TEST(Learnability, ClosedFormAndSimulation) {
    std::vector<std::size_t> grid = {1, 10, 100};
    auto zero = sample_complexity_curve(0.0, grid, 1000, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_EQ(zero.exact_all_zero[i], 1.0);
        EXPECT_EQ(zero.empirical_all_zero[i], 1.0);
    }
    for (double q : {0.01, 0.1}) {
        auto c = sample_complexity_curve(q, grid, 10000, 7);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double exact = 1.0;
            for (std::size_t k = 0; k < grid[i]; ++k) {
                exact *= 1.0 - q;
            }
            EXPECT_NEAR(c.exact_all_zero[i], exact, 1e-12);
            double sigma = std::sqrt(exact * (1 - exact) / 10000.0);
            EXPECT_NEAR(c.binomial_sigma[i], sigma, 1e-15);
            EXPECT_LE(std::abs(c.empirical_all_zero[i] - exact), 3 * sigma + 1e-12) << q << " " << grid[i];
            EXPECT_EQ(c.small_mq[i], static_cast<double>(grid[i]) * q < 0.1);
        }
    }
    auto c = sample_complexity_curve(0.01, std::vector<std::size_t>{10}, 1000, 1);
    EXPECT_NEAR(c.exact_all_zero[0], 0.904382075, 1e-9);
    EXPECT_THROW(sample_complexity_curve(0.1, grid, 999, 1), Error);
}

TEST(Learnability, DetectionSampleSize) {
    for (double q : {1.0, 0.5, 0.3, 0.1, 0.01, 1e-3}) {
        // Smallest m with (1 - q)^m <= 1/2, by counting.
        std::size_t m = 0;
        double miss = 1.0;
        while (miss > 0.5) {
            miss *= 1.0 - q;
            ++m;
        }
        EXPECT_EQ(detection_sample_size(q), m) << q;
    }
    std::vector<int> ns = {4, 8, 12, 16};
    auto rows = detection_schedule(ns);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto &r : rows) {
        EXPECT_NEAR(r.q, r.n * r.n / std::ldexp(1.0, r.n), 1e-15);
        EXPECT_NEAR(r.ln2_over_q, std::numbers::ln2 / r.q, 1e-9);
        EXPECT_EQ(r.m0, detection_sample_size(r.q));
    }
    EXPECT_LT(std::abs(rows.back().relative_gap), 0.01);
}

}  // namespace
}  // namespace stochres
