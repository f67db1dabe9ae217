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

#include "stochres/readout.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

#include "stochres/csv.h"
#include "stochres/errors.h"
#include "test_util.h"

namespace stochres {
namespace {

std::filesystem::path scratch(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / "stochres_readout_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

// moment[S] = sum over bitstrings x containing S of p(x), by enumeration.
std::vector<double> brute_moments(const std::vector<double> &p) {
    std::vector<double> m(p.size(), 0.0);
    for (std::size_t s = 0; s < p.size(); ++s) {
        for (std::size_t x = 0; x < p.size(); ++x) {
            if ((x & s) == s) {
                m[s] += p[x];
            }
        }
    }
    return m;
}

TEST(Zeta, MatchesEnumerationAndRoundTrips) {
    for (int n = 1; n <= 12; ++n) {
        CounterStream rng(5, 0, static_cast<std::uint64_t>(n));
        auto p = testing::random_distribution(std::size_t{1} << n, rng);
        auto m = moments_from_probabilities(p, n);
        if (n <= 10) {
            auto want = brute_moments(p);
            for (std::size_t s = 0; s < p.size(); ++s) {
                ASSERT_NEAR(m[s], want[s], 1e-12);
            }
        }
        EXPECT_NEAR(m[0], 1.0, 1e-12);
        auto back = probabilities_from_moments(m, n);
        for (std::size_t k = 0; k < p.size(); ++k) {
            ASSERT_NEAR(back[k], p[k], 1e-12);
        }
    }
}

TEST(Zeta, PointMassMoments) {
    // p concentrated on 101: moments are 1 exactly on subsets of 101.
    std::vector<double> p(8, 0.0);
    p[5] = 1.0;
    auto m = moments_from_probabilities(p, 3);
    std::vector<double> want = {1, 1, 0, 0, 1, 1, 0, 0};
    EXPECT_EQ(m, want);
}

TEST(Zeta, InconsistentMomentsAreRejected) {
    // <b0> = 0.2 but <b0 b1> = 0.5 cannot come from a distribution.
    std::vector<double> m = {1.0, 0.2, 0.6, 0.5};
    try {
        probabilities_from_moments(m, 2);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::kNegativeProbability);
    }
}

TEST(Zeta, SparseMasksAgreeWithDense) {
    CounterStream rng(8, 0, 0);
    auto p = testing::random_distribution(64, rng);
    auto dense = moments_from_probabilities(p, 6);
    std::vector<std::uint64_t> bits(64);
    for (std::size_t i = 0; i < 64; ++i) {
        bits[i] = i;
    }
    std::vector<std::uint64_t> masks = {0, 3, 17, 63};
    auto sparse = moments_for_masks(bits, p, masks);
    for (std::size_t i = 0; i < masks.size(); ++i) {
        EXPECT_NEAR(sparse[i], dense[masks[i]], 1e-15);
    }
}

TEST(Signals, ProbabilitySignalsRejectMixedSizes) {
    std::vector<BitstringDistribution> d = {BitstringDistribution::uniform(1), BitstringDistribution::uniform(2)};
    try {
        probability_signals(d);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::kMixedDimensions);
    }
}

TEST(Signals, EmpiricalCountsByHand) {
    TrajectoryEnsemble ens;
    ens.n = 2;
    ens.shots = 4;
    ens.steps = 2;
    ens.samples = {0, 3, 1, 3, 1, 3, 2, 0};  // shot-major
    SignalMatrix s = empirical_probabilities(ens);
    EXPECT_EQ(s.mode, SignalMode::kEmpiricalFrequency);
    EXPECT_EQ(*s.shots, 4u);
    EXPECT_DOUBLE_EQ(s.data(0, 0), 0.25);
    EXPECT_DOUBLE_EQ(s.data(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(s.data(0, 2), 0.25);
    EXPECT_DOUBLE_EQ(s.data(1, 3), 0.75);
    EXPECT_DOUBLE_EQ(s.data(1, 0), 0.25);
    EXPECT_NO_THROW(s.validate());
}

TEST(Signals, EmpiricalSparseBeyondExactMode) {
    TrajectoryEnsemble ens;
    ens.n = 30;
    ens.shots = 2;
    ens.steps = 1;
    ens.samples = {1ULL << 29, 5};
    SignalMatrix s = empirical_probabilities(ens);
    ASSERT_EQ(s.labels.size(), 2u);
    EXPECT_EQ(s.labels[0], 5u);
    EXPECT_EQ(s.labels[1], 1ULL << 29);
    EXPECT_DOUBLE_EQ(s.data(0, 0), 0.5);
}

TEST(Signals, MissingShotMetadata) {
    SignalMatrix s;
    s.mode = SignalMode::kEmpiricalFrequency;
    s.n = 1;
    s.data = Eigen::MatrixXd::Constant(2, 2, 0.5);
    s.labels = {0, 1};
    try {
        s.validate();
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::kMissingShotMetadata);
    }
}

TEST(Signals, MomentSignalsMatchZeta) {
    std::vector<BitstringDistribution> d;
    CounterStream rng(1, 2, 3);
    for (int t = 0; t < 5; ++t) {
        d.emplace_back(3, testing::random_distribution(8, rng));
    }
    SignalMatrix p = probability_signals(d);
    SignalMatrix m = moment_signals(p);
    EXPECT_NO_THROW(m.validate());
    for (int t = 0; t < 5; ++t) {
        std::vector<double> row(d[static_cast<std::size_t>(t)].probs().begin(), d[static_cast<std::size_t>(t)].probs().end());
        auto want = brute_moments(row);
        for (Eigen::Index k = 0; k < 8; ++k) {
            EXPECT_NEAR(m.data(t, k), want[static_cast<std::size_t>(k)], 1e-15);
        }
    }
}

TEST(Signals, NoiseFloorFlagsRareColumns) {
    SignalMatrix s;
    s.mode = SignalMode::kEmpiricalFrequency;
    s.n = 1;
    s.shots = 100;
    s.labels = {0, 1};
    s.data.resize(1000, 2);
    for (Eigen::Index t = 0; t < 1000; ++t) {
        double rare = t == 0 ? 0.01 : 0.0;
        s.data(t, 0) = 1.0 - rare;
        s.data(t, 1) = rare;
    }
    auto flagged = noise_floor_columns(s);
    ASSERT_EQ(flagged.size(), 1u);
    EXPECT_EQ(flagged[0], 1u);
}

TEST(Csv, RoundTripIsBitExact) {
    std::vector<std::vector<double>> rows = {
        {0.1, 1.0 / 3.0, -2.5e-300},
        {std::numeric_limits<double>::max(), std::numeric_limits<double>::denorm_min(), 123456789.123456789},
        {std::nextafter(1.0, 2.0), -0.0, 6.02214076e23},
    };
    auto path = scratch("roundtrip.csv");
    io::write_csv(path, {"a", "b", "c"}, rows);
    io::CsvTable back = io::read_csv(path);
    ASSERT_EQ(back.header, (std::vector<std::string>{"a", "b", "c"}));
    ASSERT_EQ(back.rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            EXPECT_EQ(std::memcmp(&back.rows[i][j], &rows[i][j], sizeof(double)), 0) << i << "," << j;
        }
    }
}

TEST(Csv, SignalsRoundTrip) {
    std::vector<BitstringDistribution> d;
    CounterStream rng(4, 4, 4);
    for (int t = 0; t < 7; ++t) {
        d.emplace_back(2, testing::random_distribution(4, rng));
    }
    SignalMatrix p = probability_signals(d);
    auto path = scratch("signals.csv");
    write_signals_csv(p, path);
    SignalMatrix back = read_signals_csv(path, 2, SignalMode::kExactProbability);
    EXPECT_EQ(back.labels, p.labels);
    EXPECT_TRUE(back.data == p.data);

    auto prefix = scratch("signals_bin");
    write_signals_binary(p, prefix);
    SignalMatrix bin = read_signals_binary(prefix);
    EXPECT_EQ(bin.mode, p.mode);
    EXPECT_TRUE(bin.data == p.data);
}

}  // namespace
}  // namespace stochres
