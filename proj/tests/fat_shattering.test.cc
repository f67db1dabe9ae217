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

#include "stochres/fat_shattering.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "stochres/errors.h"
#include "stochres/rng.h"

namespace stochres {
namespace {

bool shattered(const FunctionTable &t, const std::vector<std::size_t> &inst, const std::vector<double> &r, double gamma) {
    std::size_t d = inst.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        bool found = false;
        for (const auto &f : t) {
            bool ok = true;
            for (std::size_t j = 0; j < d && ok; ++j) {
                double v = f[inst[j]];
                ok = (mask >> j & 1) ? v >= r[j] + gamma : v <= r[j] - gamma;
            }
            if (ok) {
                found = true;
                break;
            }
        }
        if (!found) {
            return false;
        }
    }
    return true;
}

// Values on a 1/8 grid with gamma = 1/4: every feasible threshold interval
// has grid endpoints, so trying r in {k/8} is exhaustive.
std::size_t brute_dimension(const FunctionTable &t, double gamma) {
    std::size_t m = t[0].size();
    std::size_t best = 0;
    for (std::size_t subset = 1; subset < (std::size_t{1} << m); ++subset) {
        std::vector<std::size_t> inst;
        for (std::size_t i = 0; i < m; ++i) {
            if (subset >> i & 1) {
                inst.push_back(i);
            }
        }
        if (inst.size() <= best) {
            continue;
        }
        std::vector<std::size_t> digits(inst.size(), 0);
        while (true) {
            std::vector<double> r;
            for (auto k : digits) {
                r.push_back(static_cast<double>(k) / 8.0);
            }
            if (shattered(t, inst, r, gamma)) {
                best = inst.size();
                break;
            }
            std::size_t j = 0;
            while (j < digits.size() && ++digits[j] == 9) {
                digits[j++] = 0;
            }
            if (j == digits.size()) {
                break;
            }
        }
    }
    return best;
}

TEST(FatShattering, TrivialClasses) {
    FunctionTable single = {{0.3, 0.7, 0.1}};
    EXPECT_EQ(fat_shattering_lower_bound(single, 0.1, {.thresholds = std::nullopt}).dimension, 0u);
    FunctionTable two = {{0.0}, {1.0}};
    auto r = fat_shattering_lower_bound(two, 0.4);
    EXPECT_EQ(r.dimension, 1u);
    EXPECT_NEAR(r.witness.thresholds[0], 0.5, 1e-15);
    EXPECT_TRUE(verify_witness(two, r.witness));
    EXPECT_EQ(fat_shattering_lower_bound(two, 0.6).dimension, 0u);
}

TEST(FatShattering, MatchesBruteForceOnRandomTables) {
    CounterStream rng(23, 4, 0);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t funcs = 4 + rng.next_u64() % 12;
        FunctionTable t(funcs, std::vector<double>(5));
        for (auto &f : t) {
            for (auto &v : f) {
                v = static_cast<double>(rng.next_u64() % 9) / 8.0;
            }
        }
        auto r = fat_shattering_lower_bound(t, 0.25);
        EXPECT_EQ(r.dimension, brute_dimension(t, 0.25)) << trial;
        if (r.dimension > 0) {
            EXPECT_TRUE(verify_witness(t, r.witness));
            EXPECT_TRUE(shattered(t, r.witness.instances, r.witness.thresholds, 0.25));
        }
    }
}

TEST(FatShattering, SwitchingClassShattersItsCenters) {
    auto sweep = sweep_exponential_beta(4, 0, 1, 0.99, 0.5, 0.01, 40.0);
    ASSERT_TRUE(sweep.selected);
    auto family = switching_family(TailKind::kExponential, 4, 0, 1, *sweep.selected);
    FunctionTable t = switching_subset_class(family);
    ASSERT_EQ(t.size(), 16u);
    auto r = fat_shattering_lower_bound(t, 0.3, {.thresholds = std::vector<double>(4, 0.5)});
    EXPECT_GE(r.dimension, 2u);
    EXPECT_EQ(r.dimension, 4u);
    EXPECT_TRUE(verify_witness(t, r.witness));
    EXPECT_TRUE(shattered(t, r.witness.instances, r.witness.thresholds, 0.3));
}

TEST(FatShattering, TamperedWitnessFails) {
    FunctionTable two = {{0.0, 1.0}, {1.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}};
    auto r = fat_shattering_lower_bound(two, 0.4);
    ASSERT_EQ(r.dimension, 2u);
    auto bad = r.witness;
    bad.thresholds[0] = 0.9;
    EXPECT_FALSE(verify_witness(two, bad));
    bad = r.witness;
    std::swap(bad.functions[0], bad.functions[3]);
    EXPECT_FALSE(verify_witness(two, bad));
}

TEST(FatShattering, BudgetAndLimits) {
    FunctionTable t(64, std::vector<double>(10));
    CounterStream rng(5, 5, 0);
    for (auto &f : t) {
        for (auto &v : f) {
            v = rng.next_double();
        }
    }
    try {
        fat_shattering_lower_bound(t, 0.05, {.thresholds = std::nullopt, .budget = 1000});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::kSearchBudgetExceeded);
    }
    FunctionTable wide(2, std::vector<double>(kMaxShatterInstances + 1, 0.5));
    EXPECT_THROW(fat_shattering_lower_bound(wide, 0.1), Error);
    FunctionTable out_of_range = {{1.5}};
    EXPECT_THROW(fat_shattering_lower_bound(out_of_range, 0.1), Error);
}

}  // namespace
}  // namespace stochres
