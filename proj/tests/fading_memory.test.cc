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

#include "stochres/fading_memory.h"

#include <gtest/gtest.h>

#include <cmath>

#include "stochres/errors.h"

namespace stochres {
namespace {

Reservoir leaky(double retain) {
    ReservoirSpec spec;
    spec.n = 1;
    spec.gates.push_back(StochasticGate::leaky_reset(0, retain, DriveFunction::polynomial({0.5, 0.5})));
    return build_reservoir(spec);
}

// p_t = sum_j retain^j (1 - retain) (1 + u_{t-j}) / 2, so with the last h
// inputs pinned the rest contribute variance
// (1 - retain)^2 Var(u) / 4 * retain^{2h} / (1 - retain^2).
double leaky_closed_form(double retain, std::size_t h) {
    double var_u = 1.0 / 3.0;
    return (1.0 - retain) * (1.0 - retain) * var_u / 4.0 * std::pow(retain, 2.0 * static_cast<double>(h)) /
           (1.0 - retain * retain);
}

TEST(FadingMemory, LeakyResetMatchesClosedForm) {
    const double retain = 0.6;
    FadingMemoryOptions opts;
    opts.history_length = 60;
    for (std::size_t h : {1u, 2u, 4u}) {
        auto rep = fading_memory_error(leaky(retain), h, InputMeasure::uniform(-1.0, 1.0), 200, opts);
        double want = leaky_closed_form(retain, h);
        EXPECT_NEAR(rep.per_component[1], want, 0.1 * want) << "h=" << h;
        EXPECT_NEAR(rep.per_component[0], want, 0.1 * want) << "h=" << h;
    }
}

TEST(FadingMemory, ErrorDecreasesWithWindow) {
    FadingMemoryOptions opts;
    opts.history_length = 40;
    double prev = 1.0;
    for (std::size_t h = 1; h <= 6; ++h) {
        auto rep = fading_memory_error(leaky(0.5), h, InputMeasure::uniform(-1.0, 1.0), 50, opts);
        EXPECT_LT(rep.mean_error, prev);
        prev = rep.mean_error;
    }
}

TEST(FadingMemory, MemorylessResetHasNoError) {
    auto rep = fading_memory_error(leaky(0.0), 1, InputMeasure::uniform(-1.0, 1.0), 20);
    EXPECT_LT(rep.max_error, 1e-28);
}

TEST(FadingMemory, TooFewTrials) {
    try {
        fading_memory_error(leaky(0.5), 1, InputMeasure::uniform(-1.0, 1.0), 9);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::kInsufficientTrials);
    }
}

}  // namespace
}  // namespace stochres
