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
#include <vector>

#include "stochres/inputs.h"
#include "stochres/reservoir.h"

namespace stochres {

struct FadingMemoryOptions {
    std::size_t resamples = 32;         // older histories per fixed recent window
    std::size_t history_length = 200;   // inputs preceding the recent window
    std::uint64_t seed = 0x5eedULL;
};

struct FadingMemoryReport {
    std::size_t window = 0;
    std::size_t trials = 0;
    std::vector<double> per_component;  // one entry per bitstring probability
    double mean_error = 0.0;            // average over components
    double max_error = 0.0;
};

/// Monte Carlo estimate of E[(x_k(t) - x_k^h[U^{-h}(t)])^2] where x_k^h is the
/// best predictor from the last h inputs.
///
/// For each trial a recent window of h inputs is drawn from `measure` and
/// held fixed while `resamples` older histories are drawn; the conditional
/// mean over those histories estimates x_k^h, and the unbiased sample
/// variance around it estimates the error. Trials are averaged.
FadingMemoryReport fading_memory_error(const Reservoir &reservoir, std::size_t window, const InputMeasure &measure,
                                       std::size_t trials, const FadingMemoryOptions &options = {});

}  // namespace stochres
