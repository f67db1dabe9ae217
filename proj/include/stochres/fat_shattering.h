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
#include <vector>

#include "json.hpp"
#include "stochres/experiments.h"

namespace stochres {

/// values[f][i]: function f evaluated on instance i, entries in [0, 1].
using FunctionTable = std::vector<std::vector<double>>;

inline constexpr std::size_t kMaxShatterInstances = 20;
inline constexpr std::size_t kMaxShatterFunctions = std::size_t{1} << 16;

struct ShatterWitness {
    std::vector<std::size_t> instances;
    std::vector<double> thresholds;
    /// Indexed by dichotomy: bit j set means instances[j] must sit above
    /// its threshold.
    std::vector<std::size_t> functions;
    double gamma = 0.0;
};

struct ShatterOptions {
    /// Fixed per-instance thresholds; searched when empty.
    std::optional<std::vector<double>> thresholds;
    /// Function-evaluation work allowed before giving up.
    std::uint64_t budget = 4'000'000'000ULL;
};

struct ShatterResult {
    std::size_t dimension = 0;
    ShatterWitness witness;
    std::uint64_t work = 0;
};

/// Largest d for which some d instances are gamma-shattered. Subsets and
/// threshold tuples are visited in lexicographic order and the first witness
/// found is returned.
ShatterResult fat_shattering_lower_bound(const FunctionTable &values, double gamma, const ShatterOptions &options = {});

/// Re-checks every dichotomy of a witness directly against the table.
bool verify_witness(const FunctionTable &values, const ShatterWitness &witness);

/// The 2^K subset sums of a switching family evaluated at its centers.
FunctionTable switching_subset_class(const SwitchingFamily &family);

nlohmann::json to_json(const ShatterWitness &witness);

}  // namespace stochres
