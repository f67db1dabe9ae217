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

#include <filesystem>
#include <string>

#include "json.hpp"
#include "stochres/reservoir.h"

namespace stochres {

/// ReservoirSpec <-> JSON:
///   {"n", "k_max", "depth_bound", "gates": [{"support", "kernel_kind", "params"}],
///    "initial_state": bitstring integer | probability array,
///    "drive_bound_poly", "derivative_bound_poly"}
/// Unknown keys are rejected.
nlohmann::json reservoir_spec_to_json(const ReservoirSpec &spec);
ReservoirSpec reservoir_spec_from_json(const nlohmann::json &doc);

/// Writes `<prefix>.bin` (little-endian uint64, row-major shots x steps) and
/// `<prefix>.json` (n, S, T, seed, washout). Returns the two paths.
std::pair<std::filesystem::path, std::filesystem::path> write_ensemble(
    const TrajectoryEnsemble &ens, const std::filesystem::path &prefix);
TrajectoryEnsemble read_ensemble(const std::filesystem::path &prefix);

namespace json_util {

/// Throws ConfigValidation naming the first key of `obj` not in `allowed`.
void reject_unknown_keys(const nlohmann::json &obj, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

}  // namespace json_util

}  // namespace stochres
