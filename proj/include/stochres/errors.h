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

#include <stdexcept>
#include <string>
#include <string_view>

namespace stochres {

enum class ErrorKind {
    kInvalidArgument,
    // reservoir_core
    kLocalityViolation,
    kDepthViolation,
    kDriveDerivativeViolation,
    kStochasticityViolation,
    kInvalidDistribution,
    kNonfiniteDrive,
    kDriveOutOfRange,
    kEmptyAfterWashout,
    kInsufficientTrials,
    kExactModeOverflow,
    // readout_transforms
    kMixedDimensions,
    kNegativeProbability,
    kInvalidSignals,
    // capacity_engine
    kZeroTarget,
    kDegenerateSignals,
    kMissingShotMetadata,
    kNotPSD,
    kEmptyRank,
    kBasisNotOrthonormal,
    // experiments
    kNonpositiveSignal,
    kConditioningFailure,
    kSearchBudgetExceeded,
    // quantum_embed
    kOutOfRange,
    kInvalidState,
    kSingularPath,
    kNumericCheckFailure,
    // cli_runner
    kUnknownExperiment,
    kConfigValidation,
    kIOFailure,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {
    }

    ErrorKind kind() const noexcept {
        return kind_;
    }

  private:
    ErrorKind kind_;
};

}  // namespace stochres
