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

#include "stochres/rng.h"

#include "stochres/errors.h"

namespace stochres {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi, std::uint32_t &lo) noexcept {
    std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      base_{0,
            static_cast<std::uint32_t>(step),
            static_cast<std::uint32_t>(stream),
            static_cast<std::uint32_t>(stream >> 32) ^ (static_cast<std::uint32_t>(step >> 32) * kPhiloxW0)} {
}

void CounterStream::refill() noexcept {
    Philox4x32::Counter ctr = base_;
    ctr[0] = block_++;
    buffer_ = Philox4x32::generate(ctr, key_);
    available_ = 4;
}

std::uint64_t CounterStream::next_u64() noexcept {
    if (available_ < 2) {
        refill();
    }
    std::uint64_t hi = buffer_[4 - available_];
    std::uint64_t lo = buffer_[5 - available_];
    available_ -= 2;
    return (hi << 32) | lo;
}

double CounterStream::next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kInvalidArgument: return "InvalidArgument";
        case ErrorKind::kLocalityViolation: return "LocalityViolation";
        case ErrorKind::kDepthViolation: return "DepthViolation";
        case ErrorKind::kDriveDerivativeViolation: return "DriveDerivativeViolation";
        case ErrorKind::kStochasticityViolation: return "StochasticityViolation";
        case ErrorKind::kInvalidDistribution: return "InvalidDistribution";
        case ErrorKind::kNonfiniteDrive: return "NonfiniteDrive";
        case ErrorKind::kDriveOutOfRange: return "DriveOutOfRange";
        case ErrorKind::kEmptyAfterWashout: return "EmptyAfterWashout";
        case ErrorKind::kInsufficientTrials: return "InsufficientTrials";
        case ErrorKind::kExactModeOverflow: return "ExactModeOverflow";
        case ErrorKind::kMixedDimensions: return "MixedDimensions";
        case ErrorKind::kNegativeProbability: return "NegativeProbability";
        case ErrorKind::kInvalidSignals: return "InvalidSignals";
        case ErrorKind::kZeroTarget: return "ZeroTarget";
        case ErrorKind::kDegenerateSignals: return "DegenerateSignals";
        case ErrorKind::kMissingShotMetadata: return "MissingShotMetadata";
        case ErrorKind::kNotPSD: return "NotPSD";
        case ErrorKind::kEmptyRank: return "EmptyRank";
        case ErrorKind::kBasisNotOrthonormal: return "BasisNotOrthonormal";
        case ErrorKind::kNonpositiveSignal: return "NonpositiveSignal";
        case ErrorKind::kConditioningFailure: return "ConditioningFailure";
        case ErrorKind::kSearchBudgetExceeded: return "SearchBudgetExceeded";
        case ErrorKind::kOutOfRange: return "OutOfRange";
        case ErrorKind::kInvalidState: return "InvalidState";
        case ErrorKind::kSingularPath: return "SingularPath";
        case ErrorKind::kNumericCheckFailure: return "NumericCheckFailure";
        case ErrorKind::kUnknownExperiment: return "UnknownExperiment";
        case ErrorKind::kConfigValidation: return "ConfigValidation";
        case ErrorKind::kIOFailure: return "IOFailure";
    }
    return "Unknown";
}

}  // namespace stochres
