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

#include <array>
#include <cstdint>

namespace stochres {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Stateless: the output depends only on (counter, key).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key) noexcept;
};

/// A reproducible random stream addressed by (seed, stream, step).
///
/// Two streams with different addresses never share counter blocks, so
/// work can be split across threads in any order and still reproduce the
/// same numbers. Within one address, draws advance a 32-bit block index.
class CounterStream {
  public:
    CounterStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double next_double() noexcept;

    bool next_bernoulli(double p) noexcept {
        return next_double() < p;
    }

  private:
    void refill() noexcept;

    Philox4x32::Key key_;
    Philox4x32::Counter base_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int available_ = 0;
};

}  // namespace stochres
