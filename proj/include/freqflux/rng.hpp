/*
   Copyright 2026 The freqflux Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Boost 1.74
// ships no counter-based engine, so a small one lives here. A stream is fully
// identified by (seed, path, stream id); drawing from one stream never
// perturbs another, which keeps Monte-Carlo paths independent of scheduling.

#include <array>
#include <cstdint>
#include <limits>

namespace freqflux {

class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    /// Stream for (seed, path, stream). Counter words 0-1 hold the block index.
    Philox4x32(std::uint64_t seed, std::uint32_t path, std::uint32_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          base_{0, 0, path, stream} {}

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

    result_type operator()() {
        if (lane_ == 4) {
            Counter c = base_;
            c[0] = static_cast<std::uint32_t>(index_);
            c[1] = static_cast<std::uint32_t>(index_ >> 32);
            out_ = block(c, key_);
            ++index_;
            lane_ = 0;
        }
        return out_[lane_++];
    }

    void discard(unsigned long long z) {
        for (; z > 0; --z) (*this)();
    }

    /// Number of 4-word blocks generated so far.
    std::uint64_t blocks_used() const { return index_; }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    Key key_;
    Counter base_;
    Counter out_{};
    std::uint64_t index_ = 0;
    int lane_ = 4;
};

}  // namespace freqflux
