// Copyright 2026 The SQSNN Authors
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

#include <cstdint>
#include <limits>
#include <type_traits>

namespace sqsnn {

// Counter-based random streams.
//
// Every random draw in the library is addressed by a key derived from the
// master seed and a tuple of tags (item, pass, neuron, time step, purpose).
// Draw n of a stream is a pure function of (key, n), so results do not depend
// on thread scheduling or on the order in which neurons are stepped.

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Purpose tags keep streams drawn for different reasons independent.
enum class Purpose : std::uint64_t {
    kSpike = 1,
    kShots = 2,
    kSpsa = 3,
    kPsr = 4,
    kEncode = 5,
    kInit = 6,
    kShuffle = 7,
    kNoise = 8,
    kPass = 9,
    kEval = 10,
    kOracle = 11,
    kItem = 12,
    kIteration = 13,
};

/// SplitMix64 sequence rooted at a fixed key. Satisfies UniformRandomBitGenerator.
class Stream {
   public:
    using result_type = std::uint64_t;

    explicit constexpr Stream(std::uint64_t key) noexcept : key_(key) {
    }

    static constexpr result_type min() noexcept {
        return 0;
    }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::kGolden);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) noexcept {
        return uniform() < p;
    }

    /// +1 or -1 with equal probability.
    int rademacher() noexcept {
        return ((*this)() >> 63) ? 1 : -1;
    }

    std::uint64_t counter() const noexcept {
        return counter_;
    }

   private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Hierarchical key: derive children by tags, open a Stream at any node.
class StreamKey {
   public:
    constexpr StreamKey() noexcept = default;
    explicit constexpr StreamKey(std::uint64_t seed) noexcept : key_(detail::mix64(seed + detail::kGolden)) {
    }

    constexpr StreamKey child(std::uint64_t tag) const noexcept {
        StreamKey k;
        k.key_ = detail::mix64(key_ ^ detail::mix64(tag * detail::kGolden + 0x632BE59BD9B4E019ULL));
        return k;
    }

    constexpr StreamKey child(Purpose p) const noexcept {
        return child(static_cast<std::uint64_t>(p) + (1ULL << 40));
    }

    template <typename... Tags>
    constexpr StreamKey derive(Tags... tags) const noexcept {
        StreamKey k = *this;
        ((k = k.child(tag_value(tags))), ...);
        return k;
    }

    constexpr Stream stream() const noexcept {
        return Stream(key_);
    }

    constexpr std::uint64_t value() const noexcept {
        return key_;
    }

    friend constexpr bool operator==(const StreamKey &, const StreamKey &) = default;

   private:
    template <typename T>
    static constexpr std::uint64_t tag_value(T tag) noexcept {
        if constexpr (std::is_same_v<T, Purpose>) {
            return static_cast<std::uint64_t>(tag) + (1ULL << 40);
        } else {
            return static_cast<std::uint64_t>(tag);
        }
    }

    std::uint64_t key_ = 0;
};

}  // namespace sqsnn
