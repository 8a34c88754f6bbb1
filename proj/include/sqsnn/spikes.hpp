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
#include <span>
#include <string>
#include <vector>

#include "sqsnn/errors.hpp"

namespace sqsnn {

/// Binary raster of shape (steps x channels). Time is zero-based.
class SpikeTrain {
   public:
    SpikeTrain() = default;
    SpikeTrain(int steps, int channels) : steps_(steps), channels_(channels) {
        if (steps < 0 || channels < 0) {
            throw InvalidArgument("SpikeTrain: negative shape");
        }
        bits_.assign(static_cast<std::size_t>(steps) * static_cast<std::size_t>(channels), 0);
    }

    int steps() const noexcept {
        return steps_;
    }
    int channels() const noexcept {
        return channels_;
    }

    std::uint8_t at(int t, int c) const {
        check(t, c);
        return bits_[index(t, c)];
    }

    void set(int t, int c, bool v) {
        check(t, c);
        bits_[index(t, c)] = v ? 1 : 0;
    }

    std::span<const std::uint8_t> row(int t) const {
        check(t, 0);
        return {bits_.data() + index(t, 0), static_cast<std::size_t>(channels_)};
    }

    std::span<std::uint8_t> row(int t) {
        check(t, 0);
        return {bits_.data() + index(t, 0), static_cast<std::size_t>(channels_)};
    }

    std::uint64_t count() const noexcept {
        std::uint64_t n = 0;
        for (auto b : bits_) {
            n += b;
        }
        return n;
    }

    std::uint64_t channel_count(int c) const {
        std::uint64_t n = 0;
        for (int t = 0; t < steps_; ++t) {
            n += at(t, c);
        }
        return n;
    }

    const std::vector<std::uint8_t> &raw() const noexcept {
        return bits_;
    }

    friend bool operator==(const SpikeTrain &, const SpikeTrain &) = default;

   private:
    std::size_t index(int t, int c) const noexcept {
        return static_cast<std::size_t>(t) * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(c);
    }
    void check(int t, int c) const {
        if (t < 0 || t >= steps_ || c < 0 || (c >= channels_ && !(c == 0 && channels_ == 0))) {
            throw InvalidArgument("SpikeTrain: index (" + std::to_string(t) + ", " + std::to_string(c) +
                                  ") out of range");
        }
    }

    int steps_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// One spike train per neuron, indexed like NetworkGraph::neurons.
using NeuronTrains = std::vector<SpikeTrain>;

}  // namespace sqsnn
