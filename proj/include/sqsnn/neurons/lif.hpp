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

// Classical leaky integrate-and-fire baseline. The membrane is gated to zero
// on the step after a spike:  u_t = decay * u_{t-1} * (1 - s_{t-1}) + w . x_t.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "sqsnn/errors.hpp"

namespace sqsnn {

struct LifConfig {
    double decay = 0.9;
    double threshold = 1.0;
    int fan_in = 0;

    void validate() const {
        if (!(decay > 0 && decay < 1)) {
            throw ConfigError("LIF decay must lie in (0, 1)");
        }
        if (!std::isfinite(threshold)) {
            throw ConfigError("LIF threshold must be finite");
        }
    }
};

struct LifParams {
    Eigen::VectorXd weights;

    void validate(const LifConfig &cfg) const {
        if (weights.size() != cfg.fan_in) {
            throw ConfigError("LIF weight vector must have fan-in " + std::to_string(cfg.fan_in) + " entries");
        }
        if (!weights.allFinite()) {
            throw ConfigError("LIF weights must be finite");
        }
    }
};

struct LifState {
    double potential = 0;
    bool spiked = false;
};

struct LifStep {
    bool spike = false;
    double potential = 0;
    double surrogate_slope = 0;  // d/du of the arctan surrogate at u - threshold
    LifState next;
};

/// Derivative of (1/pi) atan(pi v) + 1/2, the smooth stand-in for a step at 0.
inline double arctan_surrogate_slope(double v) noexcept {
    const double a = std::numbers::pi * v;
    return 1.0 / (1.0 + a * a);
}

inline LifStep lif_step(const LifState &state, const LifParams &params, const LifConfig &cfg,
                        std::span<const std::uint8_t> x) {
    if (static_cast<Eigen::Index>(x.size()) != params.weights.size()) {
        throw InvalidArgument("lif_step: " + std::to_string(x.size()) + " inputs for fan-in " +
                              std::to_string(params.weights.size()));
    }
    double drive = 0;
    for (std::size_t p = 0; p < x.size(); ++p) {
        if (x[p] != 0) {
            drive += params.weights[static_cast<Eigen::Index>(p)];
        }
    }
    LifStep out;
    out.potential = cfg.decay * state.potential * (state.spiked ? 0.0 : 1.0) + drive;
    out.spike = out.potential > cfg.threshold;
    out.surrogate_slope = arctan_surrogate_slope(out.potential - cfg.threshold);
    out.next = LifState{out.potential, out.spike};
    return out;
}

}  // namespace sqsnn
