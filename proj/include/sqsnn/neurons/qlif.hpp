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

// Single-qubit quantum leaky integrate-and-fire neuron with threshold firing.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "sqsnn/errors.hpp"
#include "sqsnn/rng.hpp"

namespace sqsnn {

struct QlifConfig {
    double threshold = 0.5;
    double beta = 1.0;
    double t1 = 1.0;
    int shots = 0;  // 0 = exact excitation probability
    int fan_in = 0;

    void validate() const {
        if (!(threshold >= 0 && threshold <= 1)) {
            throw ConfigError("QLIF threshold must lie in [0, 1]");
        }
        if (!(beta > 0) || !(t1 > 0)) {
            throw ConfigError("QLIF beta and T1 must be positive");
        }
        if (shots < 0) {
            throw ConfigError("QLIF shot count is negative");
        }
    }
};

struct QlifParams {
    Eigen::VectorXd w_excite;  // drives the integrating branch
    Eigen::VectorXd w_leak;    // sets the leak rate

    void validate(const QlifConfig &cfg) const {
        if (w_excite.size() != cfg.fan_in || w_leak.size() != cfg.fan_in) {
            throw ConfigError("QLIF weight vectors must have fan-in " + std::to_string(cfg.fan_in) + " entries");
        }
        if (!w_excite.allFinite() || !w_leak.allFinite()) {
            throw ConfigError("QLIF weights must be finite");
        }
    }
};

struct QlifState {
    double alpha = 0;  // excitation probability of the previous step
    bool spiked = false;
};

struct QlifStep {
    bool spike = false;
    double alpha = 0;        // value compared against the threshold
    double alpha_exact = 0;  // sin^2(phi / 2)
    double phi = 0;
    double phi_carry = 0;  // recovered phase before this step's input
    double excite_current = 0;
    double leak_current = 0;
    QlifState next;
};

/// Excitation carried into the next step: zero right after a spike.
inline double qlif_carried_alpha(const QlifState &s) noexcept {
    return s.spiked ? 0.0 : s.alpha;
}

inline QlifStep qlif_step(const QlifState &state, const QlifParams &params, const QlifConfig &cfg,
                          std::span<const std::uint8_t> x, Stream *shot_rng = nullptr) {
    if (static_cast<Eigen::Index>(x.size()) != params.w_excite.size() ||
        params.w_excite.size() != params.w_leak.size()) {
        throw InvalidArgument("qlif_step: " + std::to_string(x.size()) + " inputs for fan-in " +
                              std::to_string(params.w_excite.size()));
    }
    QlifStep out;
    for (std::size_t p = 0; p < x.size(); ++p) {
        if (x[p] != 0) {
            out.excite_current += params.w_excite[static_cast<Eigen::Index>(p)];
            out.leak_current += params.w_leak[static_cast<Eigen::Index>(p)];
        }
    }
    const double carried = std::clamp(qlif_carried_alpha(state), 0.0, 1.0);
    out.phi_carry = 2 * std::asin(std::sqrt(carried));
    double delta;
    if (out.excite_current > 0) {
        delta = std::numbers::pi * out.excite_current;
    } else {
        const double decayed = carried * std::exp(-cfg.beta * std::abs(out.leak_current) / cfg.t1);
        delta = -2 * std::asin(std::sqrt(decayed));
    }
    out.phi = out.phi_carry + delta;
    const double s = std::sin(out.phi / 2);
    out.alpha_exact = s * s;
    if (cfg.shots == 0) {
        out.alpha = out.alpha_exact;
    } else {
        if (!shot_rng) {
            throw InvalidArgument("qlif_step: shot estimation needs a stream");
        }
        int ones = 0;
        for (int k = 0; k < cfg.shots; ++k) {
            ones += shot_rng->bernoulli(out.alpha_exact) ? 1 : 0;
        }
        out.alpha = static_cast<double>(ones) / cfg.shots;
    }
    out.spike = out.alpha > cfg.threshold;
    out.next = QlifState{out.alpha, out.spike};
    return out;
}

}  // namespace sqsnn
