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

// Likelihood pieces shared by the trainers: clamped log-probabilities, the
// spike-rate regularizer, and brute-force enumeration over hidden
// trajectories for networks small enough to marginalize exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sqsnn/errors.hpp"
#include "sqsnn/network.hpp"
#include "sqsnn/qcore.hpp"

namespace sqsnn {

inline constexpr double kDefaultProbFloor = 1e-12;
/// Largest number of hidden spike bits (neurons x channels x steps) enumerated.
inline constexpr int kEnumerationCap = 20;

inline double clamped_log(double p, double floor = kDefaultProbFloor) {
    return std::log(std::max(p, floor));
}

struct StepLogProb {
    double log_prob = 0;
    double prob = 0;  // exact, or the shot estimate in shots mode
};

/// log Tr(rho^I S) for an observed outcome, clamped below at `floor`.
inline StepLogProb step_log_prob(const SqsConfig &cfg, const SqsState &state, const SqsParams &params,
                                 const SpikeMatrix &x, const BitString &observed, const Mode &mode = Mode::exact(),
                                 Stream *shot_rng = nullptr, double floor = kDefaultProbFloor) {
    const DensityMatrix rho = sqs_joint_state(cfg, state.memory, params, x);
    const ProbabilityTable exact = born_distribution(rho, cfg.io_indices());
    StepLogProb r;
    if (mode.is_exact()) {
        r.prob = exact[observed.to_index()];
    } else {
        if (!shot_rng) {
            throw InvalidArgument("step_log_prob: shots mode needs a shot stream");
        }
        r.prob = estimate_table(exact, mode.shots, *shot_rng)[observed.to_index()];
    }
    r.log_prob = clamped_log(r.prob, floor);
    return r;
}

/// Forced-train list that pins every output neuron to its target.
inline std::vector<const SpikeTrain *> force_outputs(const NetworkGraph &g, const NeuronTrains &targets) {
    if (targets.size() != g.output.size()) {
        throw InvalidArgument("target has " + std::to_string(targets.size()) + " trains for " +
                              std::to_string(g.output.size()) + " output neurons");
    }
    std::vector<const SpikeTrain *> forced(static_cast<std::size_t>(g.size()), nullptr);
    for (std::size_t k = 0; k < g.output.size(); ++k) {
        forced[static_cast<std::size_t>(g.output[k])] = &targets[k];
    }
    return forced;
}

/// Feedback per step: minus the summed clamped log-probability that the
/// output neurons emit their targets.
inline std::vector<double> output_feedback(const NetworkGraph &g, const TrajectoryRecord &rec,
                                           const NeuronTrains &targets, bool use_tables,
                                           double floor = kDefaultProbFloor) {
    const int steps = rec.steps();
    std::vector<double> loss(static_cast<std::size_t>(steps), 0.0);
    for (std::size_t k = 0; k < g.output.size(); ++k) {
        const auto o = static_cast<std::size_t>(g.output[k]);
        for (int t = 0; t < steps; ++t) {
            const auto tu = static_cast<std::size_t>(t);
            double p;
            if (use_tables) {
                BitString b;
                b.bits.assign(targets[k].row(t).begin(), targets[k].row(t).end());
                p = rec.tables[o][tu][b.to_index()];
            } else {
                p = rec.outcome_prob[o][tu];
            }
            loss[tu] -= clamped_log(p, floor);
        }
    }
    return loss;
}

// ---------------------------------------------------------------- regularizer

/// (lambda / T) sum_t sum_layers (sum_i u_it)^2 / sum_i u_it^2; a step where
/// a layer is silent contributes 0.
inline double regularizer(const std::vector<std::vector<double>> &activity, std::span<const int> layer_of,
                          double lambda) {
    if (lambda == 0 || activity.empty()) {
        return 0;
    }
    const std::size_t steps = activity.front().size();
    int layers = 0;
    for (int l : layer_of) {
        layers = std::max(layers, l + 1);
    }
    double total = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        std::vector<double> s1(static_cast<std::size_t>(layers), 0.0), s2(static_cast<std::size_t>(layers), 0.0);
        for (std::size_t i = 0; i < activity.size(); ++i) {
            const auto l = static_cast<std::size_t>(layer_of[i]);
            s1[l] += activity[i][t];
            s2[l] += activity[i][t] * activity[i][t];
        }
        for (std::size_t l = 0; l < s1.size(); ++l) {
            if (s2[l] > 0) {
                total += s1[l] * s1[l] / s2[l];
            }
        }
    }
    return lambda * total / static_cast<double>(steps);
}

/// d regularizer / d activity[i][t].
inline std::vector<std::vector<double>> regularizer_gradient(const std::vector<std::vector<double>> &activity,
                                                             std::span<const int> layer_of, double lambda) {
    std::vector<std::vector<double>> grad(activity.size());
    if (activity.empty()) {
        return grad;
    }
    const std::size_t steps = activity.front().size();
    for (auto &g : grad) {
        g.assign(steps, 0.0);
    }
    if (lambda == 0) {
        return grad;
    }
    int layers = 0;
    for (int l : layer_of) {
        layers = std::max(layers, l + 1);
    }
    const double scale = lambda / static_cast<double>(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        std::vector<double> s1(static_cast<std::size_t>(layers), 0.0), s2(static_cast<std::size_t>(layers), 0.0);
        for (std::size_t i = 0; i < activity.size(); ++i) {
            const auto l = static_cast<std::size_t>(layer_of[i]);
            s1[l] += activity[i][t];
            s2[l] += activity[i][t] * activity[i][t];
        }
        for (std::size_t i = 0; i < activity.size(); ++i) {
            const auto l = static_cast<std::size_t>(layer_of[i]);
            if (s2[l] > 0) {
                const double u = activity[i][t];
                grad[i][t] = scale * (2 * s1[l] / s2[l] - 2 * s1[l] * s1[l] * u / (s2[l] * s2[l]));
            }
        }
    }
    return grad;
}

inline std::vector<int> layer_assignment(const NetworkGraph &g) {
    std::vector<int> l;
    for (const auto &n : g.neurons) {
        l.push_back(n.layer);
    }
    return l;
}

// ---------------------------------------------------------------- enumeration

struct Enumeration {
    double neg_log_likelihood = 0;  // -log p(o^T), hidden spikes marginalized
    double bound = 0;               // E_h[-log p(o^T | h)], the Jensen upper bound
    std::uint64_t hidden_trajectories = 0;
};

namespace detail {

inline int hidden_bits(const NetworkGraph &g, int steps) {
    int bits = 0;
    for (int h : g.hidden) {
        bits += g.neurons[static_cast<std::size_t>(h)].channels() * steps;
    }
    return bits;
}

inline void fill_bits(SpikeTrain &s, std::uint64_t code, int &cursor) {
    for (int t = 0; t < s.steps(); ++t) {
        for (int c = 0; c < s.channels(); ++c) {
            s.set(t, c, (code >> cursor) & 1U);
            ++cursor;
        }
    }
}

inline double log_sum_exp(const std::vector<double> &xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
        m = std::max(m, x);
    }
    if (!std::isfinite(m)) {
        return m;
    }
    double s = 0;
    for (double x : xs) {
        s += std::exp(x - m);
    }
    return m + std::log(s);
}

}  // namespace detail

/// Exact -log p(o^T) and its Jensen bound by summing over every hidden
/// trajectory. Output probabilities are clamped at `floor` in both, so the
/// bound holds for the clamped objective too.
inline Enumeration enumerate_likelihood(const NetworkGraph &g, const SpikeTrain &input, const NeuronTrains &targets,
                                        double floor = kDefaultProbFloor, int cap = kEnumerationCap) {
    const int steps = input.steps();
    const int bits = detail::hidden_bits(g, steps);
    if (bits > cap) {
        throw CapacityError("enumeration over " + std::to_string(bits) + " hidden spike bits exceeds cap of " +
                            std::to_string(cap));
    }
    ForwardOptions opt;
    opt.forced = force_outputs(g, targets);
    NeuronTrains hidden_trains;
    hidden_trains.reserve(g.hidden.size());
    for (int h : g.hidden) {
        hidden_trains.emplace_back(steps, g.neurons[static_cast<std::size_t>(h)].channels());
    }
    for (std::size_t k = 0; k < g.hidden.size(); ++k) {
        opt.forced[static_cast<std::size_t>(g.hidden[k])] = &hidden_trains[k];
    }

    std::vector<double> log_joint;
    double bound = 0;
    const std::uint64_t count = std::uint64_t{1} << bits;
    for (std::uint64_t code = 0; code < count; ++code) {
        int cursor = 0;
        for (auto &s : hidden_trains) {
            detail::fill_bits(s, code, cursor);
        }
        const TrajectoryRecord rec = forward(g, input, StreamKey(0), opt);
        double p_hidden = 1;
        for (int h : g.hidden) {
            for (double p : rec.outcome_prob[static_cast<std::size_t>(h)]) {
                p_hidden *= p;
            }
        }
        if (p_hidden <= 0) {
            continue;
        }
        double log_out = 0;
        for (int o : g.output) {
            for (double p : rec.outcome_prob[static_cast<std::size_t>(o)]) {
                log_out += clamped_log(p, floor);
            }
        }
        log_joint.push_back(std::log(p_hidden) + log_out);
        bound -= p_hidden * log_out;
    }
    Enumeration e;
    e.neg_log_likelihood = -detail::log_sum_exp(log_joint);
    e.bound = bound;
    e.hidden_trajectories = count;
    return e;
}

/// Packs every neuron's spikes (neuron-major, then step, then channel) into an integer.
inline std::uint64_t trajectory_code(const NeuronTrains &spikes) {
    std::uint64_t code = 0;
    int cursor = 0;
    for (const auto &s : spikes) {
        for (int t = 0; t < s.steps(); ++t) {
            for (int c = 0; c < s.channels(); ++c) {
                if (s.at(t, c)) {
                    code |= std::uint64_t{1} << cursor;
                }
                ++cursor;
            }
        }
    }
    return code;
}

/// Joint probability of every full trajectory with nonzero mass, keyed by trajectory_code.
inline std::map<std::uint64_t, double> enumerate_trajectories(const NetworkGraph &g, const SpikeTrain &input,
                                                              int cap = kEnumerationCap) {
    const int steps = input.steps();
    int bits = 0;
    for (const auto &n : g.neurons) {
        bits += n.channels() * steps;
    }
    if (bits > cap) {
        throw CapacityError("trajectory enumeration over " + std::to_string(bits) + " bits exceeds cap of " +
                            std::to_string(cap));
    }
    NeuronTrains trains;
    for (const auto &n : g.neurons) {
        trains.emplace_back(steps, n.channels());
    }
    ForwardOptions opt;
    for (auto &s : trains) {
        opt.forced.push_back(&s);
    }
    std::map<std::uint64_t, double> out;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
        int cursor = 0;
        for (auto &s : trains) {
            detail::fill_bits(s, code, cursor);
        }
        const TrajectoryRecord rec = forward(g, input, StreamKey(0), opt);
        double p = 1;
        for (const auto &row : rec.outcome_prob) {
            for (double q : row) {
                p *= q;
            }
        }
        if (p > 0) {
            out[code] = p;
        }
    }
    return out;
}

}  // namespace sqsnn
