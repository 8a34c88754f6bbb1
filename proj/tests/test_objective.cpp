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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "sqsnn/learning/objective.hpp"

namespace sqsnn {
namespace {

NetworkGraph layered(int in, std::vector<int> sizes, int memory, std::uint64_t seed) {
    LayeredSpec spec;
    spec.input_dim = in;
    spec.layer_sizes = std::move(sizes);
    spec.memory_qubits = memory;
    return build_feedforward(spec, StreamKey(seed));
}

SpikeTrain ones(int steps, int channels) {
    SpikeTrain s(steps, channels);
    for (int t = 0; t < steps; ++t) {
        for (int c = 0; c < channels; ++c) {
            s.set(t, c, true);
        }
    }
    return s;
}

TEST(LogProb, ClampedLog) {
    EXPECT_EQ(clamped_log(1.0), 0.0);
    EXPECT_DOUBLE_EQ(clamped_log(0.5), std::log(0.5));
    EXPECT_DOUBLE_EQ(clamped_log(0.0), std::log(1e-12));
}

TEST(LogProb, StepLogProbOfHalfRotation) {
    SqsConfig cfg;
    cfg.fan_in = 1;
    SqsParams p{Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::VectorXd::Zero(1)};
    const SpikeMatrix x = SpikeMatrix::Constant(1, 1, 1);
    EXPECT_NEAR(step_log_prob(cfg, SqsState::initial(cfg), p, x, BitString{{0}}).log_prob, std::log(0.5), 1e-14);
    p.weights(0, 0) = 1.0;
    EXPECT_NEAR(step_log_prob(cfg, SqsState::initial(cfg), p, x, BitString{{1}}).log_prob, 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(step_log_prob(cfg, SqsState::initial(cfg), p, x, BitString{{0}}).log_prob, std::log(1e-12));
}

TEST(Feedback, PerfectOutputsGiveZeroLoss) {
    NetworkGraph g = layered(1, {1}, 0, 1);
    g.neurons[0].sqs().params.weights(0, 0) = 1.0;
    g.neurons[0].sqs().params.theta.setZero();
    const NeuronTrains targets{ones(3, 1)};
    ForwardOptions opt;
    opt.forced = force_outputs(g, targets);
    const auto rec = forward(g, ones(3, 1), StreamKey(1), opt);
    for (double l : output_feedback(g, rec, targets, false)) {
        EXPECT_NEAR(l, 0.0, 1e-14);
    }
}

TEST(Feedback, CoinFlipOutputsGiveLogTwo) {
    NetworkGraph g = layered(1, {1}, 0, 1);
    g.neurons[0].sqs().params.weights(0, 0) = 0.5;
    g.neurons[0].sqs().params.theta.setZero();
    const NeuronTrains targets{ones(2, 1)};
    ForwardOptions opt;
    opt.forced = force_outputs(g, targets);
    const auto rec = forward(g, ones(2, 1), StreamKey(1), opt);
    const auto l = output_feedback(g, rec, targets, false);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_NEAR(l[0], std::log(2.0), 1e-14);
    EXPECT_NEAR(l[1], std::log(2.0), 1e-14);
    EXPECT_THROW(force_outputs(g, NeuronTrains{}), InvalidArgument);
}

// ---------------------------------------------------------------- regularizer

TEST(Regularizer, OneHotActivityHitsLowerBound) {
    const std::vector<int> layer{0, 0, 0};
    const std::vector<std::vector<double>> u{{0.7, 0}, {0, 0.2}, {0, 0}};
    // Each step contributes 1; T = 2.
    EXPECT_NEAR(regularizer(u, layer, 0.3), 0.3 * 2 / 2, 1e-15);
}

TEST(Regularizer, UniformActivityHitsUpperBound) {
    const std::vector<int> layer{0, 0, 0, 0};
    const std::vector<std::vector<double>> u{{0.4}, {0.4}, {0.4}, {0.4}};
    EXPECT_NEAR(regularizer(u, layer, 0.5), 0.5 * 4, 1e-14);
    EXPECT_EQ(regularizer(u, layer, 0.0), 0.0);
}

TEST(Regularizer, SilentLayerContributesNothing) {
    const std::vector<int> layer{0, 1};
    const std::vector<std::vector<double>> u{{0.0}, {0.3}};
    EXPECT_NEAR(regularizer(u, layer, 1.0), 1.0, 1e-15);
}

TEST(RegularizerProperties, CauchySchwarzBoundsOnRandomActivity) {
    Stream r = StreamKey(3).stream();
    for (int k = 0; k < 200; ++k) {
        const int n = 1 + static_cast<int>(r() % 6);
        std::vector<std::vector<double>> u(static_cast<std::size_t>(n), std::vector<double>(1));
        for (auto &row : u) {
            row[0] = r.uniform() + 1e-3;
        }
        const std::vector<int> layer(static_cast<std::size_t>(n), 0);
        const double v = regularizer(u, layer, 1.0);
        ASSERT_GE(v, 1.0 - 1e-12);
        ASSERT_LE(v, n + 1e-12);
    }
}

TEST(RegularizerProperties, GradientMatchesFiniteDifferences) {
    Stream r = StreamKey(4).stream();
    const std::vector<int> layer{0, 0, 1, 1, 1};
    std::vector<std::vector<double>> u(5, std::vector<double>(3));
    for (auto &row : u) {
        for (double &v : row) {
            v = r.uniform();
        }
    }
    const auto g = regularizer_gradient(u, layer, 0.7);
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t t = 0; t < 3; ++t) {
            auto up = u, dn = u;
            up[i][t] += 1e-6;
            dn[i][t] -= 1e-6;
            const double fd = (regularizer(up, layer, 0.7) - regularizer(dn, layer, 0.7)) / 2e-6;
            EXPECT_NEAR(g[i][t], fd, 1e-7);
        }
    }
}

TEST(RegularizerProperties, ScaleInvariant) {
    const std::vector<int> layer{0, 0, 0};
    const std::vector<std::vector<double>> u{{0.1, 0.3}, {0.5, 0.2}, {0.05, 0.9}};
    auto scaled = u;
    for (auto &row : scaled) {
        for (double &v : row) {
            v *= 3.7;
        }
    }
    EXPECT_NEAR(regularizer(u, layer, 1.0), regularizer(scaled, layer, 1.0), 1e-13);
}

// ---------------------------------------------------------------- enumeration

TEST(Enumeration, NoHiddenNeuronsMakesBoundTight) {
    const NetworkGraph g = layered(2, {1}, 1, 5);
    SpikeTrain in(3, 2);
    in.set(0, 0, true);
    in.set(1, 1, true);
    in.set(2, 0, true);
    SpikeTrain target(3, 1);
    target.set(1, 0, true);
    const Enumeration e = enumerate_likelihood(g, in, {target});
    EXPECT_EQ(e.hidden_trajectories, 1u);
    EXPECT_NEAR(e.bound, e.neg_log_likelihood, 1e-12);
    // Oracle: replay the single neuron step by step.
    const auto &m = g.neurons[0].sqs();
    SqsState st = SqsState::initial(m.config);
    double nll = 0;
    for (int t = 0; t < 3; ++t) {
        SpikeMatrix x(1, 2);
        x << in.at(t, 0), in.at(t, 1);
        const BitString b{{target.at(t, 0)}};
        nll -= step_log_prob(m.config, st, m.params, x, b).log_prob;
        st = sqs_observe(m.config, st, m.params, x, b).next;
    }
    EXPECT_NEAR(e.neg_log_likelihood, nll, 1e-12);
}

TEST(Enumeration, DeterministicHiddenNeuronsMakeBoundTight) {
    NetworkGraph g = layered(1, {2, 1}, 1, 6);
    for (int h : g.hidden) {
        auto &m = g.neurons[static_cast<std::size_t>(h)].sqs();
        m.params.weights.setConstant(1.0);
        m.params.theta.setZero();
    }
    SpikeTrain in(2, 1);
    in.set(0, 0, true);
    SpikeTrain target(2, 1);
    target.set(1, 0, true);
    const Enumeration e = enumerate_likelihood(g, in, {target});
    EXPECT_NEAR(e.bound, e.neg_log_likelihood, 1e-9);
}

TEST(Enumeration, BoundDominatesLikelihoodOnRandomNets) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const NetworkGraph g = layered(2, {2, 1}, static_cast<int>(seed % 2), 100 + seed);
        Stream r = StreamKey(seed).stream();
        SpikeTrain in(2, 2), target(2, 1);
        for (int t = 0; t < 2; ++t) {
            in.set(t, 0, r.bernoulli(0.7));
            in.set(t, 1, r.bernoulli(0.7));
            target.set(t, 0, r.bernoulli(0.5));
        }
        const Enumeration e = enumerate_likelihood(g, in, {target});
        EXPECT_EQ(e.hidden_trajectories, 16u);
        ASSERT_GE(e.bound - e.neg_log_likelihood, -1e-12);
    }
}

TEST(Enumeration, TrajectoryLawSumsToOne) {
    const NetworkGraph g = layered(1, {2, 1}, 1, 8);
    SpikeTrain in(2, 1);
    in.set(0, 0, true);
    double total = 0;
    for (const auto &[code, p] : enumerate_trajectories(g, in)) {
        total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Enumeration, CapIsEnforced) {
    const NetworkGraph g = layered(1, {4, 1}, 0, 9);
    SpikeTrain in(6, 1);
    EXPECT_THROW(enumerate_likelihood(g, in, {SpikeTrain(6, 1)}), CapacityError);
    EXPECT_THROW(enumerate_trajectories(g, in), CapacityError);
}

TEST(Enumeration, LogSumExpIsStable) {
    EXPECT_NEAR(detail::log_sum_exp({-1000.0, -1000.0}), -1000.0 + std::log(2.0), 1e-12);
    EXPECT_EQ(detail::log_sum_exp({}), -std::numeric_limits<double>::infinity());
}

}  // namespace
}  // namespace sqsnn
