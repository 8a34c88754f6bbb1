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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "sqsnn/learning/objective.hpp"
#include "sqsnn/network.hpp"

namespace sqsnn {
namespace {

bool has_violation(const NetworkGraph &g, const std::string &needle) {
    const auto v = validate(g);
    return std::any_of(v.begin(), v.end(), [&](const std::string &s) { return s.find(needle) != std::string::npos; });
}

NetworkGraph layered(int in, std::vector<int> sizes, int memory = 0, std::uint64_t seed = 1) {
    LayeredSpec spec;
    spec.input_dim = in;
    spec.layer_sizes = std::move(sizes);
    spec.memory_qubits = memory;
    return build_feedforward(spec, StreamKey(seed));
}

SpikeTrain random_input(int steps, int channels, Stream &r, double p = 0.6) {
    SpikeTrain s(steps, channels);
    for (int t = 0; t < steps; ++t) {
        for (int c = 0; c < channels; ++c) {
            s.set(t, c, r.bernoulli(p));
        }
    }
    return s;
}

TEST(Builder, OutputOnlyNetwork) {
    const NetworkGraph g = layered(4, {2});
    EXPECT_EQ(g.output, (std::vector<int>{0, 1}));
    EXPECT_TRUE(g.hidden.empty());
    for (int o : g.output) {
        EXPECT_EQ(g.neurons[static_cast<std::size_t>(o)].fan_in(), 4);
    }
}

TEST(Builder, HiddenLayerEdgeCount) {
    const NetworkGraph g = layered(4, {3, 2});
    EXPECT_EQ(g.input_edges.size(), 12u);
    EXPECT_EQ(g.edges.size(), 6u);
    EXPECT_EQ(g.hidden.size(), 3u);
    EXPECT_EQ(g.num_layers(), 2);
}

TEST(Builder, SameKeySameWeights) {
    const NetworkGraph a = layered(3, {2, 1}, 1, 9), b = layered(3, {2, 1}, 1, 9), c = layered(3, {2, 1}, 1, 10);
    EXPECT_EQ(a.neurons[1].sqs().params.weights, b.neurons[1].sqs().params.weights);
    EXPECT_NE(a.neurons[1].sqs().params.weights, c.neurons[1].sqs().params.weights);
}

TEST(Builder, RejectsBadSpecs) {
    LayeredSpec spec;
    spec.input_dim = 0;
    spec.layer_sizes = {1};
    EXPECT_THROW(build_feedforward(spec, StreamKey(1)), ConfigError);
    spec.input_dim = 2;
    spec.layer_sizes = {};
    EXPECT_THROW(build_feedforward(spec, StreamKey(1)), ConfigError);
}

TEST(Validate, FeedforwardIsClean) {
    EXPECT_TRUE(validate(layered(2, {2, 2})).empty());
}

TEST(Validate, EdgeLeavingOutputIsReported) {
    NetworkGraph g = layered(2, {1, 2});
    g.edges.emplace_back(1, 2);
    EXPECT_TRUE(has_violation(g, "output isolation"));
}

TEST(Validate, NeuronInBothSetsIsReported) {
    NetworkGraph g = layered(2, {1, 1});
    g.output.push_back(0);
    EXPECT_TRUE(has_violation(g, "both the hidden and the output set"));
    EXPECT_THROW(require_valid(g), ConfigError);
}

TEST(Validate, FanInMismatchAndDanglingEdges) {
    NetworkGraph g = layered(2, {1});
    g.input_edges.pop_back();
    EXPECT_TRUE(has_violation(g, "fan-in"));
    NetworkGraph h = layered(2, {1});
    h.edges.emplace_back(0, 5);
    EXPECT_TRUE(has_violation(h, "dangling edge"));
}

TEST(Decode, MostSpikesWinsLowestIndexOnTies) {
    EXPECT_EQ(rate_decode(std::vector<std::uint64_t>{3, 1}), 0);
    EXPECT_EQ(rate_decode(std::vector<std::uint64_t>{2, 2}), 0);
    EXPECT_EQ(rate_decode(std::vector<std::uint64_t>{0, 5, 4}), 1);
    EXPECT_THROW(rate_decode(std::vector<std::uint64_t>{}), InvalidArgument);
}

TEST(Forward, IdentityNeuronFollowsInput) {
    NetworkGraph g = layered(1, {1});
    auto &m = g.neurons[0].sqs();
    m.params.weights(0, 0) = 1.0;
    m.params.theta.setZero();
    SpikeTrain in(4, 1);
    in.set(0, 0, true);
    in.set(2, 0, true);
    const TrajectoryRecord rec = forward(g, in, StreamKey(3));
    for (int t = 0; t < 4; ++t) {
        EXPECT_EQ(rec.spikes[0].at(t, 0), in.at(t, 0));
        EXPECT_NEAR(rec.outcome_prob[0][static_cast<std::size_t>(t)], 1.0, 1e-15);
    }
}

TEST(Forward, DeterministicNetworkIgnoresSeed) {
    NetworkGraph g = layered(2, {2, 1});
    for (auto &n : g.neurons) {
        n.sqs().params.weights.setConstant(1.0);
        n.sqs().params.theta.setZero();
    }
    Stream r = StreamKey(4).stream();
    const SpikeTrain in = random_input(5, 2, r);
    EXPECT_EQ(forward(g, in, StreamKey(1)).spikes, forward(g, in, StreamKey(999)).spikes);
}

TEST(Forward, ParentsAreReadFromPreviousStep) {
    NetworkGraph g = layered(1, {1, 1});
    for (auto &n : g.neurons) {
        n.sqs().params.weights.setConstant(1.0);
        n.sqs().params.theta.setZero();
    }
    SpikeTrain in(3, 1);
    in.set(0, 0, true);
    const TrajectoryRecord rec = forward(g, in, StreamKey(1));
    EXPECT_EQ(rec.spikes[0].at(0, 0), 1);
    EXPECT_EQ(rec.spikes[1].at(0, 0), 0);
    EXPECT_EQ(rec.spikes[1].at(1, 0), 1);
    EXPECT_EQ(rec.spikes[1].at(2, 0), 0);
}

TEST(Forward, StepOrderDoesNotChangeTrajectories) {
    const NetworkGraph g = layered(2, {3, 2}, 1, 5);
    Stream r = StreamKey(6).stream();
    const SpikeTrain in = random_input(6, 2, r);
    const auto base = forward(g, in, StreamKey(12));
    std::vector<int> order(static_cast<std::size_t>(g.size()));
    std::iota(order.begin(), order.end(), 0);
    for (int k = 0; k < 5; ++k) {
        std::shuffle(order.begin(), order.end(), r);
        ForwardOptions opt;
        opt.step_order = order;
        ASSERT_EQ(forward(g, in, StreamKey(12), opt).spikes, base.spikes);
    }
}

TEST(Forward, RejectsMalformedInputs) {
    const NetworkGraph g = layered(2, {1});
    EXPECT_THROW(forward(g, SpikeTrain(3, 3), StreamKey(1)), InvalidArgument);
    EXPECT_THROW(forward(g, SpikeTrain(0, 2), StreamKey(1)), InvalidArgument);
    ForwardOptions opt;
    opt.step_order = {0, 0};
    EXPECT_THROW(forward(g, SpikeTrain(2, 2), StreamKey(1), opt), InvalidArgument);
}

TEST(Forward, MixedNeuronKindsRun) {
    for (NeuronKind kind : {NeuronKind::kQlif, NeuronKind::kLif}) {
        LayeredSpec spec;
        spec.input_dim = 3;
        spec.layer_sizes = {2, 2};
        spec.kind = kind;
        const NetworkGraph g = build_feedforward(spec, StreamKey(2));
        Stream r = StreamKey(3).stream();
        const auto rec = forward(g, random_input(5, 3, r), StreamKey(4));
        EXPECT_EQ(rec.spikes.size(), 4u);
        for (const auto &row : rec.outcome_prob) {
            for (double p : row) {
                EXPECT_EQ(p, 1.0);
            }
        }
    }
}

// Product of per-neuron conditionals recorded by forward() equals the joint
// probability of the trajectory from independent enumeration.
TEST(ForwardProperties, RecordedConditionalsFactorizeTheJoint) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const NetworkGraph g = layered(2, {2, 1}, static_cast<int>(seed % 2), seed);
        Stream r = StreamKey(seed).child(1).stream();
        const SpikeTrain in = random_input(2, 2, r);
        const auto joint = enumerate_trajectories(g, in);
        for (int k = 0; k < 20; ++k) {
            const auto rec = forward(g, in, StreamKey(seed).derive(2, k));
            double p = 1;
            for (const auto &row : rec.outcome_prob) {
                for (double q : row) {
                    p *= q;
                }
            }
            const double expect = joint.at(trajectory_code(rec.spikes));
            ASSERT_NEAR(p, expect, 1e-9 * expect);
        }
    }
}

TEST(ForwardProperties, EmpiricalLawMatchesEnumeration) {
    const NetworkGraph g = layered(1, {2, 1}, 1, 77);
    SpikeTrain in(2, 1);
    in.set(0, 0, true);
    in.set(1, 0, true);
    const auto joint = enumerate_trajectories(g, in);
    std::map<std::uint64_t, int> counts;
    const int runs = 20000;
    for (int k = 0; k < runs; ++k) {
        ++counts[trajectory_code(forward(g, in, StreamKey(5).child(static_cast<std::uint64_t>(k))).spikes)];
    }
    double tv = 0;
    for (const auto &[code, p] : joint) {
        tv += std::abs(p - counts[code] / static_cast<double>(runs));
    }
    for (const auto &[code, c] : counts) {
        if (!joint.count(code)) {
            tv += c / static_cast<double>(runs);
        }
    }
    EXPECT_LE(tv / 2, 0.05);
}

TEST(Readout, SpikesPerStepCountsEveryNeuron) {
    TrajectoryRecord rec;
    rec.spikes.emplace_back(4, 1);
    rec.spikes.emplace_back(4, 2);
    rec.spikes[0].set(0, 0, true);
    rec.spikes[1].set(1, 0, true);
    rec.spikes[1].set(1, 1, true);
    EXPECT_DOUBLE_EQ(spikes_per_step(rec), 0.75);
}

}  // namespace
}  // namespace sqsnn
