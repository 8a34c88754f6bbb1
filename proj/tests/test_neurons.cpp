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
#include <numbers>
#include <vector>

#include "sqsnn/neurons/lif.hpp"
#include "sqsnn/neurons/qlif.hpp"
#include "sqsnn/neurons/sqs.hpp"

namespace sqsnn {
namespace {

constexpr double kPi = std::numbers::pi;

SpikeMatrix spikes(std::initializer_list<std::initializer_list<int>> rows) {
    SpikeMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto &row : rows) {
        Eigen::Index c = 0;
        for (int v : row) {
            x(r, c++) = static_cast<std::uint8_t>(v);
        }
        ++r;
    }
    return x;
}

// One input-output qubit, one memory qubit, standard ansatz, one input.
struct SingleNeuron {
    SqsConfig cfg;
    SqsParams params;

    SingleNeuron(double w, Eigen::Vector3d theta) {
        cfg.io_qubits = 1;
        cfg.memory_qubits = 1;
        cfg.fan_in = 1;
        cfg.ansatz = Ansatz::standard(1, 1);
        cfg.validate();
        params.weights = Eigen::MatrixXd::Constant(1, 1, w);
        params.theta = theta;
        params.validate(cfg);
    }
};

// ---------------------------------------------------------------- SQS front end

TEST(Currents, WeightedSumOfActiveInputs) {
    Eigen::MatrixXd w(1, 1);
    w << 0.5;
    EXPECT_DOUBLE_EQ(compute_currents(w, spikes({{1}}))[0], 0.5);
    Eigen::MatrixXd w2(1, 2);
    w2 << 0.3, -0.2;
    EXPECT_NEAR(compute_currents(w2, spikes({{1, 1}}))[0], 0.1, 1e-15);
    EXPECT_EQ(compute_currents(w2, spikes({{0, 0}}))[0], 0.0);
}

TEST(Currents, WorkIsProportionalToActiveInputs) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(2, 6, 0.1);
    WorkCounter wc;
    compute_currents(w, spikes({{1, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 1}}), &wc);
    EXPECT_EQ(wc.synaptic_terms, 3u);
    WorkCounter idle;
    embed_angles(compute_currents(w, SpikeMatrix::Zero(2, 6), &idle), &idle);
    EXPECT_EQ(idle.synaptic_terms, 0u);
    EXPECT_EQ(idle.rotations, 0u);
}

TEST(Currents, ShapeMismatchThrows) {
    EXPECT_THROW(compute_currents(Eigen::MatrixXd::Zero(1, 2), spikes({{1}})), InvalidArgument);
}

TEST(Embedding, PositiveCurrentsOnly) {
    Eigen::VectorXd z(3);
    z << 0.5, -0.3, 0.0;
    const Eigen::VectorXd phi = embed_angles(z);
    EXPECT_DOUBLE_EQ(phi[0], kPi / 2);
    EXPECT_EQ(phi[1], 0.0);
    EXPECT_EQ(phi[2], 0.0);
}

TEST(StepUnitary, ZeroAnglesZeroThetaIsIdentity) {
    const Ansatz a = Ansatz::standard(2, 1);
    const Unitary u = build_step_unitary(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(a.num_params()), a, 2, 1);
    EXPECT_LT((u.matrix() - CMatrix::Identity(8, 8)).norm(), 1e-15);
}

TEST(StepUnitary, EmptyAnsatzIsEmbedding) {
    const Unitary u = build_step_unitary(Eigen::VectorXd::Constant(1, kPi), Eigen::VectorXd(), Ansatz{}, 1, 0);
    EXPECT_LT((u.matrix() - rx(kPi).matrix()).norm(), 1e-15);
}

TEST(StepUnitary, RandomCircuitsAreUnitary) {
    Stream r = StreamKey(4).stream();
    const Ansatz a = Ansatz::standard(2, 2);
    for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd phi(2), theta(a.num_params());
        for (auto &v : phi) {
            v = r.uniform() * kPi;
        }
        for (auto &v : theta) {
            v = (2 * r.uniform() - 1) * kPi;
        }
        ASSERT_LT(build_step_unitary(phi, theta, a, 2, 2).unitarity_error(), 1e-12);
    }
}

TEST(StepUnitary, AnsatzQubitOutOfRangeIsConfigError) {
    Ansatz a;
    a.gates.push_back({GateKind::kRX, {3}, 0});
    EXPECT_THROW(build_step_unitary(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), a, 1, 1), ConfigError);
}

TEST(AnsatzTest, StandardShapeForOneAndOne) {
    const Ansatz a = Ansatz::standard(1, 1);
    ASSERT_EQ(a.gates.size(), 3u);
    EXPECT_EQ(a.gates[0], (GateSpec{GateKind::kCRX, {0, 1}, 0}));
    EXPECT_EQ(a.gates[1], (GateSpec{GateKind::kRX, {0}, 1}));
    EXPECT_EQ(a.gates[2], (GateSpec{GateKind::kRX, {1}, 2}));
}

TEST(AnsatzTest, ValidationCatchesBadGates) {
    Ansatz a;
    a.gates.push_back({GateKind::kCRX, {0, 0}, 0});
    EXPECT_THROW(a.validate(2), ConfigError);
    Ansatz gap;
    gap.gates.push_back({GateKind::kRX, {0}, 1});
    EXPECT_THROW(gap.validate(1), ConfigError);
}

TEST(SqsConfigTest, RegisterCap) {
    SqsConfig cfg;
    cfg.io_qubits = 8;
    cfg.memory_qubits = 8;
    cfg.ansatz = Ansatz::standard(8, 8);
    EXPECT_THROW(cfg.validate(), CapacityError);
}

// ---------------------------------------------------------------- SQS stepping

TEST(SqsStepTest, FullFlipWithIdentityAnsatz) {
    SingleNeuron n(1.0, Eigen::Vector3d::Zero());
    Stream r = StreamKey(1).stream();
    const SqsStep s = sqs_step(n.cfg, SqsState::initial(n.cfg), n.params, spikes({{1}}), r);
    EXPECT_NEAR(s.exact[1], 1.0, 1e-15);
    EXPECT_EQ(s.spikes.bits[0], 1);
    EXPECT_LT((s.next.memory.matrix() - DensityMatrix::ground(1).matrix()).norm(), 1e-15);
    EXPECT_EQ(s.next.t, 1);
}

TEST(SqsStepTest, SilentInputNeverSpikesFromGround) {
    for (double w : {-0.4, 0.0, 0.7}) {
        SingleNeuron n(w, Eigen::Vector3d::Zero());
        Stream r = StreamKey(2).stream();
        const SqsStep s = sqs_step(n.cfg, SqsState::initial(n.cfg), n.params, spikes({{w < 0 ? 1 : 0}}), r);
        EXPECT_NEAR(s.exact[1], 0.0, 1e-15);
        EXPECT_EQ(s.spikes.bits[0], 0);
    }
}

// After RX(pi/2) on the io qubit, CRX(pi) copies the io basis state into the
// memory up to a phase, so the two outcomes leave orthogonal memories.
TEST(SqsStepTest, EntanglingAnsatzSplitsMemoryByOutcome) {
    SingleNeuron n(0.5, Eigen::Vector3d(kPi, 0, 0));
    const auto st = SqsState::initial(n.cfg);
    const SqsObserved zero = sqs_observe(n.cfg, st, n.params, spikes({{1}}), BitString{{0}});
    const SqsObserved one = sqs_observe(n.cfg, st, n.params, spikes({{1}}), BitString{{1}});
    EXPECT_NEAR(zero.exact[1], 0.5, 1e-15);
    EXPECT_NEAR(zero.probability, 0.5, 1e-15);
    EXPECT_LT((zero.next.memory.matrix() - DensityMatrix::basis(BitString{{0}}).matrix()).norm(), 1e-14);
    EXPECT_LT((one.next.memory.matrix() - DensityMatrix::basis(BitString{{1}}).matrix()).norm(), 1e-14);
}

TEST(SqsStepTest, ObserveAgreesWithSampledStep) {
    SingleNeuron n(0.37, Eigen::Vector3d(0.9, -0.4, 1.3));
    Stream r = StreamKey(5).stream();
    SqsState st = SqsState::initial(n.cfg);
    for (int t = 0; t < 6; ++t) {
        const SpikeMatrix x = spikes({{t % 2}});
        const SqsStep s = sqs_step(n.cfg, st, n.params, x, r);
        const SqsObserved o = sqs_observe(n.cfg, st, n.params, x, s.spikes);
        EXPECT_NEAR(o.probability, s.probability, 1e-12);
        EXPECT_LT((o.next.memory.matrix() - s.next.memory.matrix()).norm(), 1e-12);
        st = s.next;
    }
}

TEST(SqsStepTest, ShotModeEstimatesTable) {
    SingleNeuron n(0.5, Eigen::Vector3d::Zero());
    Stream spike = StreamKey(6).stream(), shots = StreamKey(7).stream();
    const SqsStep s =
        sqs_step(n.cfg, SqsState::initial(n.cfg), n.params, spikes({{1}}), spike, Mode::with_shots(4000), &shots);
    EXPECT_NEAR(s.exact[1], 0.5, 1e-15);
    EXPECT_NEAR(s.table[1], 0.5, 0.03);
    EXPECT_DOUBLE_EQ(s.table.sum(), 1.0);
    EXPECT_THROW(Mode::with_shots(0), ConfigError);
}

TEST(SqsProperties, TablesAreNormalizedForRandomParameters) {
    Stream r = StreamKey(8).stream();
    SqsConfig cfg;
    cfg.io_qubits = 2;
    cfg.memory_qubits = 2;
    cfg.fan_in = 3;
    cfg.ansatz = Ansatz::standard(2, 2);
    for (int k = 0; k < 50; ++k) {
        SqsParams p;
        p.weights = Eigen::MatrixXd::Random(2, 3);
        p.theta = Eigen::VectorXd::Random(cfg.ansatz.num_params()) * kPi;
        SqsState st = SqsState::initial(cfg);
        for (int t = 0; t < 4; ++t) {
            SpikeMatrix x(2, 3);
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                x.data()[i] = r.bernoulli(0.5) ? 1 : 0;
            }
            const SqsStep s = sqs_step(cfg, st, p, x, r);
            ASSERT_NEAR(s.exact.sum(), 1.0, 1e-10);
            ASSERT_FALSE(s.next.memory.invariant_violation().has_value());
            st = s.next;
        }
    }
}

// Without memory the distribution at t depends on x_t alone.
TEST(SqsProperties, MemorylessNeuronIgnoresHistory) {
    SqsConfig cfg;
    cfg.fan_in = 2;
    cfg.ansatz = Ansatz::standard(1, 0);
    SqsParams p;
    p.weights = Eigen::MatrixXd(1, 2);
    p.weights << 0.3, 0.45;
    p.theta = Eigen::VectorXd::Constant(1, 0.8);
    const SpikeMatrix probe = spikes({{1, 1}});
    Stream r = StreamKey(9).stream();
    const double fresh = sqs_step(cfg, SqsState::initial(cfg), p, probe, r).exact[1];
    SqsState st = SqsState::initial(cfg);
    for (int t = 0; t < 5; ++t) {
        st = sqs_step(cfg, st, p, spikes({{t % 2, 1 - t % 2}}), r).next;
    }
    EXPECT_NEAR(sqs_step(cfg, st, p, probe, r).exact[1], fresh, 1e-15);
}

// ---------------------------------------------------------------- QLIF

QlifParams qlif_params(double excite, double leak) {
    return QlifParams{Eigen::VectorXd::Constant(1, excite), Eigen::VectorXd::Constant(1, leak)};
}

QlifConfig qlif_config(double threshold) {
    QlifConfig c;
    c.threshold = threshold;
    c.fan_in = 1;
    return c;
}

const std::vector<std::uint8_t> kOn{1}, kOff{0};

TEST(Qlif, HalfRotationFromRest) {
    const QlifStep s = qlif_step(QlifState{}, qlif_params(0.5, 0), qlif_config(0.5), kOn);
    EXPECT_NEAR(s.phi, kPi / 2, 1e-15);
    EXPECT_NEAR(s.alpha, 0.5, 1e-15);
    EXPECT_FALSE(s.spike);  // strictly above threshold only
}

TEST(Qlif, SpikeAboveThresholdThenReset) {
    const QlifStep s = qlif_step(QlifState{}, qlif_params(0.5, 0), qlif_config(0.4), kOn);
    EXPECT_TRUE(s.spike);
    const QlifStep after = qlif_step(s.next, qlif_params(0.5, 0), qlif_config(0.4), kOff);
    EXPECT_EQ(after.phi_carry, 0.0);
    EXPECT_EQ(after.alpha, 0.0);
}

TEST(Qlif, PreviousSpikeRestartsFromZeroPhase) {
    const QlifState fired{0.6, true};
    EXPECT_TRUE(0.6 > qlif_config(0.5).threshold);
    const QlifStep s = qlif_step(fired, qlif_params(0.5, 0), qlif_config(0.5), kOn);
    EXPECT_EQ(s.phi_carry, 0.0);
    EXPECT_NEAR(s.alpha, 0.5, 1e-15);
}

TEST(Qlif, LeakWithLnTwoDecay) {
    const QlifStep s = qlif_step(QlifState{0.5, false}, qlif_params(-0.2, std::log(2.0)), qlif_config(0.5), kOn);
    EXPECT_NEAR(s.phi_carry, kPi / 2, 1e-12);
    EXPECT_NEAR(s.phi - s.phi_carry, -kPi / 3, 1e-12);
    EXPECT_NEAR(s.phi, kPi / 6, 1e-12);
    EXPECT_NEAR(s.alpha, std::pow(std::sin(kPi / 12), 2), 1e-12);
    EXPECT_NEAR(s.alpha, 0.0670, 5e-5);
}

TEST(Qlif, PhaseRecoveryRoundTrip) {
    for (double a : {0.0, 0.01, 0.3, 0.5, 0.77, 0.999}) {
        // A vanishing excitation leaves the recovered excitation unchanged.
        const QlifStep s = qlif_step(QlifState{a, false}, qlif_params(1e-300, 0), qlif_config(1.0), kOn);
        EXPECT_NEAR(std::pow(std::sin(s.phi_carry / 2), 2), a, 1e-12);
        EXPECT_NEAR(s.alpha, a, 1e-12);
    }
}

TEST(Qlif, ShotEstimateConcentrates) {
    QlifConfig c = qlif_config(0.5);
    c.shots = 10000;
    Stream r = StreamKey(3).stream();
    const QlifStep s = qlif_step(QlifState{}, qlif_params(0.5, 0), c, kOn, &r);
    EXPECT_NEAR(s.alpha_exact, 0.5, 1e-15);
    EXPECT_NEAR(s.alpha, 0.5, 0.02);
    EXPECT_THROW(qlif_step(QlifState{}, qlif_params(0.5, 0), c, kOn), InvalidArgument);
}

// ---------------------------------------------------------------- LIF

LifConfig lif_config() {
    LifConfig c;
    c.decay = 0.9;
    c.threshold = 1.0;
    c.fan_in = 1;
    return c;
}

TEST(Lif, StrongInputSpikesImmediately) {
    const LifStep s = lif_step(LifState{}, LifParams{Eigen::VectorXd::Constant(1, 2.0)}, lif_config(), kOn);
    EXPECT_TRUE(s.spike);
}

TEST(Lif, SilentInputNeverSpikes) {
    LifState st;
    for (int t = 0; t < 100; ++t) {
        const LifStep s = lif_step(st, LifParams{Eigen::VectorXd::Constant(1, 5.0)}, lif_config(), kOff);
        ASSERT_FALSE(s.spike);
        st = s.next;
    }
}

TEST(Lif, ConstantDriveFirstCrossing) {
    // Oracle: first n with sum_{k<=n} 0.9^k * 0.2 > 1.
    int expect = -1;
    double partial = 0;
    for (int k = 0; expect < 0; ++k) {
        partial += std::pow(0.9, k) * 0.2;
        if (partial > 1) {
            expect = k;
        }
    }
    EXPECT_EQ(expect, 6);  // the seventh step
    LifState st;
    int first = -1;
    for (int t = 0; t < 20 && first < 0; ++t) {
        const LifStep s = lif_step(st, LifParams{Eigen::VectorXd::Constant(1, 0.2)}, lif_config(), kOn);
        if (s.spike) {
            first = t;
        }
        st = s.next;
    }
    EXPECT_EQ(first, expect);
}

TEST(Lif, ResetAfterSpike) {
    const LifParams p{Eigen::VectorXd::Constant(1, 1.5)};
    const LifStep a = lif_step(LifState{}, p, lif_config(), kOn);
    ASSERT_TRUE(a.spike);
    const LifStep b = lif_step(a.next, p, lif_config(), kOff);
    EXPECT_EQ(b.potential, 0.0);
}

TEST(Lif, SurrogateSlopeIsArctanDerivative) {
    for (double v : {-1.0, 0.0, 0.3}) {
        const double h = 1e-6;
        auto s = [](double u) { return std::atan(kPi * u) / kPi + 0.5; };
        EXPECT_NEAR(arctan_surrogate_slope(v), (s(v + h) - s(v - h)) / (2 * h), 1e-8);
    }
}

TEST(NeuronConfig, ValidationRejectsBadValues) {
    QlifConfig q;
    q.threshold = 1.5;
    EXPECT_THROW(q.validate(), ConfigError);
    LifConfig l;
    l.decay = 1.0;
    EXPECT_THROW(l.validate(), ConfigError);
    EXPECT_THROW(lif_step(LifState{}, LifParams{Eigen::VectorXd::Zero(2)}, lif_config(), kOn), InvalidArgument);
}

}  // namespace
}  // namespace sqsnn
