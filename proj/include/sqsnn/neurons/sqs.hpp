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

// Stochastic quantum spiking neuron: N input-output qubits that are measured
// every step, plus N_mem memory qubits that carry state between steps.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqsnn/errors.hpp"
#include "sqsnn/qcore.hpp"
#include "sqsnn/rng.hpp"

namespace sqsnn {

/// Presynaptic spikes, one row per input-output channel, one column per parent.
using SpikeMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

enum class GateKind { kRX, kCRX };

struct GateSpec {
    GateKind kind = GateKind::kRX;
    std::vector<int> qubits;  // (target) for RX, (control, target) for CRX
    int param = 0;

    friend bool operator==(const GateSpec &, const GateSpec &) = default;
};

/// Ordered gate list of the trainable circuit V(theta).
struct Ansatz {
    std::vector<GateSpec> gates;

    int num_params() const {
        int g = 0;
        for (const auto &gate : gates) {
            g = std::max(g, gate.param + 1);
        }
        return g;
    }

    void validate(int num_qubits) const {
        std::vector<bool> used(static_cast<std::size_t>(num_params()), false);
        for (const auto &gate : gates) {
            const std::size_t arity = gate.kind == GateKind::kRX ? 1 : 2;
            if (gate.qubits.size() != arity) {
                throw ConfigError("ansatz gate has " + std::to_string(gate.qubits.size()) + " qubits, expected " +
                                  std::to_string(arity));
            }
            for (int q : gate.qubits) {
                if (q < 0 || q >= num_qubits) {
                    throw ConfigError("ansatz qubit " + std::to_string(q) + " outside register of " +
                                      std::to_string(num_qubits));
                }
            }
            if (arity == 2 && gate.qubits[0] == gate.qubits[1]) {
                throw ConfigError("ansatz CRX control equals target");
            }
            if (gate.param < 0) {
                throw ConfigError("ansatz parameter index is negative");
            }
            used[static_cast<std::size_t>(gate.param)] = true;
        }
        for (std::size_t j = 0; j < used.size(); ++j) {
            if (!used[j]) {
                throw ConfigError("ansatz parameter indices are not contiguous; " + std::to_string(j) + " unused");
            }
        }
    }

    /// CRX gates linking input-output qubits to memory qubits, then one RX per
    /// qubit. For one input-output and one memory qubit this is the three-gate
    /// circuit CRX(0 -> 1), RX(0), RX(1).
    static Ansatz standard(int io_qubits, int memory_qubits) {
        Ansatz a;
        int p = 0;
        if (memory_qubits > 0) {
            const int links = std::max(io_qubits, memory_qubits);
            for (int k = 0; k < links; ++k) {
                a.gates.push_back({GateKind::kCRX, {k % io_qubits, io_qubits + k % memory_qubits}, p++});
            }
        }
        for (int q = 0; q < io_qubits + memory_qubits; ++q) {
            a.gates.push_back({GateKind::kRX, {q}, p++});
        }
        return a;
    }

    friend bool operator==(const Ansatz &, const Ansatz &) = default;
};

struct SqsConfig {
    int io_qubits = 1;
    int memory_qubits = 0;
    int fan_in = 0;
    Ansatz ansatz = Ansatz::standard(1, 0);

    int num_qubits() const noexcept {
        return io_qubits + memory_qubits;
    }

    void validate(int max_qubits = kMaxRegisterQubits) const {
        if (io_qubits < 1) {
            throw ConfigError("SQS neuron needs at least one input-output qubit");
        }
        if (memory_qubits < 0) {
            throw ConfigError("SQS memory qubit count is negative");
        }
        if (num_qubits() > max_qubits) {
            throw CapacityError("SQS register of " + std::to_string(num_qubits()) + " qubits exceeds cap of " +
                                std::to_string(max_qubits));
        }
        if (fan_in < 0) {
            throw ConfigError("SQS fan-in is negative");
        }
        ansatz.validate(num_qubits());
    }

    std::vector<int> io_indices() const {
        std::vector<int> q(static_cast<std::size_t>(io_qubits));
        for (int i = 0; i < io_qubits; ++i) {
            q[static_cast<std::size_t>(i)] = i;
        }
        return q;
    }
};

struct SqsParams {
    Eigen::MatrixXd weights;  // io_qubits x fan_in
    Eigen::VectorXd theta;

    void validate(const SqsConfig &cfg) const {
        if (weights.rows() != cfg.io_qubits || weights.cols() != cfg.fan_in) {
            throw ConfigError("SQS weight matrix is " + std::to_string(weights.rows()) + "x" +
                              std::to_string(weights.cols()) + ", expected " + std::to_string(cfg.io_qubits) + "x" +
                              std::to_string(cfg.fan_in));
        }
        if (theta.size() != cfg.ansatz.num_params()) {
            throw ConfigError("SQS theta has " + std::to_string(theta.size()) + " entries, ansatz needs " +
                              std::to_string(cfg.ansatz.num_params()));
        }
        if (!weights.allFinite() || !theta.allFinite()) {
            throw ConfigError("SQS parameters must be finite");
        }
    }
};

struct SqsState {
    DensityMatrix memory = DensityMatrix::ground(0);
    int t = 0;

    static SqsState initial(const SqsConfig &cfg) {
        return SqsState{DensityMatrix::ground(cfg.memory_qubits), 0};
    }
};

/// Counts the arithmetic the event-driven front end actually performs.
struct WorkCounter {
    std::uint64_t synaptic_terms = 0;
    std::uint64_t rotations = 0;
};

/// Exact evaluation, or M_p-shot empirical estimates.
struct Mode {
    enum class Kind { kExact, kShots };
    Kind kind = Kind::kExact;
    int shots = 1;

    static Mode exact() {
        return {};
    }
    static Mode with_shots(int m) {
        if (m < 1) {
            throw ConfigError("shot count must be positive");
        }
        return {Kind::kShots, m};
    }
    bool is_exact() const noexcept {
        return kind == Kind::kExact;
    }
};

// ---------------------------------------------------------------- front end

/// z[n] = sum_p w[n][p] x[n][p], touching only nonzero spikes.
inline Eigen::VectorXd compute_currents(const Eigen::MatrixXd &weights, const SpikeMatrix &x,
                                        WorkCounter *counter = nullptr) {
    if (weights.rows() != x.rows() || weights.cols() != x.cols()) {
        throw InvalidArgument("compute_currents: weights are " + std::to_string(weights.rows()) + "x" +
                              std::to_string(weights.cols()) + ", spikes " + std::to_string(x.rows()) + "x" +
                              std::to_string(x.cols()));
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(weights.rows());
    for (Eigen::Index p = 0; p < x.cols(); ++p) {
        for (Eigen::Index n = 0; n < x.rows(); ++n) {
            if (x(n, p) != 0) {
                z[n] += weights(n, p);
                if (counter) {
                    ++counter->synaptic_terms;
                }
            }
        }
    }
    return z;
}

/// phi = pi z for positive currents, 0 otherwise.
inline Eigen::VectorXd embed_angles(const Eigen::VectorXd &currents, WorkCounter *counter = nullptr) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(currents.size());
    for (Eigen::Index n = 0; n < currents.size(); ++n) {
        if (!std::isfinite(currents[n])) {
            throw InvalidArgument("embed_angles: non-finite current");
        }
        if (currents[n] > 0) {
            phi[n] = std::numbers::pi * currents[n];
            if (counter) {
                ++counter->rotations;
            }
        }
    }
    return phi;
}

// ---------------------------------------------------------------- circuit

/// One embedded gate of a step circuit, kept for differentiation.
struct TapeGate {
    enum class Source { kEmbedding, kTheta };
    Source source = Source::kTheta;
    int index = 0;  // channel for embeddings, theta index otherwise
    GateKind kind = GateKind::kRX;
    std::vector<int> qubits;
    double angle = 0;
    CMatrix matrix;  // full-register

    CMatrix derivative(int num_qubits) const {
        const CMatrix local = kind == GateKind::kRX ? rx_derivative(angle) : crx_derivative(angle);
        return embed_matrix(local, qubits, num_qubits);
    }
};

/// Gates of U(z, theta) in application order: embedding rotations on nonzero
/// angles, then the ansatz.
inline std::vector<TapeGate> step_tape(const Eigen::VectorXd &angles, const Eigen::VectorXd &theta,
                                       const Ansatz &ansatz, int io_qubits, int memory_qubits) {
    const int n = io_qubits + memory_qubits;
    if (angles.size() != io_qubits) {
        throw InvalidArgument("step circuit: " + std::to_string(angles.size()) + " angles for " +
                              std::to_string(io_qubits) + " input-output qubits");
    }
    if (theta.size() < ansatz.num_params()) {
        throw ConfigError("step circuit: theta shorter than ansatz parameter count");
    }
    std::vector<TapeGate> tape;
    for (int q = 0; q < io_qubits; ++q) {
        if (angles[q] != 0) {
            TapeGate g{TapeGate::Source::kEmbedding, q, GateKind::kRX, {q}, angles[q], {}};
            g.matrix = embed_matrix(rx(angles[q]).matrix(), g.qubits, n);
            tape.push_back(std::move(g));
        }
    }
    for (const auto &spec : ansatz.gates) {
        for (int q : spec.qubits) {
            if (q < 0 || q >= n) {
                throw ConfigError("step circuit: ansatz qubit out of range");
            }
        }
        const double a = theta[spec.param];
        TapeGate g{TapeGate::Source::kTheta, spec.param, spec.kind, spec.qubits, a, {}};
        const CMatrix local = spec.kind == GateKind::kRX ? rx(a).matrix() : crx(a).matrix();
        g.matrix = embed_matrix(local, g.qubits, n);
        tape.push_back(std::move(g));
    }
    return tape;
}

inline Unitary tape_unitary(const std::vector<TapeGate> &tape, int num_qubits) {
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    CMatrix u = CMatrix::Identity(d, d);
    for (const auto &g : tape) {
        u = (g.matrix * u).eval();
    }
    return Unitary(detail::Trusted{}, std::move(u));
}

/// U(z, theta) = V(theta) (RX(phi_1) x ... x RX(phi_N) x I).
inline Unitary build_step_unitary(const Eigen::VectorXd &angles, const Eigen::VectorXd &theta, const Ansatz &ansatz,
                                  int io_qubits, int memory_qubits) {
    return tape_unitary(step_tape(angles, theta, ansatz, io_qubits, memory_qubits), io_qubits + memory_qubits);
}

// ---------------------------------------------------------------- stepping

/// rho^IM = U (|0><0|^N x memory) U^dagger.
inline DensityMatrix sqs_joint_state(const SqsConfig &cfg, const DensityMatrix &memory, const SqsParams &params,
                                     const SpikeMatrix &x, WorkCounter *counter = nullptr) {
    if (memory.num_qubits() != cfg.memory_qubits) {
        throw InvalidArgument("SQS memory has " + std::to_string(memory.num_qubits()) + " qubits, expected " +
                              std::to_string(cfg.memory_qubits));
    }
    const Eigen::VectorXd phi = embed_angles(compute_currents(params.weights, x, counter), counter);
    const Unitary u = build_step_unitary(phi, params.theta, cfg.ansatz, cfg.io_qubits, cfg.memory_qubits);
    return evolve(kron(DensityMatrix::ground(cfg.io_qubits), memory), u);
}

/// Empirical outcome frequencies from `shots` draws of an exact table.
inline ProbabilityTable estimate_table(const ProbabilityTable &exact, int shots, Stream &rng) {
    if (shots < 1) {
        throw InvalidArgument("estimate_table: shots must be positive");
    }
    std::vector<std::uint64_t> counts(exact.probs.size(), 0);
    for (int k = 0; k < shots; ++k) {
        ++counts[sample_outcome(exact, rng).to_index()];
    }
    ProbabilityTable est;
    est.num_bits = exact.num_bits;
    est.probs.resize(counts.size());
    for (std::size_t v = 0; v < counts.size(); ++v) {
        est.probs[v] = static_cast<double>(counts[v]) / shots;
    }
    return est;
}

/// Memory after observing `outcome`. Below the branch floor the conditional
/// state is undefined; the unconditional memory marginal is used instead.
inline DensityMatrix conditional_memory(const SqsConfig &cfg, const DensityMatrix &rho_im, const BitString &outcome,
                                        double *probability = nullptr) {
    const auto io = cfg.io_indices();
    Branch br = extract_branch(rho_im, outcome, io);
    if (probability) {
        *probability = std::max(br.probability, 0.0);
    }
    if (cfg.memory_qubits == 0) {
        return DensityMatrix::ground(0);
    }
    if (br.probability >= kMinBranchProbability) {
        CMatrix m = br.block / br.probability;
        detail::hermitize(m);
        return DensityMatrix(detail::Trusted{}, std::move(m));
    }
    std::vector<int> mem(static_cast<std::size_t>(cfg.memory_qubits));
    for (int k = 0; k < cfg.memory_qubits; ++k) {
        mem[static_cast<std::size_t>(k)] = cfg.io_qubits + k;
    }
    return partial_trace(rho_im, mem);
}

struct SqsStep {
    BitString spikes;
    ProbabilityTable exact;  // Born table over the input-output qubits
    ProbabilityTable table;  // exact, or the shot estimate in shots mode
    double probability = 0;  // exact probability of the emitted outcome
    SqsState next;
};

/// One time step: embed, evolve, measure the input-output qubits once and keep
/// the post-measurement memory. Shot estimates only populate `table`.
inline SqsStep sqs_step(const SqsConfig &cfg, const SqsState &state, const SqsParams &params, const SpikeMatrix &x,
                        Stream &spike_rng, const Mode &mode = Mode::exact(), Stream *shot_rng = nullptr,
                        WorkCounter *counter = nullptr) {
    const DensityMatrix rho = sqs_joint_state(cfg, state.memory, params, x, counter);
    const auto io = cfg.io_indices();
    SqsStep out;
    out.exact = born_distribution(rho, io);
    out.spikes = sample_outcome(out.exact, spike_rng);
    if (mode.is_exact()) {
        out.table = out.exact;
    } else {
        if (!shot_rng) {
            throw InvalidArgument("sqs_step: shots mode needs a shot stream");
        }
        out.table = estimate_table(out.exact, mode.shots, *shot_rng);
    }
    if (cfg.memory_qubits > 0) {
        Projection proj = project_memory(rho, out.spikes, io);
        out.probability = proj.probability;
        out.next = SqsState{std::move(proj.memory), state.t + 1};
    } else {
        out.probability = out.exact[out.spikes.to_index()];
        out.next = SqsState{DensityMatrix::ground(0), state.t + 1};
    }
    return out;
}

/// Replays a step with a prescribed outcome instead of sampling it.
struct SqsObserved {
    ProbabilityTable exact;
    double probability = 0;
    SqsState next;
};

inline SqsObserved sqs_observe(const SqsConfig &cfg, const SqsState &state, const SqsParams &params,
                               const SpikeMatrix &x, const BitString &outcome, WorkCounter *counter = nullptr) {
    const DensityMatrix rho = sqs_joint_state(cfg, state.memory, params, x, counter);
    SqsObserved out;
    out.exact = born_distribution(rho, cfg.io_indices());
    out.probability = out.exact[outcome.to_index()];
    out.next = SqsState{conditional_memory(cfg, rho, outcome), state.t + 1};
    return out;
}

}  // namespace sqsnn
