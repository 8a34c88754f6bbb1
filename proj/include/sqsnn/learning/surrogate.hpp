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

// Surrogate-gradient training by reverse-mode differentiation of a sampled
// forward pass.
//
// Each emitted spike s is replaced, for differentiation only, by
//     x = s + h(d) - h(d_anchor)
// where d is the neuron's smooth driver (spike probability for SQS,
// excitation probability for QLIF, membrane potential for LIF) and d_anchor
// is its value when s was drawn. At the anchor x equals s exactly, so the
// forward pass is unchanged; dx/dd = h'(d). h is the logistic function for
// SQS and the arctan step surrogate (centered on the threshold) otherwise.
//
// The loss is the mean binary cross-entropy between each output channel's
// spike rate and its target train, plus lambda times the rate regularizer.
// Rates are mapped affinely into [floor, 1 - floor] to keep the logs finite.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqsnn/errors.hpp"
#include "sqsnn/learning/local_rule.hpp"
#include "sqsnn/learning/objective.hpp"
#include "sqsnn/learning/params.hpp"
#include "sqsnn/network.hpp"
#include "sqsnn/parallel.hpp"

namespace sqsnn {

struct SurrogateOptions {
    double temperature = 1.0;  // logistic surrogate uses sigma(p / temperature)
    double rate_floor = 0.01;

    void validate() const {
        if (!(temperature > 0)) {
            throw ConfigError("surrogate temperature must be positive");
        }
        if (!(rate_floor > 0 && rate_floor < 0.5)) {
            throw ConfigError("rate floor must lie in (0, 0.5)");
        }
    }
};

/// Spikes and anchors of a previous pass, replayed instead of sampled.
struct FrozenSamples {
    NeuronTrains spikes;
    std::vector<std::vector<Eigen::VectorXd>> anchors;  // [neuron][t], one entry per channel
};

namespace detail {

struct SqsTapeStep {
    Eigen::MatrixXd inputs;  // surrogate presynaptic values, channels x fan-in
    Eigen::VectorXd currents;
    std::vector<TapeGate> gates;
    CMatrix unitary;
    CMatrix before;  // |0><0| (x) memory
    CMatrix branch;  // unnormalized post-measurement block
    double branch_prob = 0;
    bool projected = true;  // false when the lenient marginal fallback was used
    BitString outcome;
};

struct QlifTapeStep {
    Eigen::VectorXd inputs;
    double excite = 0, leak = 0;
    double phi_prev = 0;
    bool reset = false;  // previous step spiked
    double phi = 0;
    bool excite_branch = false;
    double decay = 1;  // exp(-beta |leak| / T1)
};

struct LifTapeStep {
    Eigen::VectorXd inputs;
    double potential_prev = 0;
    bool reset = false;
    double potential = 0;
};

using TapeStep = std::variant<SqsTapeStep, QlifTapeStep, LifTapeStep>;

inline double logistic(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

inline double arctan_step(double v) {
    return std::atan(std::numbers::pi * v) / std::numbers::pi;
}

}  // namespace detail

struct SurrogatePass {
    NeuronTrains spikes;
    std::vector<std::vector<Eigen::VectorXd>> drivers;    // [neuron][t]
    std::vector<std::vector<Eigen::VectorXd>> surrogate;  // x values, [neuron][t]
    std::vector<std::vector<Eigen::VectorXd>> slopes;     // dx / d driver
    std::vector<std::vector<detail::TapeStep>> tape;
    std::vector<std::vector<double>> activity;  // regularizer input
    std::vector<Eigen::VectorXd> rates;         // per output neuron, affinely squeezed
    NeuronTrains targets;
    double data_loss = 0;
    double reg_loss = 0;
    double lambda = 0;

    double loss() const noexcept {
        return data_loss + reg_loss;
    }
    int steps() const {
        return spikes.empty() ? 0 : spikes.front().steps();
    }
};

inline FrozenSamples freeze(const SurrogatePass &p) {
    return FrozenSamples{p.spikes, p.drivers};
}

namespace detail {

inline double surrogate_value(NeuronKind kind, double driver, const Neuron &n, const SurrogateOptions &o) {
    switch (kind) {
        case NeuronKind::kSqs:
            return logistic(driver / o.temperature);
        case NeuronKind::kQlif:
            return arctan_step(driver - std::get<QlifModel>(n.model).config.threshold);
        case NeuronKind::kLif:
            return arctan_step(driver - std::get<LifModel>(n.model).config.threshold);
    }
    return 0;
}

inline double surrogate_slope(NeuronKind kind, double driver, const Neuron &n, const SurrogateOptions &o) {
    switch (kind) {
        case NeuronKind::kSqs: {
            const double s = logistic(driver / o.temperature);
            return s * (1 - s) / o.temperature;
        }
        case NeuronKind::kQlif:
            return arctan_surrogate_slope(driver - std::get<QlifModel>(n.model).config.threshold);
        case NeuronKind::kLif:
            return arctan_surrogate_slope(driver - std::get<LifModel>(n.model).config.threshold);
    }
    return 0;
}

/// Surrogate presynaptic values for neuron i at step t (channels x parents).
inline Eigen::MatrixXd gather_surrogate(const NetworkGraph &g, int i, const std::vector<Source> &parents,
                                        const SpikeTrain &input, const SurrogatePass &pass, int t) {
    const int channels = g.neurons[static_cast<std::size_t>(i)].channels();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(channels, static_cast<Eigen::Index>(parents.size()));
    for (std::size_t p = 0; p < parents.size(); ++p) {
        const Source &src = parents[p];
        for (int c = 0; c < channels; ++c) {
            double v = 0;
            if (src.kind == Source::Kind::kInput) {
                v = input.at(t, src.index);
            } else if (t > 0) {
                const int pc = g.neurons[static_cast<std::size_t>(src.index)].channels() == 1 ? 0 : c;
                v = pass.surrogate[static_cast<std::size_t>(src.index)][static_cast<std::size_t>(t - 1)][pc];
            }
            x(c, static_cast<Eigen::Index>(p)) = v;
        }
    }
    return x;
}

inline std::vector<int> memory_indices(const SqsConfig &cfg) {
    std::vector<int> m;
    for (int k = 0; k < cfg.memory_qubits; ++k) {
        m.push_back(cfg.io_qubits + k);
    }
    return m;
}

}  // namespace detail

/// Forward pass for one item, recording everything the backward pass needs.
/// With `frozen`, spikes and anchors come from an earlier pass instead of
/// being sampled, so the loss becomes a smooth function of the parameters.
inline SurrogatePass surrogate_forward(const NetworkGraph &g, const SpikeTrain &input, const NeuronTrains &targets,
                                       StreamKey key, double lambda, const SurrogateOptions &opt = {},
                                       const FrozenSamples *frozen = nullptr) {
    opt.validate();
    const int steps = input.steps();
    const int n = g.size();
    if (steps < 1 || input.channels() != g.input_dim) {
        throw InvalidArgument("surrogate_forward: input shape does not match the network");
    }
    if (targets.size() != g.output.size()) {
        throw InvalidArgument("surrogate_forward: one target train per output neuron required");
    }
    SurrogatePass pass;
    pass.targets = targets;
    pass.lambda = lambda;
    std::vector<std::vector<Source>> parents(static_cast<std::size_t>(n));
    std::vector<NeuronState> states;
    std::vector<double> qlif_phi(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const Neuron &nr = g.neurons[static_cast<std::size_t>(i)];
        if (const auto *q = std::get_if<QlifModel>(&nr.model); q && q->config.shots != 0) {
            throw ConfigError("surrogate training needs exact QLIF excitation (shots = 0)");
        }
        pass.spikes.emplace_back(steps, nr.channels());
        parents[static_cast<std::size_t>(i)] = g.parents(i);
        states.push_back(initial_state(nr));
    }
    auto grid = [&](auto v) { return std::vector<decltype(v)>(static_cast<std::size_t>(steps), v); };
    pass.drivers.assign(static_cast<std::size_t>(n), grid(Eigen::VectorXd()));
    pass.surrogate = pass.drivers;
    pass.slopes = pass.drivers;
    pass.tape.assign(static_cast<std::size_t>(n), std::vector<detail::TapeStep>(static_cast<std::size_t>(steps)));
    pass.activity.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(steps), 0.0));

    for (int t = 0; t < steps; ++t) {
        for (int i = 0; i < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            const auto tu = static_cast<std::size_t>(t);
            const Neuron &nr = g.neurons[iu];
            const Eigen::MatrixXd x = detail::gather_surrogate(g, i, parents[iu], input, pass, t);
            Eigen::VectorXd driver(nr.channels());
            BitString out;
            out.bits.resize(static_cast<std::size_t>(nr.channels()));

            if (const auto *m = std::get_if<SqsModel>(&nr.model)) {
                auto &st = std::get<SqsState>(states[iu]);
                detail::SqsTapeStep ts;
                ts.inputs = x;
                ts.currents = (m->params.weights.cwiseProduct(x)).rowwise().sum();
                Eigen::VectorXd phi = Eigen::VectorXd::Zero(ts.currents.size());
                for (Eigen::Index c = 0; c < phi.size(); ++c) {
                    phi[c] = ts.currents[c] > 0 ? std::numbers::pi * ts.currents[c] : 0.0;
                }
                ts.gates = step_tape(phi, m->params.theta, m->config.ansatz, m->config.io_qubits,
                                     m->config.memory_qubits);
                ts.unitary = tape_unitary(ts.gates, m->config.num_qubits()).matrix();
                ts.before = kron(DensityMatrix::ground(m->config.io_qubits), st.memory).matrix();
                CMatrix rho_m = ts.unitary * ts.before * ts.unitary.adjoint();
                detail::hermitize(rho_m);
                const DensityMatrix rho(detail::Trusted{}, std::move(rho_m));
                const auto io = m->config.io_indices();
                const ProbabilityTable table = born_distribution(rho, io);
                for (int c = 0; c < m->config.io_qubits; ++c) {
                    driver[c] = table.marginal_one(c);
                }
                if (frozen) {
                    const auto row = frozen->spikes.at(iu).row(t);
                    out.bits.assign(row.begin(), row.end());
                } else {
                    Stream rs = key.derive(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(t),
                                           Purpose::kSpike)
                                    .stream();
                    out = sample_outcome(table, rs);
                }
                Branch br = extract_branch(rho, out, io);
                ts.branch_prob = br.probability;
                ts.projected = br.probability >= kMinBranchProbability;
                ts.branch = std::move(br.block);
                ts.outcome = out;
                st = SqsState{conditional_memory(m->config, rho, out), t + 1};
                pass.activity[iu][tu] = driver.sum();
                pass.tape[iu][tu] = std::move(ts);
            } else if (const auto *q = std::get_if<QlifModel>(&nr.model)) {
                auto &st = std::get<QlifState>(states[iu]);
                detail::QlifTapeStep ts;
                ts.inputs = x.row(0).transpose();
                ts.excite = q->params.w_excite.dot(ts.inputs);
                ts.leak = q->params.w_leak.dot(ts.inputs);
                ts.phi_prev = qlif_phi[iu];
                ts.reset = st.spiked;
                const double carried = ts.reset ? 0.0 : std::pow(std::sin(ts.phi_prev / 2), 2);
                const double phi_carry = ts.reset ? 0.0 : 2 * std::asin(std::sqrt(std::clamp(carried, 0.0, 1.0)));
                ts.excite_branch = ts.excite > 0;
                ts.decay = std::exp(-q->config.beta * std::abs(ts.leak) / q->config.t1);
                const double delta = ts.excite_branch
                                         ? std::numbers::pi * ts.excite
                                         : -2 * std::asin(std::sqrt(std::clamp(carried * ts.decay, 0.0, 1.0)));
                ts.phi = phi_carry + delta;
                qlif_phi[iu] = ts.phi;
                const double alpha = std::pow(std::sin(ts.phi / 2), 2);
                driver[0] = alpha;
                const bool spike = frozen ? frozen->spikes.at(iu).at(t, 0) != 0 : alpha > q->config.threshold;
                out.bits[0] = spike ? 1 : 0;
                st = QlifState{alpha, spike};
                pass.activity[iu][tu] = alpha;
                pass.tape[iu][tu] = std::move(ts);
            } else {
                const auto &l = std::get<LifModel>(nr.model);
                auto &st = std::get<LifState>(states[iu]);
                detail::LifTapeStep ts;
                ts.inputs = x.row(0).transpose();
                ts.potential_prev = st.potential;
                ts.reset = st.spiked;
                ts.potential = l.config.decay * st.potential * (ts.reset ? 0.0 : 1.0) + l.params.weights.dot(ts.inputs);
                driver[0] = ts.potential;
                const bool spike =
                    frozen ? frozen->spikes.at(iu).at(t, 0) != 0 : ts.potential > l.config.threshold;
                out.bits[0] = spike ? 1 : 0;
                st = LifState{ts.potential, spike};
                pass.activity[iu][tu] = ts.potential;
                pass.tape[iu][tu] = std::move(ts);
            }

            Eigen::VectorXd sx(nr.channels()), slope(nr.channels());
            for (int c = 0; c < nr.channels(); ++c) {
                const double anchor = frozen ? frozen->anchors.at(iu).at(tu)[c] : driver[c];
                sx[c] = out.bits[static_cast<std::size_t>(c)] + detail::surrogate_value(nr.kind(), driver[c], nr, opt) -
                        detail::surrogate_value(nr.kind(), anchor, nr, opt);
                slope[c] = detail::surrogate_slope(nr.kind(), driver[c], nr, opt);
                pass.spikes[iu].set(t, c, out.bits[static_cast<std::size_t>(c)] != 0);
            }
            pass.drivers[iu][tu] = driver;
            pass.surrogate[iu][tu] = sx;
            pass.slopes[iu][tu] = slope;
        }
    }

    // Data term: cross-entropy of squeezed rates against the target trains.
    const double a = opt.rate_floor;
    const double b = 1 - 2 * opt.rate_floor;
    double total = 0;
    std::size_t terms = 0;
    for (std::size_t k = 0; k < g.output.size(); ++k) {
        const auto o = static_cast<std::size_t>(g.output[k]);
        const int channels = g.neurons[o].channels();
        if (targets[k].steps() != steps || targets[k].channels() != channels) {
            throw InvalidArgument("surrogate_forward: target train shape mismatch");
        }
        Eigen::VectorXd r = Eigen::VectorXd::Zero(channels);
        for (int t = 0; t < steps; ++t) {
            r += pass.surrogate[o][static_cast<std::size_t>(t)];
        }
        r = (a + b * (r.array() / steps)).matrix();
        for (int c = 0; c < channels; ++c) {
            for (int t = 0; t < steps; ++t) {
                const double target = targets[k].at(t, c);
                total += -target * std::log(r[c]) - (1 - target) * std::log(1 - r[c]);
                ++terms;
            }
        }
        pass.rates.push_back(r);
    }
    pass.data_loss = terms ? total / static_cast<double>(terms) : 0.0;
    const auto layers = layer_assignment(g);
    pass.reg_loss = regularizer(pass.activity, layers, lambda);
    return pass;
}

namespace detail {

/// Re Tr(A^dagger B).
inline double re_inner(const CMatrix &a, const CMatrix &b) {
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

}  // namespace detail

/// Gradient of pass.loss() with respect to every parameter, flat layout.
inline ParamSet surrogate_backward(const NetworkGraph &g, const SurrogatePass &pass,
                                   const SurrogateOptions &opt = {}) {
    const int steps = pass.steps();
    const int n = g.size();
    ParamSet grad = zeros_like(flatten(g));

    // Adjoints of drivers and of surrogate spike values.
    std::vector<std::vector<Eigen::VectorXd>> d_driver(static_cast<std::size_t>(n)), d_x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int c = g.neurons[static_cast<std::size_t>(i)].channels();
        d_driver[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(steps), Eigen::VectorXd::Zero(c));
        d_x[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(steps), Eigen::VectorXd::Zero(c));
    }

    // Data term.
    std::size_t terms = 0;
    for (int o : g.output) {
        terms += static_cast<std::size_t>(g.neurons[static_cast<std::size_t>(o)].channels() * steps);
    }
    const double b = 1 - 2 * opt.rate_floor;
    for (std::size_t k = 0; k < g.output.size(); ++k) {
        const auto o = static_cast<std::size_t>(g.output[k]);
        const Eigen::VectorXd &r = pass.rates[k];
        for (int c = 0; c < r.size(); ++c) {
            double dr = 0;
            for (int t = 0; t < steps; ++t) {
                const double target = pass.targets[k].at(t, c);
                dr += -target / r[c] + (1 - target) / (1 - r[c]);
            }
            dr /= static_cast<double>(terms);
            for (int t = 0; t < steps; ++t) {
                d_x[o][static_cast<std::size_t>(t)][c] += dr * b / steps;
            }
        }
    }
    // Regularizer term.
    if (pass.lambda != 0) {
        const auto layers = layer_assignment(g);
        const auto dreg = regularizer_gradient(pass.activity, layers, pass.lambda);
        for (int i = 0; i < n; ++i) {
            for (int t = 0; t < steps; ++t) {
                d_driver[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)].array() +=
                    dreg[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
            }
        }
    }

    std::vector<std::vector<Source>> parents(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        parents[static_cast<std::size_t>(i)] = g.parents(i);
    }
    // Carried adjoints between steps of the same neuron.
    std::vector<CMatrix> d_memory(static_cast<std::size_t>(n));
    std::vector<double> d_phi_next(static_cast<std::size_t>(n), 0.0);    // QLIF: d/d phi_t from step t + 1
    std::vector<double> d_potential(static_cast<std::size_t>(n), 0.0);   // LIF: d/d u_t from step t + 1
    for (int i = 0; i < n; ++i) {
        if (const auto *m = std::get_if<SqsModel>(&g.neurons[static_cast<std::size_t>(i)].model)) {
            const Eigen::Index dm = Eigen::Index{1} << m->config.memory_qubits;
            d_memory[static_cast<std::size_t>(i)] = CMatrix::Zero(dm, dm);
        }
    }

    // Routes an adjoint on a presynaptic value back to the parent's surrogate output.
    auto route = [&](int i, int t, const Eigen::MatrixXd &d_in) {
        if (t == 0) {
            return;
        }
        const auto &ps = parents[static_cast<std::size_t>(i)];
        for (std::size_t p = 0; p < ps.size(); ++p) {
            if (ps[p].kind != Source::Kind::kNeuron) {
                continue;
            }
            const auto j = static_cast<std::size_t>(ps[p].index);
            const bool broadcast = g.neurons[j].channels() == 1;
            for (Eigen::Index c = 0; c < d_in.rows(); ++c) {
                d_x[j][static_cast<std::size_t>(t - 1)][broadcast ? 0 : c] += d_in(c, static_cast<Eigen::Index>(p));
            }
        }
    };

    for (int t = steps - 1; t >= 0; --t) {
        const auto tu = static_cast<std::size_t>(t);
        for (int i = n - 1; i >= 0; --i) {
            const auto iu = static_cast<std::size_t>(i);
            const Neuron &nr = g.neurons[iu];
            Eigen::VectorXd dd = d_driver[iu][tu] + d_x[iu][tu].cwiseProduct(pass.slopes[iu][tu]);
            Eigen::VectorXd &gi = grad[iu];

            if (const auto *m = std::get_if<SqsModel>(&nr.model)) {
                const auto &ts = std::get<detail::SqsTapeStep>(pass.tape[iu][tu]);
                const SqsConfig &cfg = m->config;
                const int nq = cfg.num_qubits();
                const Eigen::Index d = Eigen::Index{1} << nq;
                const Eigen::Index dm = Eigen::Index{1} << cfg.memory_qubits;
                CMatrix g_rho = CMatrix::Zero(d, d);
                // Spike marginals: p_c = sum of diagonal entries with qubit c set.
                for (Eigen::Index k = 0; k < d; ++k) {
                    double v = 0;
                    for (int c = 0; c < cfg.io_qubits; ++c) {
                        if ((k >> (nq - 1 - c)) & 1) {
                            v += dd[c];
                        }
                    }
                    g_rho(k, k) = v;
                }
                // Memory update.
                const CMatrix &g_sigma = d_memory[iu];
                const auto io = cfg.io_indices();
                const auto mem = detail::memory_indices(cfg);
                const auto si = detail::scatter_table(nq, io);
                const auto sm = detail::scatter_table(nq, mem);
                if (cfg.memory_qubits > 0) {
                    if (ts.projected) {
                        const double q = ts.branch_prob;
                        const CMatrix g_k = g_sigma / q - (detail::re_inner(g_sigma, ts.branch) / (q * q)) *
                                                              CMatrix::Identity(dm, dm);
                        const std::uint64_t base = si[ts.outcome.to_index()];
                        for (Eigen::Index a = 0; a < dm; ++a) {
                            for (Eigen::Index c = 0; c < dm; ++c) {
                                g_rho(static_cast<Eigen::Index>(base | sm[static_cast<std::size_t>(a)]),
                                      static_cast<Eigen::Index>(base | sm[static_cast<std::size_t>(c)])) += g_k(a, c);
                            }
                        }
                    } else {
                        for (auto bi : si) {
                            for (Eigen::Index a = 0; a < dm; ++a) {
                                for (Eigen::Index c = 0; c < dm; ++c) {
                                    g_rho(static_cast<Eigen::Index>(bi | sm[static_cast<std::size_t>(a)]),
                                          static_cast<Eigen::Index>(bi | sm[static_cast<std::size_t>(c)])) +=
                                        g_sigma(a, c);
                                }
                            }
                        }
                    }
                }
                // rho = U B U^dagger.
                const CMatrix &u = ts.unitary;
                const CMatrix g_u = g_rho * u * ts.before.adjoint() + g_rho.adjoint() * u * ts.before;
                const CMatrix g_b = u.adjoint() * g_rho * u;
                d_memory[iu] = g_b.topLeftCorner(dm, dm);
                // Gate angles: U = G_K ... G_1.
                const std::size_t ng = ts.gates.size();
                std::vector<CMatrix> right(ng + 1);  // right[k] = G_k ... G_1 (right[0] = I)
                right[0] = CMatrix::Identity(d, d);
                for (std::size_t k = 0; k < ng; ++k) {
                    right[k + 1] = ts.gates[k].matrix * right[k];
                }
                CMatrix left = CMatrix::Identity(d, d);  // G_K ... G_{k+1}
                const Eigen::Index nw = m->params.weights.size();
                Eigen::VectorXd d_current = Eigen::VectorXd::Zero(cfg.io_qubits);
                for (std::size_t k = ng; k-- > 0;) {
                    const TapeGate &gate = ts.gates[k];
                    const CMatrix inner = left.adjoint() * g_u * right[k].adjoint();
                    const double da = detail::re_inner(inner, gate.derivative(nq));
                    if (gate.source == TapeGate::Source::kTheta) {
                        gi[nw + gate.index] += da;
                    } else {
                        d_current[gate.index] += std::numbers::pi * da;
                    }
                    left = left * gate.matrix;
                }
                // At exactly zero current the angle pi * max(z, 0) has a kink; use the
                // symmetric subgradient. The missing rotation sits first in the circuit.
                for (int c = 0; c < cfg.io_qubits; ++c) {
                    if (ts.currents[c] == 0) {
                        const std::vector<int> qc{c};
                        const CMatrix dr = embed_matrix(rx_derivative(0.0), qc, nq);
                        d_current[c] += 0.5 * std::numbers::pi * detail::re_inner(u.adjoint() * g_u, dr);
                    }
                }
                // z = rowwise sum of w .* x.
                Eigen::MatrixXd d_w = d_current.asDiagonal() * ts.inputs;
                gi.head(nw) += Eigen::Map<const Eigen::VectorXd>(d_w.data(), nw);
                route(i, t, d_current.asDiagonal() * m->params.weights);
            } else if (const auto *q = std::get_if<QlifModel>(&nr.model)) {
                const auto &ts = std::get<detail::QlifTapeStep>(pass.tape[iu][tu]);
                const Eigen::Index p = q->params.w_excite.size();
                // alpha = sin^2(phi / 2).
                double d_phi = d_phi_next[iu] + dd[0] * std::sin(ts.phi) / 2;
                double d_phi_prev = 0;
                double d_excite = 0, d_leak = 0;
                if (!ts.reset) {
                    // Recovered phase 2 asin |sin(phi_prev / 2)|.
                    const double sp = std::sin(ts.phi_prev);
                    d_phi_prev += d_phi * (sp > 0 ? 1.0 : (sp < 0 ? -1.0 : 0.0));
                }
                if (ts.excite_branch) {
                    d_excite = d_phi * std::numbers::pi;
                } else if (!ts.reset) {
                    // delta = -2 asin sqrt(c), c = w sin^2(h), h = phi_prev / 2, w = decay.
                    const double h = ts.phi_prev / 2;
                    const double s2 = std::sin(h) * std::sin(h);
                    const double c = ts.decay * s2;
                    const double one_minus_c = std::cos(h) * std::cos(h) + (1 - ts.decay) * s2;
                    if (c > 1e-300 && one_minus_c > 1e-300) {
                        const double dd_dc = -1.0 / std::sqrt(c * one_minus_c);
                        d_phi_prev += d_phi * dd_dc * ts.decay * std::sin(ts.phi_prev) / 2;
                        const double sgn = ts.leak > 0 ? 1.0 : (ts.leak < 0 ? -1.0 : 0.0);
                        d_leak = d_phi * dd_dc * c * (-q->config.beta / q->config.t1) * sgn;
                    }
                }
                d_phi_next[iu] = d_phi_prev;
                gi.head(p) += d_excite * ts.inputs;
                gi.tail(p) += d_leak * ts.inputs;
                Eigen::MatrixXd d_in =
                    (d_excite * q->params.w_excite + d_leak * q->params.w_leak).transpose();
                route(i, t, d_in);
            } else {
                const auto &l = std::get<LifModel>(nr.model);
                const auto &ts = std::get<detail::LifTapeStep>(pass.tape[iu][tu]);
                const double du = dd[0] + d_potential[iu];
                d_potential[iu] = ts.reset ? 0.0 : du * l.config.decay;
                gi += du * ts.inputs;
                Eigen::MatrixXd d_in = (du * l.params.weights).transpose();
                route(i, t, d_in);
            }
        }
    }
    return grad;
}

/// One mini-batch update of the surrogate trainer. Returns the mean loss.
inline StepResult surrogate_train_step(NetworkGraph &g, const std::vector<TrainingItem> &batch,
                                       const TrainerConfig &cfg, const SurrogateOptions &sopt, Sgd &opt,
                                       std::uint64_t iteration) {
    cfg.validate();
    if (batch.empty()) {
        throw InvalidArgument("surrogate_train_step: empty batch");
    }
    std::vector<ParamSet> grads(batch.size());
    std::vector<double> losses(batch.size(), 0.0);
    parallel_for(batch.size(), cfg.workers, [&](std::size_t k) {
        const StreamKey key = item_key(cfg.seed, iteration, batch[k].id);
        const SurrogatePass pass = surrogate_forward(g, batch[k].input, batch[k].targets, key, cfg.lambda, sopt);
        grads[k] = surrogate_backward(g, pass, sopt);
        losses[k] = pass.loss();
    });
    StepResult r;
    ParamSet grad = zeros_like(flatten(g));
    for (std::size_t k = 0; k < batch.size(); ++k) {
        accumulate(grad, grads[k], 1.0 / static_cast<double>(batch.size()));
        r.loss += losses[k] / static_cast<double>(batch.size());
    }
    clip_norm(grad, cfg.clip_norm);
    opt.step(g, grad);
    return r;
}

}  // namespace sqsnn
