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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sqsnn/errors.hpp"
#include "sqsnn/neurons/lif.hpp"
#include "sqsnn/neurons/qlif.hpp"
#include "sqsnn/neurons/sqs.hpp"
#include "sqsnn/rng.hpp"
#include "sqsnn/spikes.hpp"

namespace sqsnn {

enum class NeuronKind { kSqs, kQlif, kLif };

inline const char *kind_name(NeuronKind k) {
    switch (k) {
        case NeuronKind::kSqs:
            return "sqs";
        case NeuronKind::kQlif:
            return "qlif";
        case NeuronKind::kLif:
            return "lif";
    }
    return "?";
}

inline NeuronKind parse_kind(const std::string &s) {
    if (s == "sqs") {
        return NeuronKind::kSqs;
    }
    if (s == "qlif") {
        return NeuronKind::kQlif;
    }
    if (s == "lif") {
        return NeuronKind::kLif;
    }
    throw ConfigError("unknown neuron kind '" + s + "' (expected sqs, qlif or lif)");
}

struct SqsModel {
    SqsConfig config;
    SqsParams params;
};

struct QlifModel {
    QlifConfig config;
    QlifParams params;
};

struct LifModel {
    LifConfig config;
    LifParams params;
};

struct Neuron {
    std::string id;
    int layer = 0;
    bool self_synapse = false;  // re-inject own previous spikes as the last input column
    std::variant<SqsModel, QlifModel, LifModel> model;

    NeuronKind kind() const noexcept {
        return static_cast<NeuronKind>(model.index());
    }

    int channels() const noexcept {
        if (const auto *s = std::get_if<SqsModel>(&model)) {
            return s->config.io_qubits;
        }
        return 1;
    }

    int fan_in() const noexcept {
        return std::visit([](const auto &m) { return m.config.fan_in; }, model);
    }

    SqsModel &sqs() {
        return std::get<SqsModel>(model);
    }
    const SqsModel &sqs() const {
        return std::get<SqsModel>(model);
    }
};

/// Presynaptic source of a neuron: an external input channel, another neuron,
/// or (with self_synapse) the neuron itself.
struct Source {
    enum class Kind { kInput, kNeuron };
    Kind kind = Kind::kInput;
    int index = 0;

    friend bool operator==(const Source &, const Source &) = default;
};

/// Directed neuron graph. Inputs are virtual one-channel sources outside both
/// the hidden and the output set.
struct NetworkGraph {
    int input_dim = 0;
    std::vector<Neuron> neurons;
    std::vector<std::pair<int, int>> edges;        // (from neuron, to neuron)
    std::vector<std::pair<int, int>> input_edges;  // (input channel, to neuron)
    std::vector<int> hidden;
    std::vector<int> output;

    int size() const noexcept {
        return static_cast<int>(neurons.size());
    }

    /// Parent order: input edges, then neuron edges, then the self column.
    std::vector<Source> parents(int i) const {
        std::vector<Source> ps;
        for (const auto &[from, to] : input_edges) {
            if (to == i) {
                ps.push_back({Source::Kind::kInput, from});
            }
        }
        for (const auto &[from, to] : edges) {
            if (to == i) {
                ps.push_back({Source::Kind::kNeuron, from});
            }
        }
        if (neurons.at(static_cast<std::size_t>(i)).self_synapse) {
            ps.push_back({Source::Kind::kNeuron, i});
        }
        return ps;
    }

    bool is_output(int i) const {
        return std::find(output.begin(), output.end(), i) != output.end();
    }

    int num_layers() const {
        int l = 0;
        for (const auto &n : neurons) {
            l = std::max(l, n.layer + 1);
        }
        return l;
    }
};

/// Every structural problem found; empty means the graph is usable.
inline std::vector<std::string> validate(const NetworkGraph &g) {
    std::vector<std::string> out;
    const int n = g.size();
    auto in_range = [n](int i) { return i >= 0 && i < n; };

    std::vector<int> role(static_cast<std::size_t>(std::max(n, 0)), 0);
    for (int i : g.hidden) {
        if (!in_range(i)) {
            out.push_back("hidden set names unknown neuron " + std::to_string(i));
        } else {
            role[static_cast<std::size_t>(i)] |= 1;
        }
    }
    for (int i : g.output) {
        if (!in_range(i)) {
            out.push_back("output set names unknown neuron " + std::to_string(i));
        } else {
            role[static_cast<std::size_t>(i)] |= 2;
        }
    }
    for (int i = 0; i < n; ++i) {
        const auto r = role[static_cast<std::size_t>(i)];
        if (r == 3) {
            out.push_back("neuron " + std::to_string(i) + " is in both the hidden and the output set");
        } else if (r == 0) {
            out.push_back("neuron " + std::to_string(i) + " is in neither the hidden nor the output set");
        }
    }

    std::set<std::pair<int, int>> seen;
    for (const auto &[from, to] : g.edges) {
        if (!in_range(from) || !in_range(to)) {
            out.push_back("dangling edge (" + std::to_string(from) + ", " + std::to_string(to) + ")");
            continue;
        }
        if (from == to) {
            out.push_back("self-edge on neuron " + std::to_string(from) + "; use self_synapse instead");
        }
        if (role[static_cast<std::size_t>(from)] & 2) {
            out.push_back("output isolation violated: output neuron " + std::to_string(from) +
                          " has an outgoing edge to " + std::to_string(to));
        }
        if (!seen.insert({from, to}).second) {
            out.push_back("duplicate edge (" + std::to_string(from) + ", " + std::to_string(to) + ")");
        }
    }
    std::set<std::pair<int, int>> seen_in;
    for (const auto &[from, to] : g.input_edges) {
        if (from < 0 || from >= g.input_dim || !in_range(to)) {
            out.push_back("dangling input edge (" + std::to_string(from) + ", " + std::to_string(to) + ")");
            continue;
        }
        if (!seen_in.insert({from, to}).second) {
            out.push_back("duplicate input edge (" + std::to_string(from) + ", " + std::to_string(to) + ")");
        }
    }
    if (!out.empty()) {
        return out;
    }

    for (int i = 0; i < n; ++i) {
        const Neuron &nr = g.neurons[static_cast<std::size_t>(i)];
        const auto ps = g.parents(i);
        if (static_cast<int>(ps.size()) != nr.fan_in()) {
            out.push_back("neuron " + std::to_string(i) + " has " + std::to_string(ps.size()) +
                          " parents but fan-in " + std::to_string(nr.fan_in()));
        }
        for (const auto &p : ps) {
            if (p.kind == Source::Kind::kNeuron) {
                const int c = g.neurons[static_cast<std::size_t>(p.index)].channels();
                if (c != 1 && c != nr.channels()) {
                    out.push_back("neuron " + std::to_string(i) + " has " + std::to_string(nr.channels()) +
                                  " channels but parent " + std::to_string(p.index) + " has " + std::to_string(c));
                }
            }
        }
        try {
            std::visit(
                [](const auto &m) {
                    m.config.validate();
                    m.params.validate(m.config);
                },
                nr.model);
        } catch (const std::exception &e) {
            out.push_back("neuron " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

inline void require_valid(const NetworkGraph &g) {
    const auto v = validate(g);
    if (!v.empty()) {
        std::string msg = "invalid network:";
        for (const auto &s : v) {
            msg += "\n  " + s;
        }
        throw ConfigError(msg);
    }
}

// ---------------------------------------------------------------- builder

/// Fully connected layers; the last layer is the output set.
struct LayeredSpec {
    int input_dim = 0;
    std::vector<int> layer_sizes;
    NeuronKind kind = NeuronKind::kSqs;
    int io_qubits = 1;
    int memory_qubits = 0;
    std::optional<Ansatz> ansatz;  // defaults to Ansatz::standard
    QlifConfig qlif;
    LifConfig lif;
    bool self_synapse = false;
};

inline NetworkGraph build_feedforward(const LayeredSpec &spec, StreamKey key) {
    if (spec.input_dim < 1) {
        throw ConfigError("feedforward network needs at least one input");
    }
    if (spec.layer_sizes.empty()) {
        throw ConfigError("feedforward network needs at least one layer");
    }
    for (int s : spec.layer_sizes) {
        if (s < 1) {
            throw ConfigError("feedforward layer sizes must be positive");
        }
    }
    NetworkGraph g;
    g.input_dim = spec.input_dim;
    std::vector<int> prev;
    int in_count = spec.input_dim;
    const int layers = static_cast<int>(spec.layer_sizes.size());
    for (int l = 0; l < layers; ++l) {
        std::vector<int> cur;
        for (int k = 0; k < spec.layer_sizes[static_cast<std::size_t>(l)]; ++k) {
            const int id = g.size();
            cur.push_back(id);
            if (l == 0) {
                for (int c = 0; c < spec.input_dim; ++c) {
                    g.input_edges.emplace_back(c, id);
                }
            } else {
                for (int p : prev) {
                    g.edges.emplace_back(p, id);
                }
            }
            const int fan_in = in_count + (spec.self_synapse ? 1 : 0);
            const double bound = fan_in > 0 ? 1.0 / std::sqrt(static_cast<double>(fan_in)) : 0.0;
            Stream init = key.derive(Purpose::kInit, static_cast<std::uint64_t>(id)).stream();
            auto draw_weight = [&] { return (2 * init.uniform() - 1) * bound; };

            Neuron nr;
            nr.id = "n" + std::to_string(id);
            nr.layer = l;
            nr.self_synapse = spec.self_synapse;
            switch (spec.kind) {
                case NeuronKind::kSqs: {
                    SqsModel m;
                    m.config.io_qubits = spec.io_qubits;
                    m.config.memory_qubits = spec.memory_qubits;
                    m.config.fan_in = fan_in;
                    m.config.ansatz = spec.ansatz.value_or(Ansatz::standard(spec.io_qubits, spec.memory_qubits));
                    m.config.validate();
                    m.params.weights.resize(spec.io_qubits, fan_in);
                    for (Eigen::Index p = 0; p < fan_in; ++p) {
                        for (Eigen::Index r = 0; r < spec.io_qubits; ++r) {
                            m.params.weights(r, p) = draw_weight();
                        }
                    }
                    m.params.theta.resize(m.config.ansatz.num_params());
                    for (auto &th : m.params.theta) {
                        th = init.uniform() * std::numbers::pi;
                    }
                    nr.model = std::move(m);
                    break;
                }
                case NeuronKind::kQlif: {
                    QlifModel m;
                    m.config = spec.qlif;
                    m.config.fan_in = fan_in;
                    m.config.validate();
                    m.params.w_excite.resize(fan_in);
                    m.params.w_leak.resize(fan_in);
                    for (Eigen::Index p = 0; p < fan_in; ++p) {
                        m.params.w_excite[p] = draw_weight();
                        m.params.w_leak[p] = draw_weight();
                    }
                    nr.model = std::move(m);
                    break;
                }
                case NeuronKind::kLif: {
                    LifModel m;
                    m.config = spec.lif;
                    m.config.fan_in = fan_in;
                    m.config.validate();
                    m.params.weights.resize(fan_in);
                    for (Eigen::Index p = 0; p < fan_in; ++p) {
                        m.params.weights[p] = draw_weight();
                    }
                    nr.model = std::move(m);
                    break;
                }
            }
            g.neurons.push_back(std::move(nr));
            (l + 1 == layers ? g.output : g.hidden).push_back(id);
        }
        prev = cur;
        in_count = static_cast<int>(cur.size());
    }
    require_valid(g);
    return g;
}

// ---------------------------------------------------------------- forward

struct ForwardOptions {
    Mode mode = Mode::exact();
    /// Per neuron: a train to impose instead of sampling, or null. Empty = none.
    std::vector<const SpikeTrain *> forced;
    /// Order in which neurons are stepped inside a time step. Empty = index order.
    std::vector<int> step_order;
    WorkCounter *counter = nullptr;
};

struct TrajectoryRecord {
    NeuronTrains spikes;
    /// Per neuron and step: outcome table used for scoring (shot estimate in shots mode).
    std::vector<std::vector<ProbabilityTable>> tables;
    /// Exact probability of the recorded outcome given the past.
    std::vector<std::vector<double>> outcome_prob;
    /// Activity used by the rate regularizer: expected spike count for SQS,
    /// excitation probability for QLIF, membrane potential for LIF.
    std::vector<std::vector<double>> activity;

    int steps() const {
        return spikes.empty() ? 0 : spikes.front().steps();
    }
};

namespace detail {

inline std::uint8_t source_bit(const NetworkGraph &g, const Source &src, const SpikeTrain &input,
                               const NeuronTrains &spikes, int t, int channel) {
    if (src.kind == Source::Kind::kInput) {
        return input.at(t, src.index);
    }
    if (t == 0) {
        return 0;
    }
    const SpikeTrain &s = spikes[static_cast<std::size_t>(src.index)];
    const int c = g.neurons[static_cast<std::size_t>(src.index)].channels() == 1 ? 0 : channel;
    return s.at(t - 1, c);
}

}  // namespace detail

/// Presynaptic spike matrix seen by neuron i at step t: inputs from step t,
/// neuron spikes from step t - 1.
inline SpikeMatrix gather_inputs(const NetworkGraph &g, int i, std::span<const Source> parents,
                                 const SpikeTrain &input, const NeuronTrains &spikes, int t) {
    const int channels = g.neurons[static_cast<std::size_t>(i)].channels();
    SpikeMatrix x(channels, static_cast<Eigen::Index>(parents.size()));
    for (std::size_t p = 0; p < parents.size(); ++p) {
        for (int c = 0; c < channels; ++c) {
            x(c, static_cast<Eigen::Index>(p)) = detail::source_bit(g, parents[p], input, spikes, t, c);
        }
    }
    return x;
}

/// Per-neuron recurrent state for stepping a network.
using NeuronState = std::variant<SqsState, QlifState, LifState>;

inline NeuronState initial_state(const Neuron &n) {
    switch (n.kind()) {
        case NeuronKind::kSqs:
            return SqsState::initial(std::get<SqsModel>(n.model).config);
        case NeuronKind::kQlif:
            return QlifState{};
        case NeuronKind::kLif:
            return LifState{};
    }
    return LifState{};
}

/// Samples a trajectory from the network's joint law. Neuron i at step t
/// conditions on its parents' spikes at t - 1 and on external inputs at t.
inline TrajectoryRecord forward(const NetworkGraph &g, const SpikeTrain &input, StreamKey key,
                                const ForwardOptions &opt = {}) {
    const int steps = input.steps();
    if (steps < 1) {
        throw InvalidArgument("forward: input must have at least one step");
    }
    if (input.channels() != g.input_dim) {
        throw InvalidArgument("forward: input has " + std::to_string(input.channels()) + " channels, network expects " +
                              std::to_string(g.input_dim));
    }
    const int n = g.size();
    if (!opt.forced.empty() && static_cast<int>(opt.forced.size()) != n) {
        throw InvalidArgument("forward: forced list must be empty or one entry per neuron");
    }
    std::vector<int> order = opt.step_order;
    if (order.empty()) {
        order.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            order[static_cast<std::size_t>(i)] = i;
        }
    } else {
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(sorted.size()) != n || sorted[static_cast<std::size_t>(i)] != i) {
                throw InvalidArgument("forward: step order is not a permutation of the neurons");
            }
        }
    }

    TrajectoryRecord rec;
    rec.spikes.reserve(static_cast<std::size_t>(n));
    std::vector<std::vector<Source>> parents(static_cast<std::size_t>(n));
    std::vector<NeuronState> states;
    for (int i = 0; i < n; ++i) {
        const Neuron &nr = g.neurons[static_cast<std::size_t>(i)];
        rec.spikes.emplace_back(steps, nr.channels());
        parents[static_cast<std::size_t>(i)] = g.parents(i);
        states.push_back(initial_state(nr));
        const SpikeTrain *f = opt.forced.empty() ? nullptr : opt.forced[static_cast<std::size_t>(i)];
        if (f && (f->steps() != steps || f->channels() != nr.channels())) {
            throw InvalidArgument("forward: forced train for neuron " + std::to_string(i) + " has the wrong shape");
        }
    }
    rec.tables.assign(static_cast<std::size_t>(n), std::vector<ProbabilityTable>(static_cast<std::size_t>(steps)));
    rec.outcome_prob.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(steps), 0.0));
    rec.activity.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(steps), 0.0));

    for (int t = 0; t < steps; ++t) {
        for (int i : order) {
            const auto iu = static_cast<std::size_t>(i);
            const Neuron &nr = g.neurons[iu];
            const SpikeTrain *forced = opt.forced.empty() ? nullptr : opt.forced[iu];
            const SpikeMatrix x = gather_inputs(g, i, parents[iu], input, rec.spikes, t);
            const auto tu = static_cast<std::uint64_t>(t);
            const auto ii = static_cast<std::uint64_t>(i);
            if (const auto *m = std::get_if<SqsModel>(&nr.model)) {
                auto &st = std::get<SqsState>(states[iu]);
                const DensityMatrix rho = sqs_joint_state(m->config, st.memory, m->params, x, opt.counter);
                const ProbabilityTable exact = born_distribution(rho, m->config.io_indices());
                BitString out;
                if (forced) {
                    out.bits.assign(forced->row(t).begin(), forced->row(t).end());
                } else {
                    Stream rs = key.derive(ii, tu, Purpose::kSpike).stream();
                    out = sample_outcome(exact, rs);
                }
                double p = 0;
                DensityMatrix mem = conditional_memory(m->config, rho, out, &p);
                st = SqsState{std::move(mem), t + 1};
                rec.outcome_prob[iu][static_cast<std::size_t>(t)] = exact[out.to_index()];
                double act = 0;
                for (int c = 0; c < m->config.io_qubits; ++c) {
                    act += exact.marginal_one(c);
                    rec.spikes[iu].set(t, c, out.bits[static_cast<std::size_t>(c)] != 0);
                }
                rec.activity[iu][static_cast<std::size_t>(t)] = act;
                if (opt.mode.is_exact()) {
                    rec.tables[iu][static_cast<std::size_t>(t)] = exact;
                } else {
                    Stream shots = key.derive(ii, tu, Purpose::kShots).stream();
                    rec.tables[iu][static_cast<std::size_t>(t)] = estimate_table(exact, opt.mode.shots, shots);
                }
            } else if (const auto *q = std::get_if<QlifModel>(&nr.model)) {
                auto &st = std::get<QlifState>(states[iu]);
                Stream shots = key.derive(ii, tu, Purpose::kShots).stream();
                QlifStep r = qlif_step(st, q->params, q->config, std::span(x.data(), static_cast<std::size_t>(x.size())),
                                       &shots);
                const bool spike = forced ? forced->at(t, 0) != 0 : r.spike;
                st = QlifState{r.alpha, spike};
                rec.spikes[iu].set(t, 0, spike);
                rec.outcome_prob[iu][static_cast<std::size_t>(t)] = spike == r.spike ? 1.0 : 0.0;
                rec.tables[iu][static_cast<std::size_t>(t)] = ProbabilityTable::point_mass(r.spike ? 1 : 0, 1);
                rec.activity[iu][static_cast<std::size_t>(t)] = r.alpha;
            } else {
                const auto &l = std::get<LifModel>(nr.model);
                auto &st = std::get<LifState>(states[iu]);
                LifStep r = lif_step(st, l.params, l.config, std::span(x.data(), static_cast<std::size_t>(x.size())));
                const bool spike = forced ? forced->at(t, 0) != 0 : r.spike;
                st = LifState{r.potential, spike};
                rec.spikes[iu].set(t, 0, spike);
                rec.outcome_prob[iu][static_cast<std::size_t>(t)] = spike == r.spike ? 1.0 : 0.0;
                rec.tables[iu][static_cast<std::size_t>(t)] = ProbabilityTable::point_mass(r.spike ? 1 : 0, 1);
                rec.activity[iu][static_cast<std::size_t>(t)] = r.potential;
            }
        }
    }
    return rec;
}

// ---------------------------------------------------------------- readout

/// Class with the most spikes; ties go to the lowest index.
inline int rate_decode(std::span<const std::uint64_t> counts) {
    if (counts.empty()) {
        throw InvalidArgument("rate_decode: no output neurons");
    }
    int best = 0;
    for (std::size_t k = 1; k < counts.size(); ++k) {
        if (counts[k] > counts[static_cast<std::size_t>(best)]) {
            best = static_cast<int>(k);
        }
    }
    return best;
}

inline std::vector<std::uint64_t> output_counts(const NetworkGraph &g, const TrajectoryRecord &rec) {
    std::vector<std::uint64_t> counts;
    for (int o : g.output) {
        counts.push_back(rec.spikes.at(static_cast<std::size_t>(o)).count());
    }
    return counts;
}

inline int rate_decode(const NetworkGraph &g, const TrajectoryRecord &rec) {
    const auto counts = output_counts(g, rec);
    return rate_decode(counts);
}

/// Aggregate spike count across every neuron and channel, divided by T.
inline double spikes_per_step(const TrajectoryRecord &rec) {
    std::uint64_t total = 0;
    for (const auto &s : rec.spikes) {
        total += s.count();
    }
    return rec.steps() > 0 ? static_cast<double>(total) / rec.steps() : 0.0;
}

}  // namespace sqsnn
