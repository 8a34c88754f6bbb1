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

// Local zeroth-order training for SQS networks.
//
// Each item runs M global passes with the output neurons pinned to their
// targets, turning each pass into a per-step feedback signal. Every neuron
// then estimates the gradient of its own log-probability for the spikes it
// emitted (or was pinned to), using only its parents' spikes: SPSA for the
// synaptic weights and parameter shifts for the circuit angles. Output
// neurons descend their own log-loss; hidden neurons weight their scores by
// the feedback.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sqsnn/errors.hpp"
#include "sqsnn/learning/objective.hpp"
#include "sqsnn/learning/params.hpp"
#include "sqsnn/network.hpp"
#include "sqsnn/parallel.hpp"
#include "sqsnn/rng.hpp"

namespace sqsnn {

/// How circuit-angle derivatives are formed from shifted evaluations.
enum class ShiftRule {
    kTwoTerm,      // (f(a + pi/2) - f(a - pi/2)) / 2 for every gate
    kGeneralized,  // four-term rule on CRX gates, whose generator has three eigenvalues
};

/// Which feedback values multiply a hidden neuron's score at step t.
enum class FeedbackPairing {
    kSameStep,    // l_t only
    kCumulative,  // sum over t' >= t
    kFuture,      // sum over t' > t
};

enum class LocalEstimator {
    kZerothOrder,       // SPSA + parameter shift, the hardware-compatible path
    kFiniteDifference,  // central differences on every parameter (exact mode only)
};

/// Which steps of the neuron's own recursion see a perturbation.
enum class ReplayScope {
    kStep,    // only the step being scored; earlier memory kept as recorded
    kPrefix,  // every step up to the scored one, outcomes held fixed
};

struct TrainerConfig {
    int passes = 1;              // M
    int spsa_perturbations = 5;  // M_syn
    int shift_repeats = 1;       // M_som
    int shots = 1;               // M_p, used when exact == false
    bool exact = true;
    double epsilon = 0.05;
    double lr_weights = 0.5;
    double lr_theta = 0.5;
    double momentum = 0.0;
    double prob_floor = kDefaultProbFloor;
    double lambda = 0.0;  // surrogate trainer only
    int batch_size = 32;
    std::uint64_t seed = 0;
    ShiftRule shift_rule = ShiftRule::kTwoTerm;
    FeedbackPairing pairing = FeedbackPairing::kFuture;
    LocalEstimator estimator = LocalEstimator::kZerothOrder;
    ReplayScope scope = ReplayScope::kStep;
    double fd_step = 1e-6;
    double clip_norm = 0.0;  // global gradient-norm cap, 0 = off
    int workers = 1;

    Mode mode() const {
        return exact ? Mode::exact() : Mode::with_shots(shots);
    }

    void validate() const {
        if (passes < 1 || spsa_perturbations < 1 || shift_repeats < 1 || shots < 1) {
            throw ConfigError("M, M_syn, M_som and M_p must all be at least 1");
        }
        if (!(epsilon > 0)) {
            throw ConfigError("SPSA epsilon must be positive");
        }
        if (!(prob_floor > 0 && prob_floor <= 1e-3)) {
            throw ConfigError("probability floor must lie in (0, 1e-3]");
        }
        if (!(lr_weights >= 0) || !(lr_theta >= 0)) {
            throw ConfigError("learning rates must be non-negative");
        }
        if (!(momentum >= 0 && momentum < 1)) {
            throw ConfigError("momentum must lie in [0, 1)");
        }
        if (!(lambda >= 0)) {
            throw ConfigError("regularizer weight must be non-negative");
        }
        if (batch_size < 1) {
            throw ConfigError("batch size must be positive");
        }
        if (!(clip_norm >= 0)) {
            throw ConfigError("gradient clip norm must be non-negative");
        }
        if (!(fd_step > 0)) {
            throw ConfigError("finite-difference step must be positive");
        }
        if (estimator == LocalEstimator::kFiniteDifference && !exact) {
            throw ConfigError("the finite-difference estimator needs exact mode");
        }
    }
};

struct CostCounters {
    std::uint64_t global_passes = 0;
    std::uint64_t local_evaluations = 0;  // local circuit runs
    std::uint64_t local_shots = 0;        // M_p per local run

    void add(const CostCounters &o) {
        global_passes += o.global_passes;
        local_evaluations += o.local_evaluations;
        local_shots += o.local_shots;
    }
};

// ---------------------------------------------------------------- replay

/// Everything a neuron needs to replay itself: its inputs, the outcomes it
/// emitted (or was pinned to) and its memory before each step.
struct LocalContext {
    SqsConfig config;
    std::vector<SpikeMatrix> inputs;
    std::vector<BitString> outcomes;
    std::vector<DensityMatrix> memory_before;
    std::vector<double> recorded_prob;  // table entry for the outcome in the global pass

    int steps() const noexcept {
        return static_cast<int>(inputs.size());
    }
};

inline void require_sqs(const NetworkGraph &g) {
    for (int i = 0; i < g.size(); ++i) {
        const Neuron &n = g.neurons[static_cast<std::size_t>(i)];
        if (!std::holds_alternative<SqsModel>(n.model)) {
            throw ConfigError("local learning supports SQS neurons only; neuron " + std::to_string(i) + " is " +
                              kind_name(n.kind()));
        }
    }
}

inline LocalContext make_local_context(const NetworkGraph &g, int i, const SpikeTrain &input,
                                       const TrajectoryRecord &rec) {
    const Neuron &n = g.neurons.at(static_cast<std::size_t>(i));
    const auto *m = std::get_if<SqsModel>(&n.model);
    if (!m) {
        throw ConfigError("local learning supports SQS neurons only; neuron " + std::to_string(i) + " is " +
                          kind_name(n.kind()));
    }
    LocalContext ctx;
    ctx.config = m->config;
    const auto ps = g.parents(i);
    SqsState st = SqsState::initial(m->config);
    for (int t = 0; t < rec.steps(); ++t) {
        ctx.inputs.push_back(gather_inputs(g, i, ps, input, rec.spikes, t));
        BitString b;
        b.bits.assign(rec.spikes[static_cast<std::size_t>(i)].row(t).begin(),
                      rec.spikes[static_cast<std::size_t>(i)].row(t).end());
        ctx.memory_before.push_back(st.memory);
        const auto &table = rec.tables[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
        ctx.recorded_prob.push_back(table[b.to_index()]);
        st = sqs_observe(m->config, st, m->params, ctx.inputs.back(), b).next;
        ctx.outcomes.push_back(std::move(b));
    }
    return ctx;
}

/// Replaces one gate's angle at one step.
struct GateShift {
    int step = -1;
    int gate = 0;  // index into the ansatz gate list
    double shift = 0;
};

/// Exact probability of the recorded outcome at step t under `params`.
inline double replay_prob(const LocalContext &ctx, const SqsParams &params, int t, ReplayScope scope,
                          const std::optional<GateShift> &shift = std::nullopt) {
    const int start = scope == ReplayScope::kStep ? t : 0;
    SqsState st{scope == ReplayScope::kStep ? ctx.memory_before[static_cast<std::size_t>(t)]
                                            : DensityMatrix::ground(ctx.config.memory_qubits),
                start};
    double p = 0;
    for (int s = start; s <= t; ++s) {
        const auto su = static_cast<std::size_t>(s);
        if (shift && shift->step == s) {
            SqsConfig cfg = ctx.config;
            SqsParams pp = params;
            const int extra = static_cast<int>(pp.theta.size());
            const double base = pp.theta[cfg.ansatz.gates.at(static_cast<std::size_t>(shift->gate)).param];
            cfg.ansatz.gates[static_cast<std::size_t>(shift->gate)].param = extra;
            pp.theta.conservativeResize(extra + 1);
            pp.theta[extra] = base + shift->shift;
            SqsObserved r = sqs_observe(cfg, st, pp, ctx.inputs[su], ctx.outcomes[su]);
            p = r.probability;
            st = std::move(r.next);
        } else {
            SqsObserved r = sqs_observe(ctx.config, st, params, ctx.inputs[su], ctx.outcomes[su]);
            p = r.probability;
            st = std::move(r.next);
        }
    }
    return p;
}

namespace detail {

/// One local evaluation: exact probability, or the fraction of M_p shots that
/// reproduce the outcome.
inline double local_estimate(double exact_p, const TrainerConfig &cfg, StreamKey key, CostCounters *counters) {
    if (counters) {
        ++counters->local_evaluations;
        counters->local_shots += static_cast<std::uint64_t>(cfg.shots);
    }
    if (cfg.exact) {
        return exact_p;
    }
    Stream rng = key.stream();
    int hits = 0;
    for (int k = 0; k < cfg.shots; ++k) {
        hits += rng.uniform() < exact_p ? 1 : 0;
    }
    return static_cast<double>(hits) / cfg.shots;
}

}  // namespace detail

// ---------------------------------------------------------------- estimators

/// SPSA estimate of d log Tr(rho^I S_t) / d weights.
inline Eigen::MatrixXd spsa_weight_gradient(const LocalContext &ctx, const SqsParams &params, int t,
                                            const TrainerConfig &cfg, StreamKey key, CostCounters *counters = nullptr) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(params.weights.rows(), params.weights.cols());
    if (params.weights.size() == 0) {
        return grad;
    }
    Stream dirs = key.child(Purpose::kSpsa).stream();
    for (int m = 0; m < cfg.spsa_perturbations; ++m) {
        Eigen::MatrixXd delta(params.weights.rows(), params.weights.cols());
        for (Eigen::Index k = 0; k < delta.size(); ++k) {
            delta.data()[k] = dirs.rademacher();
        }
        SqsParams plus = params, minus = params;
        plus.weights += cfg.epsilon * delta;
        minus.weights -= cfg.epsilon * delta;
        // Both sides share shot randomness.
        const StreamKey shot_key = key.derive(Purpose::kShots, static_cast<std::uint64_t>(m));
        const double op = detail::local_estimate(replay_prob(ctx, plus, t, cfg.scope), cfg, shot_key, counters);
        const double om = detail::local_estimate(replay_prob(ctx, minus, t, cfg.scope), cfg, shot_key, counters);
        grad += (clamped_log(op, cfg.prob_floor) - clamped_log(om, cfg.prob_floor)) / (2 * cfg.epsilon) * delta;
    }
    return grad / cfg.spsa_perturbations;
}

namespace detail {

struct ShiftTerm {
    double shift;
    double coeff;
};

inline std::vector<ShiftTerm> shift_terms(GateKind kind, ShiftRule rule) {
    constexpr double pi = std::numbers::pi;
    if (kind == GateKind::kCRX && rule == ShiftRule::kGeneralized) {
        const double r2 = std::numbers::sqrt2;
        const double c1 = (r2 + 1) / (4 * r2);
        const double c2 = (r2 - 1) / (4 * r2);
        return {{pi / 2, c1}, {-pi / 2, -c1}, {3 * pi / 2, -c2}, {-3 * pi / 2, c2}};
    }
    return {{pi / 2, 0.5}, {-pi / 2, -0.5}};
}

}  // namespace detail

/// Parameter-shift estimate of d Tr(rho^I S_t) / d theta_j (not divided by the probability).
inline double psr_raw_derivative(const LocalContext &ctx, const SqsParams &params, int t, int j,
                                 const TrainerConfig &cfg, StreamKey key, CostCounters *counters = nullptr) {
    const auto &gates = ctx.config.ansatz.gates;
    const int first = cfg.scope == ReplayScope::kStep ? t : 0;
    double total = 0;
    for (int rep = 0; rep < cfg.shift_repeats; ++rep) {
        double sum = 0;
        for (int s = first; s <= t; ++s) {
            for (std::size_t g = 0; g < gates.size(); ++g) {
                if (gates[g].param != j) {
                    continue;
                }
                const auto terms = detail::shift_terms(gates[g].kind, cfg.shift_rule);
                for (std::size_t k = 0; k < terms.size(); ++k) {
                    const GateShift gs{s, static_cast<int>(g), terms[k].shift};
                    const StreamKey shot_key = key.derive(Purpose::kPsr, static_cast<std::uint64_t>(rep),
                                                          static_cast<std::uint64_t>(s), g, k);
                    sum += terms[k].coeff *
                           detail::local_estimate(replay_prob(ctx, params, t, cfg.scope, gs), cfg, shot_key, counters);
                }
            }
        }
        total += sum;
    }
    return total / cfg.shift_repeats;
}

/// d log Tr(rho^I S_t) / d theta_j; the leading 1/Tr factor uses `prob` clamped at the floor.
inline double psr_theta_gradient(const LocalContext &ctx, const SqsParams &params, int t, int j, double prob,
                                 const TrainerConfig &cfg, StreamKey key, CostCounters *counters = nullptr) {
    return psr_raw_derivative(ctx, params, t, j, cfg, key, counters) / std::max(prob, cfg.prob_floor);
}

/// Central differences of log Tr(rho^I S_t) on every parameter, flat layout.
inline Eigen::VectorXd finite_difference_score(const LocalContext &ctx, const SqsParams &params, int t,
                                               const TrainerConfig &cfg) {
    Neuron probe;
    probe.model = SqsModel{ctx.config, params};
    const Eigen::VectorXd base = flatten(probe);
    Eigen::VectorXd grad(base.size());
    for (Eigen::Index k = 0; k < base.size(); ++k) {
        Eigen::VectorXd v = base;
        v[k] += cfg.fd_step;
        unflatten(probe, v);
        const double lp = clamped_log(replay_prob(ctx, probe.sqs().params, t, cfg.scope), cfg.prob_floor);
        v[k] -= 2 * cfg.fd_step;
        unflatten(probe, v);
        const double lm = clamped_log(replay_prob(ctx, probe.sqs().params, t, cfg.scope), cfg.prob_floor);
        grad[k] = (lp - lm) / (2 * cfg.fd_step);
    }
    return grad;
}

/// Local score d log Tr(rho^I S_t) / d params in flat layout.
inline Eigen::VectorXd local_score(const LocalContext &ctx, const SqsParams &params, int t, const TrainerConfig &cfg,
                                   StreamKey key, CostCounters *counters = nullptr) {
    if (cfg.estimator == LocalEstimator::kFiniteDifference) {
        return finite_difference_score(ctx, params, t, cfg);
    }
    const Eigen::Index nw = params.weights.size();
    Eigen::VectorXd g(nw + params.theta.size());
    const Eigen::MatrixXd gw = spsa_weight_gradient(ctx, params, t, cfg, key, counters);
    g.head(nw) = Eigen::Map<const Eigen::VectorXd>(gw.data(), nw);
    const double p0 = ctx.recorded_prob[static_cast<std::size_t>(t)];
    for (Eigen::Index j = 0; j < params.theta.size(); ++j) {
        g[nw + j] = psr_theta_gradient(ctx, params, t, static_cast<int>(j), p0, cfg,
                                       key.derive(static_cast<std::uint64_t>(j)), counters);
    }
    return g;
}

// ---------------------------------------------------------------- assembly

struct GlobalBatch {
    std::vector<TrajectoryRecord> passes;
    std::vector<std::vector<double>> feedback;  // [m][t]
};

inline StreamKey pass_key(StreamKey item_key, int m) {
    return item_key.derive(Purpose::kPass, static_cast<std::uint64_t>(m));
}

/// M teacher-forced passes and their per-step feedback.
inline GlobalBatch global_forward_batch(const NetworkGraph &g, const SpikeTrain &input, const NeuronTrains &targets,
                                        const TrainerConfig &cfg, StreamKey item_key,
                                        CostCounters *counters = nullptr) {
    ForwardOptions opt;
    opt.mode = cfg.mode();
    opt.forced = force_outputs(g, targets);
    GlobalBatch b;
    for (int m = 0; m < cfg.passes; ++m) {
        b.passes.push_back(forward(g, input, pass_key(item_key, m), opt));
        b.feedback.push_back(output_feedback(g, b.passes.back(), targets, !cfg.exact, cfg.prob_floor));
        if (counters) {
            ++counters->global_passes;
        }
    }
    return b;
}

/// -(1/M) sum_m sum_t score[m][t].
inline Eigen::VectorXd assemble_output_gradient(const std::vector<std::vector<Eigen::VectorXd>> &scores) {
    if (scores.empty() || scores.front().empty()) {
        throw InvalidArgument("assemble_output_gradient: no scores");
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(scores.front().front().size());
    for (const auto &pass : scores) {
        for (const auto &s : pass) {
            g -= s;
        }
    }
    return g / static_cast<double>(scores.size());
}

inline std::vector<double> paired_feedback(const std::vector<double> &loss, FeedbackPairing pairing) {
    std::vector<double> f(loss.size(), 0.0);
    double tail = 0;
    for (std::size_t k = loss.size(); k-- > 0;) {
        switch (pairing) {
            case FeedbackPairing::kSameStep:
                f[k] = loss[k];
                break;
            case FeedbackPairing::kCumulative:
                tail += loss[k];
                f[k] = tail;
                break;
            case FeedbackPairing::kFuture:
                f[k] = tail;
                tail += loss[k];
                break;
        }
    }
    return f;
}

/// (1/M) sum_m sum_t F_t(m) score[m][t], with F from the pairing rule.
inline Eigen::VectorXd assemble_hidden_gradient(const std::vector<std::vector<Eigen::VectorXd>> &scores,
                                                const std::vector<std::vector<double>> &feedback,
                                                FeedbackPairing pairing) {
    if (scores.empty() || scores.front().empty() || feedback.size() != scores.size()) {
        throw InvalidArgument("assemble_hidden_gradient: scores and feedback disagree");
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(scores.front().front().size());
    for (std::size_t m = 0; m < scores.size(); ++m) {
        const auto f = paired_feedback(feedback[m], pairing);
        for (std::size_t t = 0; t < scores[m].size(); ++t) {
            g += f[t] * scores[m][t];
        }
    }
    return g / static_cast<double>(scores.size());
}

struct ItemGradient {
    ParamSet grad;
    double loss = 0;  // mean over passes of sum_t feedback
    CostCounters counters;
};

/// Gradient of the bound for one item, estimated locally at every neuron.
inline ItemGradient local_item_gradient(const NetworkGraph &g, const SpikeTrain &input, const NeuronTrains &targets,
                                        const TrainerConfig &cfg, StreamKey item_key) {
    require_sqs(g);
    ItemGradient out;
    const GlobalBatch batch = global_forward_batch(g, input, targets, cfg, item_key, &out.counters);
    for (const auto &f : batch.feedback) {
        for (double l : f) {
            out.loss += l;
        }
    }
    out.loss /= cfg.passes;
    for (int i = 0; i < g.size(); ++i) {
        const auto &params = g.neurons[static_cast<std::size_t>(i)].sqs().params;
        std::vector<std::vector<Eigen::VectorXd>> scores;
        for (int m = 0; m < cfg.passes; ++m) {
            const LocalContext ctx = make_local_context(g, i, input, batch.passes[static_cast<std::size_t>(m)]);
            std::vector<Eigen::VectorXd> per_step;
            for (int t = 0; t < ctx.steps(); ++t) {
                const StreamKey k = pass_key(item_key, m).derive(static_cast<std::uint64_t>(i),
                                                                 static_cast<std::uint64_t>(t));
                per_step.push_back(local_score(ctx, params, t, cfg, k, &out.counters));
            }
            scores.push_back(std::move(per_step));
        }
        out.grad.push_back(g.is_output(i) ? assemble_output_gradient(scores)
                                          : assemble_hidden_gradient(scores, batch.feedback, cfg.pairing));
    }
    return out;
}

struct TrainingItem {
    SpikeTrain input;
    NeuronTrains targets;
    std::uint64_t id = 0;  // stable per-sample tag for random streams
};

struct StepResult {
    double loss = 0;
    CostCounters counters;
};

inline StreamKey item_key(std::uint64_t seed, std::uint64_t iteration, std::uint64_t item) {
    return StreamKey(seed).derive(Purpose::kIteration, iteration, Purpose::kItem, item);
}

/// One update from a mini-batch: per-item gradients are averaged, then applied once.
inline StepResult local_train_step(NetworkGraph &g, const std::vector<TrainingItem> &batch,
                                   const TrainerConfig &cfg, Sgd &opt, std::uint64_t iteration) {
    cfg.validate();
    if (batch.empty()) {
        throw InvalidArgument("local_train_step: empty batch");
    }
    std::vector<ItemGradient> per_item(batch.size());
    parallel_for(batch.size(), cfg.workers, [&](std::size_t k) {
        per_item[k] = local_item_gradient(g, batch[k].input, batch[k].targets, cfg,
                                          item_key(cfg.seed, iteration, batch[k].id));
    });
    StepResult r;
    ParamSet grad = zeros_like(flatten(g));
    for (const auto &it : per_item) {
        accumulate(grad, it.grad, 1.0 / static_cast<double>(batch.size()));
        r.loss += it.loss / static_cast<double>(batch.size());
        r.counters.add(it.counters);
    }
    clip_norm(grad, cfg.clip_norm);
    opt.step(g, grad);
    return r;
}

}  // namespace sqsnn
