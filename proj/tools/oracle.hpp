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

// Self-checks on randomly drawn networks small enough to enumerate.

#include <cmath>
#include <ostream>
#include <string>

#include "experiment.hpp"
#include "sqsnn/sqsnn.hpp"

namespace sqsnn::cli {

struct TinyInstance {
    NetworkGraph graph;
    SpikeTrain input;
    NeuronTrains targets;
};

/// Up to two hidden SQS neurons feeding one output, one channel each, T <= 2.
inline TinyInstance random_tiny_instance(StreamKey key) {
    Stream r = key.stream();
    LayeredSpec spec;
    spec.input_dim = 1 + static_cast<int>(r() % 2);
    const int hidden = static_cast<int>(r() % 3);
    spec.layer_sizes = hidden > 0 ? std::vector<int>{hidden, 1} : std::vector<int>{1};
    spec.memory_qubits = static_cast<int>(r() % 2);
    TinyInstance inst;
    inst.graph = build_feedforward(spec, key.child(1));
    const int steps = 1 + static_cast<int>(r() % 2);
    inst.input = SpikeTrain(steps, spec.input_dim);
    for (int t = 0; t < steps; ++t) {
        for (int c = 0; c < spec.input_dim; ++c) {
            inst.input.set(t, c, r.bernoulli(0.7));
        }
    }
    SpikeTrain target(steps, 1);
    for (int t = 0; t < steps; ++t) {
        target.set(t, 0, r.bernoulli(0.5));
    }
    inst.targets.push_back(std::move(target));
    return inst;
}

namespace detail {

inline DensityMatrix random_density(int n, Stream &r) {
    const Eigen::Index d = Eigen::Index{1} << n;
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(r() % static_cast<std::uint64_t>(d));
    CMatrix a(d, rank);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a.data()[i] = Complex(2 * r.uniform() - 1, 2 * r.uniform() - 1);
    }
    CMatrix m = a * a.adjoint();
    m /= m.trace().real();
    return DensityMatrix::from_matrix(std::move(m));
}

class Reporter {
   public:
    explicit Reporter(std::ostream &out) : out_(out) {
    }
    void check(const std::string &name, bool ok, const std::string &detail) {
        out_ << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        ok_ = ok_ && ok;
    }
    bool ok() const noexcept {
        return ok_;
    }

   private:
    std::ostream &out_;
    bool ok_ = true;
};

}  // namespace detail

/// Runs every check and prints one line each. `fault` deliberately breaks one
/// check ("jensen" negates the clamped output log-probabilities in the bound,
/// "psr" uses the two-term shift rule on controlled rotations).
inline bool run_oracle_suite(std::uint64_t seed, const std::string &fault, std::ostream &out) {
    const StreamKey root = StreamKey(seed).child(Purpose::kOracle);
    out << "oracle-check seed=" << seed << (fault.empty() ? "" : " fault=" + fault) << "\n";
    detail::Reporter rep(out);

    {
        Stream r = root.child(1).stream();
        double worst = 0;
        std::string problem;
        int cases = 0;
        for (int n = 1; n <= 3; ++n) {
            for (int k = 0; k < 100; ++k, ++cases) {
                const DensityMatrix rho = detail::random_density(n, r);
                const double angle = (2 * r.uniform() - 1) * 2 * std::numbers::pi;
                Unitary u = Unitary::identity(n);
                if (n >= 2 && r.bernoulli(0.5)) {
                    const int c = static_cast<int>(r() % static_cast<std::uint64_t>(n));
                    const int t = (c + 1 + static_cast<int>(r() % static_cast<std::uint64_t>(n - 1))) % n;
                    const std::vector<int> q{c, t};
                    u = embed(crx(angle), q, n);
                } else {
                    const std::vector<int> q{static_cast<int>(r() % static_cast<std::uint64_t>(n))};
                    u = embed(rx(angle), q, n);
                }
                const DensityMatrix next = evolve(rho, u);
                if (auto v = next.invariant_violation()) {
                    problem = *v;
                }
                std::vector<int> all(static_cast<std::size_t>(n));
                for (int q = 0; q < n; ++q) {
                    all[static_cast<std::size_t>(q)] = q;
                }
                worst = std::max(worst, std::abs(born_distribution(next, all).sum() - 1));
            }
        }
        rep.check("kernel invariants", problem.empty() && worst <= kTraceTolerance,
                  std::to_string(cases) + " cases, worst Born normalization error " + format_double(worst) +
                      (problem.empty() ? "" : ", " + problem));
    }

    {
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 50; ++k) {
            const TinyInstance inst = random_tiny_instance(root.derive(2, k));
            const Enumeration e = enumerate_likelihood(inst.graph, inst.input, inst.targets);
            const double bound = fault == "jensen" ? -e.bound : e.bound;
            worst = std::min(worst, bound - e.neg_log_likelihood);
        }
        rep.check("Jensen bound", worst >= -1e-12, "50 nets, smallest bound - nll " + format_double(worst));
    }

    {
        double worst = 0;
        for (int k = 0; k < 50; ++k) {
            const TinyInstance inst = random_tiny_instance(root.derive(3, k));
            const auto traj = enumerate_trajectories(inst.graph, inst.input);
            const int steps = inst.input.steps();
            int offset = 0;
            const int out_neuron = inst.graph.output.front();
            for (int i = 0; i < out_neuron; ++i) {
                offset += inst.graph.neurons[static_cast<std::size_t>(i)].channels() * steps;
            }
            double total = 0, match = 0;
            for (const auto &[code, p] : traj) {
                total += p;
                bool same = true;
                for (int t = 0; t < steps; ++t) {
                    same = same && (((code >> (offset + t)) & 1U) != 0) == inst.targets[0].at(t, 0);
                }
                match += same ? p : 0.0;
            }
            const Enumeration e = enumerate_likelihood(inst.graph, inst.input, inst.targets);
            worst = std::max({worst, std::abs(total - 1), std::abs(match - std::exp(-e.neg_log_likelihood))});
        }
        rep.check("factorization", worst <= 1e-9,
                  "50 nets, worst trajectory-sum / output-marginal error " + format_double(worst));
    }

    {
        double worst = 0;
        for (int k = 0; k < 10; ++k) {
            LayeredSpec spec;
            spec.input_dim = 2;
            spec.layer_sizes = {1};
            spec.memory_qubits = 1;
            const StreamKey key = root.derive(4, k);
            const NetworkGraph g = build_feedforward(spec, key.child(1));
            SpikeTrain input(2, 2);
            Stream r = key.child(2).stream();
            for (int t = 0; t < 2; ++t) {
                for (int c = 0; c < 2; ++c) {
                    input.set(t, c, r.bernoulli(0.7));
                }
            }
            const TrajectoryRecord rec = forward(g, input, key.child(3));
            const LocalContext ctx = make_local_context(g, 0, input, rec);
            TrainerConfig cfg;
            cfg.scope = ReplayScope::kStep;
            cfg.shift_rule = fault == "psr" ? ShiftRule::kTwoTerm : ShiftRule::kGeneralized;
            const SqsParams &params = g.neurons[0].sqs().params;
            for (int t = 0; t < 2; ++t) {
                for (int j = 0; j < params.theta.size(); ++j) {
                    const double psr = psr_raw_derivative(ctx, params, t, j, cfg, key.child(4));
                    SqsParams plus = params, minus = params;
                    const double h = 1e-5;
                    plus.theta[j] += h;
                    minus.theta[j] -= h;
                    const double fd = (replay_prob(ctx, plus, t, cfg.scope) - replay_prob(ctx, minus, t, cfg.scope)) /
                                      (2 * h);
                    worst = std::max(worst, std::abs(psr - fd));
                }
            }
        }
        rep.check("estimator consistency", worst <= 1e-6,
                  "parameter shift vs central differences, worst error " + format_double(worst));
    }
    return rep.ok();
}

}  // namespace sqsnn::cli
