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

// Flat parameter views of neurons and the gradient-descent update.
//
// Layout per neuron kind:
//   sqs   weights (column-major, io_qubits x fan_in), then theta
//   qlif  w_excite, then w_leak
//   lif   weights

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "sqsnn/errors.hpp"
#include "sqsnn/network.hpp"

namespace sqsnn {

/// One flat vector per neuron.
using ParamSet = std::vector<Eigen::VectorXd>;

/// Number of leading entries of the flat vector that are synaptic weights.
inline Eigen::Index weight_count(const Neuron &n) {
    switch (n.kind()) {
        case NeuronKind::kSqs:
            return std::get<SqsModel>(n.model).params.weights.size();
        case NeuronKind::kQlif:
            return 2 * std::get<QlifModel>(n.model).params.w_excite.size();
        case NeuronKind::kLif:
            return std::get<LifModel>(n.model).params.weights.size();
    }
    return 0;
}

inline Eigen::VectorXd flatten(const Neuron &n) {
    if (const auto *s = std::get_if<SqsModel>(&n.model)) {
        const auto &w = s->params.weights;
        Eigen::VectorXd v(w.size() + s->params.theta.size());
        v.head(w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
        v.tail(s->params.theta.size()) = s->params.theta;
        return v;
    }
    if (const auto *q = std::get_if<QlifModel>(&n.model)) {
        Eigen::VectorXd v(2 * q->params.w_excite.size());
        v << q->params.w_excite, q->params.w_leak;
        return v;
    }
    return std::get<LifModel>(n.model).params.weights;
}

inline void unflatten(Neuron &n, const Eigen::VectorXd &v) {
    if (v.size() != flatten(n).size()) {
        throw InvalidArgument("unflatten: vector has " + std::to_string(v.size()) + " entries, neuron needs " +
                              std::to_string(flatten(n).size()));
    }
    if (auto *s = std::get_if<SqsModel>(&n.model)) {
        auto &w = s->params.weights;
        Eigen::Map<Eigen::VectorXd>(w.data(), w.size()) = v.head(w.size());
        s->params.theta = v.tail(s->params.theta.size());
    } else if (auto *q = std::get_if<QlifModel>(&n.model)) {
        const Eigen::Index p = q->params.w_excite.size();
        q->params.w_excite = v.head(p);
        q->params.w_leak = v.tail(p);
    } else {
        std::get<LifModel>(n.model).params.weights = v;
    }
}

inline ParamSet flatten(const NetworkGraph &g) {
    ParamSet out;
    for (const auto &n : g.neurons) {
        out.push_back(flatten(n));
    }
    return out;
}

inline void unflatten(NetworkGraph &g, const ParamSet &p) {
    if (p.size() != g.neurons.size()) {
        throw InvalidArgument("unflatten: parameter set does not match network size");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        unflatten(g.neurons[i], p[i]);
    }
}

inline ParamSet zeros_like(const ParamSet &p) {
    ParamSet z;
    for (const auto &v : p) {
        z.push_back(Eigen::VectorXd::Zero(v.size()));
    }
    return z;
}

inline void accumulate(ParamSet &acc, const ParamSet &g, double scale = 1.0) {
    for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i] += scale * g[i];
    }
}

/// Rescales `g` so its global Euclidean norm is at most `max_norm` (0 disables).
inline void clip_norm(ParamSet &g, double max_norm) {
    if (max_norm <= 0) {
        return;
    }
    double sq = 0;
    for (const auto &v : g) {
        sq += v.squaredNorm();
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        for (auto &v : g) {
            v *= max_norm / norm;
        }
    }
}

/// Plain gradient descent with optional heavy-ball momentum. Weights and
/// circuit angles use separate step sizes.
class Sgd {
   public:
    Sgd() = default;
    Sgd(double lr_weights, double lr_theta, double momentum = 0.0)
        : lr_weights_(lr_weights), lr_theta_(lr_theta), momentum_(momentum) {
        if (!(lr_weights >= 0) || !(lr_theta >= 0) || !(momentum >= 0 && momentum < 1)) {
            throw ConfigError("learning rates must be non-negative and momentum in [0, 1)");
        }
    }

    void step(NetworkGraph &g, const ParamSet &grad) {
        if (grad.size() != g.neurons.size()) {
            throw InvalidArgument("Sgd::step: gradient does not match network");
        }
        if (velocity_.empty()) {
            velocity_ = zeros_like(grad);
        }
        for (std::size_t i = 0; i < grad.size(); ++i) {
            Neuron &n = g.neurons[i];
            Eigen::VectorXd p = flatten(n);
            if (grad[i].size() != p.size()) {
                throw InvalidArgument("Sgd::step: gradient block has the wrong size");
            }
            const Eigen::Index nw = weight_count(n);
            Eigen::VectorXd &v = velocity_[i];
            v = momentum_ * v + grad[i];
            p.head(nw) -= lr_weights_ * v.head(nw);
            p.tail(p.size() - nw) -= lr_theta_ * v.tail(p.size() - nw);
            unflatten(n, p);
        }
        ++steps_;
    }

    const ParamSet &velocity() const noexcept {
        return velocity_;
    }
    void set_velocity(ParamSet v) {
        velocity_ = std::move(v);
    }
    std::uint64_t steps() const noexcept {
        return steps_;
    }
    void set_steps(std::uint64_t s) noexcept {
        steps_ = s;
    }
    double lr_weights() const noexcept {
        return lr_weights_;
    }
    double lr_theta() const noexcept {
        return lr_theta_;
    }
    double momentum() const noexcept {
        return momentum_;
    }

   private:
    double lr_weights_ = 0.1;
    double lr_theta_ = 0.1;
    double momentum_ = 0.0;
    ParamSet velocity_;
    std::uint64_t steps_ = 0;
};

}  // namespace sqsnn
