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

// JSON form of a network graph and of a training checkpoint.
//
//   {"format": "sqsnn-graph", "version": 1, "input_dim": 4,
//    "neurons": [{"id": "n0", "kind": "sqs", "layer": 0, "self_synapse": false,
//                 "config": {...}, "params": {...}}, ...],
//    "edges": [[0, 2], ...], "input_edges": [[0, 0], ...],
//    "hidden": [0, 1], "output": [2, 3]}
//
// SQS weights are stored row by row (one row per input-output channel).

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sqsnn/encoding.hpp"
#include "sqsnn/errors.hpp"
#include "sqsnn/learning/params.hpp"
#include "sqsnn/network.hpp"

namespace sqsnn {

using Json = nlohmann::json;

inline constexpr int kGraphFormatVersion = 1;

namespace detail {

inline Json vector_json(const Eigen::VectorXd &v) {
    return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Eigen::VectorXd json_vector(const Json &j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Json ansatz_json(const Ansatz &a) {
    Json out = Json::array();
    for (const auto &g : a.gates) {
        out.push_back({{"gate", g.kind == GateKind::kRX ? "rx" : "crx"}, {"qubits", g.qubits}, {"param", g.param}});
    }
    return out;
}

inline Ansatz json_ansatz(const Json &j) {
    Ansatz a;
    for (const auto &g : j) {
        const auto name = g.at("gate").get<std::string>();
        if (name != "rx" && name != "crx") {
            throw ConfigError("unknown ansatz gate '" + name + "'");
        }
        a.gates.push_back({name == "rx" ? GateKind::kRX : GateKind::kCRX, g.at("qubits").get<std::vector<int>>(),
                           g.at("param").get<int>()});
    }
    return a;
}

inline Json neuron_json(const Neuron &n) {
    Json j{{"id", n.id}, {"kind", kind_name(n.kind())}, {"layer", n.layer}, {"self_synapse", n.self_synapse}};
    if (const auto *s = std::get_if<SqsModel>(&n.model)) {
        j["config"] = {{"io_qubits", s->config.io_qubits},
                       {"memory_qubits", s->config.memory_qubits},
                       {"fan_in", s->config.fan_in},
                       {"ansatz", ansatz_json(s->config.ansatz)}};
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < s->params.weights.rows(); ++r) {
            rows.push_back(vector_json(s->params.weights.row(r).transpose()));
        }
        j["params"] = {{"weights", rows}, {"theta", vector_json(s->params.theta)}};
    } else if (const auto *q = std::get_if<QlifModel>(&n.model)) {
        j["config"] = {{"threshold", q->config.threshold}, {"beta", q->config.beta}, {"t1", q->config.t1},
                       {"shots", q->config.shots},         {"fan_in", q->config.fan_in}};
        j["params"] = {{"w_excite", vector_json(q->params.w_excite)}, {"w_leak", vector_json(q->params.w_leak)}};
    } else {
        const auto &l = std::get<LifModel>(n.model);
        j["config"] = {{"decay", l.config.decay}, {"threshold", l.config.threshold}, {"fan_in", l.config.fan_in}};
        j["params"] = {{"weights", vector_json(l.params.weights)}};
    }
    return j;
}

inline Neuron json_neuron(const Json &j) {
    Neuron n;
    n.id = j.at("id").get<std::string>();
    n.layer = j.value("layer", 0);
    n.self_synapse = j.value("self_synapse", false);
    const Json &c = j.at("config");
    const Json &p = j.at("params");
    switch (parse_kind(j.at("kind").get<std::string>())) {
        case NeuronKind::kSqs: {
            SqsModel m;
            m.config.io_qubits = c.at("io_qubits").get<int>();
            m.config.memory_qubits = c.at("memory_qubits").get<int>();
            m.config.fan_in = c.at("fan_in").get<int>();
            m.config.ansatz = c.contains("ansatz") ? json_ansatz(c.at("ansatz"))
                                                   : Ansatz::standard(m.config.io_qubits, m.config.memory_qubits);
            const Json &rows = p.at("weights");
            m.params.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), m.config.fan_in);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const Eigen::VectorXd row = json_vector(rows[r]);
                if (row.size() != m.config.fan_in) {
                    throw ConfigError("neuron " + n.id + ": weight row has the wrong length");
                }
                m.params.weights.row(static_cast<Eigen::Index>(r)) = row.transpose();
            }
            m.params.theta = json_vector(p.at("theta"));
            n.model = std::move(m);
            break;
        }
        case NeuronKind::kQlif: {
            QlifModel m;
            m.config.threshold = c.value("threshold", m.config.threshold);
            m.config.beta = c.value("beta", m.config.beta);
            m.config.t1 = c.value("t1", m.config.t1);
            m.config.shots = c.value("shots", m.config.shots);
            m.config.fan_in = c.at("fan_in").get<int>();
            m.params.w_excite = json_vector(p.at("w_excite"));
            m.params.w_leak = json_vector(p.at("w_leak"));
            n.model = std::move(m);
            break;
        }
        case NeuronKind::kLif: {
            LifModel m;
            m.config.decay = c.value("decay", m.config.decay);
            m.config.threshold = c.value("threshold", m.config.threshold);
            m.config.fan_in = c.at("fan_in").get<int>();
            m.params.weights = json_vector(p.at("weights"));
            n.model = std::move(m);
            break;
        }
    }
    return n;
}

}  // namespace detail

inline Json graph_to_json(const NetworkGraph &g) {
    Json neurons = Json::array();
    for (const auto &n : g.neurons) {
        neurons.push_back(detail::neuron_json(n));
    }
    return Json{{"format", "sqsnn-graph"}, {"version", kGraphFormatVersion},
                {"input_dim", g.input_dim}, {"neurons", neurons},
                {"edges", g.edges},         {"input_edges", g.input_edges},
                {"hidden", g.hidden},       {"output", g.output}};
}

/// Parses and validates a graph. Any schema or structural problem is a ConfigError.
inline NetworkGraph graph_from_json(const Json &j) {
    NetworkGraph g;
    try {
        if (j.value("format", std::string{}) != "sqsnn-graph") {
            throw ConfigError("not an sqsnn graph document");
        }
        if (j.value("version", 0) != kGraphFormatVersion) {
            throw ConfigError("unsupported graph format version");
        }
        g.input_dim = j.at("input_dim").get<int>();
        for (const auto &n : j.at("neurons")) {
            g.neurons.push_back(detail::json_neuron(n));
        }
        g.edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
        g.input_edges = j.at("input_edges").get<std::vector<std::pair<int, int>>>();
        g.hidden = j.at("hidden").get<std::vector<int>>();
        g.output = j.at("output").get<std::vector<int>>();
    } catch (const Json::exception &e) {
        throw ConfigError(std::string("graph JSON: ") + e.what());
    }
    require_valid(g);
    return g;
}

struct Checkpoint {
    NetworkGraph graph;
    Sgd optimizer;
    std::uint64_t iteration = 0;
};

inline Json checkpoint_to_json(const Checkpoint &c) {
    Json velocity = Json::array();
    for (const auto &v : c.optimizer.velocity()) {
        velocity.push_back(detail::vector_json(v));
    }
    return Json{{"format", "sqsnn-checkpoint"},
                {"version", kGraphFormatVersion},
                {"iteration", c.iteration},
                {"graph", graph_to_json(c.graph)},
                {"optimizer",
                 {{"lr_weights", c.optimizer.lr_weights()},
                  {"lr_theta", c.optimizer.lr_theta()},
                  {"momentum", c.optimizer.momentum()},
                  {"steps", c.optimizer.steps()},
                  {"velocity", velocity}}}};
}

inline Checkpoint checkpoint_from_json(const Json &j) {
    if (j.value("format", std::string{}) == "sqsnn-graph") {
        return Checkpoint{graph_from_json(j), Sgd{}, 0};
    }
    try {
        if (j.value("format", std::string{}) != "sqsnn-checkpoint") {
            throw ConfigError("not an sqsnn checkpoint document");
        }
        Checkpoint c;
        c.graph = graph_from_json(j.at("graph"));
        c.iteration = j.value("iteration", std::uint64_t{0});
        const Json &o = j.at("optimizer");
        c.optimizer = Sgd(o.at("lr_weights").get<double>(), o.at("lr_theta").get<double>(),
                          o.at("momentum").get<double>());
        c.optimizer.set_steps(o.value("steps", std::uint64_t{0}));
        ParamSet v;
        for (const auto &x : o.at("velocity")) {
            v.push_back(detail::json_vector(x));
        }
        if (!v.empty()) {
            const ParamSet shape = flatten(c.graph);
            if (v.size() != shape.size()) {
                throw ConfigError("checkpoint velocity does not match the graph");
            }
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i].size() != shape[i].size()) {
                    throw ConfigError("checkpoint velocity does not match the graph");
                }
            }
        }
        c.optimizer.set_velocity(std::move(v));
        return c;
    } catch (const Json::exception &e) {
        throw ConfigError(std::string("checkpoint JSON: ") + e.what());
    }
}

inline void save_checkpoint(const std::filesystem::path &path, const Checkpoint &c) {
    detail::write_atomic(path, checkpoint_to_json(c).dump(1) + "\n");
}

/// Loads a checkpoint or a bare graph document.
inline Checkpoint load_checkpoint(const std::filesystem::path &path) {
    const auto bytes = detail::read_file(path);
    Json j = Json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError("checkpoint " + path.string() + " is not valid JSON");
    }
    return checkpoint_from_json(j);
}

}  // namespace sqsnn
