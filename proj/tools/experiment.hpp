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

// Experiment configuration (TOML) and the training loop behind `sqsnn train`
// and `sqsnn sweep`.
//
//   [dataset]  kind = "synthetic" | "idx" | "usps" | "spiketrain"
//              synthetic: per_class, test_per_class, flip, steps, channels
//              idx:       train, train_labels, test, test_labels
//              usps:      train, test (CSV, label first)
//              spiketrain: train, test
//              classes = [1, 7], train_size, test_size (0 keeps everything)
//   [encoder]  steps, p_max
//   [model]    kind, hidden = [..], io_qubits, memory_qubits, self_synapse,
//              qlif_threshold, qlif_beta, qlif_t1, qlif_shots, lif_decay, lif_threshold
//   [trainer]  kind = "surrogate" | "local", passes, spsa_perturbations,
//              shift_repeats, shots, epsilon, lr_weights, lr_theta, momentum,
//              lambda, batch_size, prob_floor, clip_norm, shift_rule, pairing, estimator,
//              scope, temperature, rate_floor
//   [run]      iterations, eval_every, eval_train_items, seed, out_dir, mode, workers
//   [sweep]    param, values = [..]
//
// Relative dataset paths resolve against $SQSNN_DATA_DIR when it is set and
// against the config file's directory otherwise.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "sqsnn/sqsnn.hpp"
#include "toml.hpp"

namespace sqsnn::cli {

namespace fs = std::filesystem;

struct DatasetSpec {
    std::string kind = "synthetic";
    fs::path train, train_labels, test, test_labels;
    int per_class = 100;
    int test_per_class = 50;
    double flip = 0.1;
    int steps = 10;
    int channels = 8;
    std::vector<int> classes;
    std::uint64_t train_size = 0;
    std::uint64_t test_size = 0;
    EncoderConfig encoder;
};

struct ModelSpec {
    NeuronKind kind = NeuronKind::kSqs;
    std::vector<int> hidden;
    int io_qubits = 1;
    int memory_qubits = 0;
    bool self_synapse = false;
    QlifConfig qlif;
    LifConfig lif;
};

enum class TrainerKind { kSurrogate, kLocal };

struct TrainerSpec {
    TrainerKind kind = TrainerKind::kSurrogate;
    TrainerConfig config;
    SurrogateOptions surrogate;
};

struct RunSpec {
    int iterations = 100;
    int eval_every = 10;
    std::uint64_t eval_train_items = 200;
    std::uint64_t seed = 0;
    fs::path out_dir = "sqsnn-out";
    int workers = 1;
};

struct SweepSpec {
    std::string param;
    std::vector<double> values;
};

struct ExperimentConfig {
    DatasetSpec dataset;
    ModelSpec model;
    TrainerSpec trainer;
    RunSpec run;
    SweepSpec sweep;
};

// ---------------------------------------------------------------- parsing

namespace detail {

/// Reads the keys of one TOML table and rejects any it does not recognise.
class Fields {
   public:
    Fields(const toml::table *table, std::string prefix) : table_(table), prefix_(std::move(prefix)) {
    }

    template <typename T>
    void get(std::string_view key, T &out) {
        used_.insert(std::string(key));
        if (!table_) {
            return;
        }
        const toml::node *node = table_->get(key);
        if (!node) {
            return;
        }
        read(*node, key, out);
    }

    void finish() const {
        if (!table_) {
            return;
        }
        for (const auto &[k, v] : *table_) {
            if (!used_.count(std::string(k.str()))) {
                fail(k.str(), v, "unknown field");
            }
        }
    }

   private:
    [[noreturn]] void fail(std::string_view key, const toml::node &node, const std::string &msg) const {
        throw ConfigError("config field '" + prefix_ + "." + std::string(key) + "' (line " +
                          std::to_string(node.source().begin.line) + "): " + msg);
    }

    void read(const toml::node &n, std::string_view key, double &out) const {
        const auto v = n.value<double>();
        if (!v || !n.is_number()) {
            fail(key, n, "expected a number");
        }
        out = *v;
    }
    void read(const toml::node &n, std::string_view key, int &out) const {
        const auto v = n.value<std::int64_t>();
        if (!v || !n.is_integer() || *v < INT32_MIN || *v > INT32_MAX) {
            fail(key, n, "expected an integer");
        }
        out = static_cast<int>(*v);
    }
    void read(const toml::node &n, std::string_view key, std::uint64_t &out) const {
        const auto v = n.value<std::int64_t>();
        if (!v || !n.is_integer() || *v < 0) {
            fail(key, n, "expected a non-negative integer");
        }
        out = static_cast<std::uint64_t>(*v);
    }
    void read(const toml::node &n, std::string_view key, bool &out) const {
        if (!n.is_boolean()) {
            fail(key, n, "expected true or false");
        }
        out = *n.value<bool>();
    }
    void read(const toml::node &n, std::string_view key, std::string &out) const {
        if (!n.is_string()) {
            fail(key, n, "expected a string");
        }
        out = *n.value<std::string>();
    }
    void read(const toml::node &n, std::string_view key, fs::path &out) const {
        std::string s;
        read(n, key, s);
        out = s;
    }
    template <typename T>
    void read(const toml::node &n, std::string_view key, std::vector<T> &out) const {
        const toml::array *arr = n.as_array();
        if (!arr) {
            fail(key, n, "expected an array");
        }
        out.clear();
        for (const auto &e : *arr) {
            T v{};
            read(e, key, v);
            out.push_back(v);
        }
    }

    const toml::table *table_;
    std::string prefix_;
    std::set<std::string> used_;
};

template <typename E>
E parse_choice(const std::string &field, const std::string &value,
               std::initializer_list<std::pair<const char *, E>> choices) {
    std::string names;
    for (const auto &[name, e] : choices) {
        if (value == name) {
            return e;
        }
        names += names.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError("config field '" + field + "': '" + value + "' is not one of " + names);
}

inline fs::path resolve_data_path(const fs::path &p, const fs::path &config_dir) {
    if (p.empty() || p.is_absolute()) {
        return p;
    }
    if (const char *env = std::getenv("SQSNN_DATA_DIR"); env && *env) {
        return fs::path(env) / p;
    }
    return config_dir / p;
}

}  // namespace detail

/// Checks cross-field constraints and that referenced files exist.
inline void validate(const ExperimentConfig &c) {
    const auto &d = c.dataset;
    d.encoder.validate();
    auto need = [](const fs::path &p, const char *field) {
        if (p.empty()) {
            throw ConfigError(std::string("config field 'dataset.") + field + "' is required for this dataset kind");
        }
        if (!fs::exists(p)) {
            throw ConfigError(std::string("config field 'dataset.") + field + "': file '" + p.string() +
                              "' does not exist");
        }
    };
    if (d.kind == "synthetic") {
        if (d.per_class < 1 || d.test_per_class < 1 || d.channels < 2 || d.steps < 1) {
            throw ConfigError("synthetic dataset needs per_class, test_per_class, steps >= 1 and channels >= 2");
        }
        if (!(d.flip >= 0 && d.flip <= 1)) {
            throw ConfigError("config field 'dataset.flip' must lie in [0, 1]");
        }
    } else if (d.kind == "idx") {
        need(d.train, "train");
        need(d.train_labels, "train_labels");
        need(d.test, "test");
        need(d.test_labels, "test_labels");
    } else if (d.kind == "usps" || d.kind == "spiketrain") {
        need(d.train, "train");
        need(d.test, "test");
    } else {
        throw ConfigError("config field 'dataset.kind': '" + d.kind +
                          "' is not one of synthetic, idx, usps, spiketrain");
    }
    for (int h : c.model.hidden) {
        if (h < 1) {
            throw ConfigError("config field 'model.hidden': layer sizes must be positive");
        }
    }
    if (c.model.io_qubits < 1 || c.model.memory_qubits < 0) {
        throw ConfigError("config fields 'model.io_qubits' >= 1 and 'model.memory_qubits' >= 0 required");
    }
    c.trainer.config.validate();
    c.trainer.surrogate.validate();
    if (c.run.iterations < 0 || c.run.eval_every < 1 || c.run.workers < 1) {
        throw ConfigError("config fields 'run.iterations' >= 0, 'run.eval_every' >= 1, 'run.workers' >= 1 required");
    }
}

inline ExperimentConfig parse_config(const toml::table &root, const fs::path &config_dir) {
    ExperimentConfig c;
    for (const auto &[k, v] : root) {
        static const std::set<std::string> sections{"dataset", "encoder", "model", "trainer", "run", "sweep"};
        if (!sections.count(std::string(k.str())) || !v.is_table()) {
            throw ConfigError("config (line " + std::to_string(v.source().begin.line) + "): unknown section '" +
                              std::string(k.str()) + "'");
        }
    }
    auto section = [&](const char *name) { return detail::Fields(root[name].as_table(), name); };

    {
        auto f = section("dataset");
        auto &d = c.dataset;
        f.get("kind", d.kind);
        f.get("train", d.train);
        f.get("train_labels", d.train_labels);
        f.get("test", d.test);
        f.get("test_labels", d.test_labels);
        f.get("per_class", d.per_class);
        f.get("test_per_class", d.test_per_class);
        f.get("flip", d.flip);
        f.get("steps", d.steps);
        f.get("channels", d.channels);
        f.get("classes", d.classes);
        f.get("train_size", d.train_size);
        f.get("test_size", d.test_size);
        f.finish();
        for (fs::path *p : {&d.train, &d.train_labels, &d.test, &d.test_labels}) {
            *p = detail::resolve_data_path(*p, config_dir);
        }
    }
    {
        auto f = section("encoder");
        f.get("steps", c.dataset.encoder.steps);
        f.get("p_max", c.dataset.encoder.p_max);
        f.finish();
    }
    {
        auto f = section("model");
        auto &m = c.model;
        std::string kind = kind_name(m.kind);
        f.get("kind", kind);
        m.kind = parse_kind(kind);
        f.get("hidden", m.hidden);
        f.get("io_qubits", m.io_qubits);
        f.get("memory_qubits", m.memory_qubits);
        f.get("self_synapse", m.self_synapse);
        f.get("qlif_threshold", m.qlif.threshold);
        f.get("qlif_beta", m.qlif.beta);
        f.get("qlif_t1", m.qlif.t1);
        f.get("qlif_shots", m.qlif.shots);
        f.get("lif_decay", m.lif.decay);
        f.get("lif_threshold", m.lif.threshold);
        f.finish();
    }
    {
        auto f = section("trainer");
        auto &t = c.trainer.config;
        std::string kind = "surrogate", shift = "two-term", pairing = "future", estimator = "zeroth-order",
                    scope = "step";
        f.get("kind", kind);
        f.get("passes", t.passes);
        f.get("spsa_perturbations", t.spsa_perturbations);
        f.get("shift_repeats", t.shift_repeats);
        f.get("shots", t.shots);
        f.get("epsilon", t.epsilon);
        f.get("lr_weights", t.lr_weights);
        f.get("lr_theta", t.lr_theta);
        f.get("momentum", t.momentum);
        f.get("lambda", t.lambda);
        f.get("batch_size", t.batch_size);
        f.get("prob_floor", t.prob_floor);
        f.get("fd_step", t.fd_step);
        f.get("clip_norm", t.clip_norm);
        f.get("shift_rule", shift);
        f.get("pairing", pairing);
        f.get("estimator", estimator);
        f.get("scope", scope);
        f.get("temperature", c.trainer.surrogate.temperature);
        f.get("rate_floor", c.trainer.surrogate.rate_floor);
        f.finish();
        c.trainer.kind = detail::parse_choice<TrainerKind>(
            "trainer.kind", kind, {{"surrogate", TrainerKind::kSurrogate}, {"local", TrainerKind::kLocal}});
        t.shift_rule = detail::parse_choice<ShiftRule>(
            "trainer.shift_rule", shift, {{"two-term", ShiftRule::kTwoTerm}, {"generalized", ShiftRule::kGeneralized}});
        t.pairing = detail::parse_choice<FeedbackPairing>("trainer.pairing", pairing,
                                                          {{"same-step", FeedbackPairing::kSameStep},
                                                           {"cumulative", FeedbackPairing::kCumulative},
                                                           {"future", FeedbackPairing::kFuture}});
        t.estimator = detail::parse_choice<LocalEstimator>(
            "trainer.estimator", estimator,
            {{"zeroth-order", LocalEstimator::kZerothOrder}, {"finite-difference", LocalEstimator::kFiniteDifference}});
        t.scope = detail::parse_choice<ReplayScope>("trainer.scope", scope,
                                                    {{"step", ReplayScope::kStep}, {"prefix", ReplayScope::kPrefix}});
    }
    {
        auto f = section("run");
        auto &r = c.run;
        std::string mode = "exact";
        f.get("iterations", r.iterations);
        f.get("eval_every", r.eval_every);
        f.get("eval_train_items", r.eval_train_items);
        f.get("seed", r.seed);
        f.get("out_dir", r.out_dir);
        f.get("mode", mode);
        f.get("workers", r.workers);
        f.finish();
        c.trainer.config.exact =
            detail::parse_choice<bool>("run.mode", mode, {{"exact", true}, {"shots", false}});
    }
    {
        auto f = section("sweep");
        f.get("param", c.sweep.param);
        f.get("values", c.sweep.values);
        f.finish();
    }
    return c;
}

/// Parses a config file. Syntax errors and bad fields are ConfigErrors.
inline ExperimentConfig load_config(const fs::path &path) {
    if (!fs::exists(path)) {
        throw ConfigError("config file '" + path.string() + "' does not exist");
    }
    toml::table root;
    try {
        root = toml::parse_file(path.string());
    } catch (const toml::parse_error &e) {
        throw ConfigError("config " + path.string() + " (line " + std::to_string(e.source().begin.line) +
                          ", column " + std::to_string(e.source().begin.column) + "): " +
                          std::string(e.description()));
    }
    return parse_config(root, fs::absolute(path).parent_path());
}

// ---------------------------------------------------------------- data and model

struct ExperimentData {
    Dataset train;
    Dataset test;
};

inline ExperimentData load_data(const DatasetSpec &d, std::uint64_t seed) {
    ExperimentData out;
    if (d.kind == "synthetic") {
        const StreamKey key = StreamKey(seed).child(Purpose::kItem);
        out.train = synth_two_pattern(d.per_class, d.flip, d.steps, d.channels, key.child(1));
        out.test = synth_two_pattern(d.test_per_class, d.flip, d.steps, d.channels, key.child(2));
    } else if (d.kind == "idx") {
        out.train = load_idx(d.train, d.train_labels);
        out.test = load_idx(d.test, d.test_labels);
    } else if (d.kind == "usps") {
        out.train = load_usps_csv(d.train);
        out.test = load_usps_csv(d.test);
    } else {
        out.train = load_spiketrain_file(d.train);
        out.test = load_spiketrain_file(d.test);
    }
    if (!d.classes.empty()) {
        out.train = select_classes(out.train, d.classes);
        out.test = select_classes(out.test, d.classes);
    }
    if (d.train_size > 0) {
        out.train = take(out.train, d.train_size);
    }
    if (d.test_size > 0) {
        out.test = take(out.test, d.test_size);
    }
    if (out.train.size() == 0 || out.test.size() == 0) {
        throw ConfigError("dataset split is empty after class selection");
    }
    if (out.train.input_dim != out.test.input_dim || out.train.num_classes != out.test.num_classes) {
        throw ConfigError("train and test splits disagree on input size or class count");
    }
    out.train.validate();
    out.test.validate();
    return out;
}

inline NetworkGraph build_model(const ModelSpec &m, const Dataset &ds, std::uint64_t seed) {
    LayeredSpec spec;
    spec.input_dim = ds.input_dim;
    spec.layer_sizes = m.hidden;
    spec.layer_sizes.push_back(ds.num_classes);
    spec.kind = m.kind;
    spec.io_qubits = m.io_qubits;
    spec.memory_qubits = m.memory_qubits;
    spec.qlif = m.qlif;
    spec.lif = m.lif;
    spec.self_synapse = m.self_synapse;
    return build_feedforward(spec, StreamKey(seed).child(Purpose::kInit));
}

// ---------------------------------------------------------------- training

struct MetricRow {
    std::uint64_t iteration = 0;
    double loss = 0;
    double train_acc = 0;
    double test_acc = 0;
    double spikes_per_step = 0;
};

struct TrainOutcome {
    std::vector<MetricRow> rows;
    double best_test_acc = 0;
    CostCounters cost;
    Checkpoint checkpoint;
    double wall_seconds = 0;
};

inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string metrics_csv(const std::vector<MetricRow> &rows) {
    std::string s = "# sqsnn-metrics v1\niteration,loss,train_acc,test_acc,mean_spikes_per_step\n";
    for (const auto &r : rows) {
        s += std::to_string(r.iteration) + "," + format_double(r.loss) + "," + format_double(r.train_acc) + "," +
             format_double(r.test_acc) + "," + format_double(r.spikes_per_step) + "\n";
    }
    return s;
}

/// Deterministic permutation of 0..n-1 for one epoch.
inline std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
    std::vector<std::size_t> idx(n);
    for (std::size_t k = 0; k < n; ++k) {
        idx[k] = k;
    }
    Stream rng = StreamKey(seed).derive(Purpose::kShuffle, epoch).stream();
    for (std::size_t k = n; k > 1; --k) {
        std::swap(idx[k - 1], idx[rng() % k]);
    }
    return idx;
}

inline TrainOutcome train(const ExperimentConfig &c, const ExperimentData &data, std::ostream *progress = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    TrainerConfig tc = c.trainer.config;
    tc.seed = c.run.seed;
    tc.workers = c.run.workers;
    const Mode mode = tc.mode();
    NetworkGraph g = build_model(c.model, data.train, c.run.seed);
    Sgd opt(tc.lr_weights, tc.lr_theta, tc.momentum);
    const Dataset train_eval =
        c.run.eval_train_items > 0 ? take(data.train, c.run.eval_train_items) : data.train;

    TrainOutcome out;
    std::uint64_t epoch = 0;
    std::vector<TrainingItem> items = encode_items(g, data.train, c.dataset.encoder, c.run.seed, 0, epoch);
    std::vector<std::size_t> order = epoch_order(items.size(), c.run.seed, epoch);
    std::size_t cursor = 0;
    double loss_acc = 0;
    int loss_count = 0;

    auto record = [&](std::uint64_t it) {
        const EvalResult te = evaluate(g, data.test, c.dataset.encoder, c.run.seed, 2, mode, c.run.workers);
        const EvalResult tr = evaluate(g, train_eval, c.dataset.encoder, c.run.seed, 1, mode, c.run.workers);
        MetricRow row{it, loss_count ? loss_acc / loss_count : 0.0, tr.accuracy, te.accuracy, te.spikes_per_step};
        out.rows.push_back(row);
        out.best_test_acc = std::max(out.best_test_acc, te.accuracy);
        loss_acc = 0;
        loss_count = 0;
        if (progress) {
            *progress << "iter " << it << " loss " << row.loss << " train " << row.train_acc << " test "
                      << row.test_acc << " spikes/step " << row.spikes_per_step << "\n";
        }
    };

    for (int it = 0; it < c.run.iterations; ++it) {
        std::vector<TrainingItem> batch;
        while (static_cast<int>(batch.size()) < tc.batch_size) {
            if (cursor == order.size()) {
                ++epoch;
                items = encode_items(g, data.train, c.dataset.encoder, c.run.seed, 0, epoch);
                order = epoch_order(items.size(), c.run.seed, epoch);
                cursor = 0;
            }
            batch.push_back(items[order[cursor++]]);
        }
        const auto iter = static_cast<std::uint64_t>(it);
        const StepResult r = c.trainer.kind == TrainerKind::kSurrogate
                                 ? surrogate_train_step(g, batch, tc, c.trainer.surrogate, opt, iter)
                                 : local_train_step(g, batch, tc, opt, iter);
        out.cost.add(r.counters);
        loss_acc += r.loss;
        ++loss_count;
        if ((it + 1) % c.run.eval_every == 0 || it + 1 == c.run.iterations) {
            record(iter + 1);
        }
    }
    if (c.run.iterations == 0) {
        record(0);
    }
    out.checkpoint = Checkpoint{std::move(g), std::move(opt), static_cast<std::uint64_t>(c.run.iterations)};
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

inline Json summary_json(const ExperimentConfig &c, const TrainOutcome &o) {
    const MetricRow &last = o.rows.back();
    return Json{{"trainer", c.trainer.kind == TrainerKind::kSurrogate ? "surrogate" : "local"},
                {"neuron_kind", kind_name(c.model.kind)},
                {"seed", c.run.seed},
                {"iterations", c.run.iterations},
                {"best_test_accuracy", o.best_test_acc},
                {"final_test_accuracy", last.test_acc},
                {"final_train_accuracy", last.train_acc},
                {"mean_spikes_per_step", last.spikes_per_step},
                {"wall_time_s", o.wall_seconds},
                {"cost",
                 {{"global_passes", o.cost.global_passes},
                  {"local_evaluations", o.cost.local_evaluations},
                  {"local_shots", o.cost.local_shots}}}};
}

/// Writes metrics.csv, checkpoint.json and summary.json under `dir`.
inline void write_outputs(const fs::path &dir, const ExperimentConfig &c, const TrainOutcome &o) {
    fs::create_directories(dir);
    sqsnn::detail::write_atomic(dir / "metrics.csv", metrics_csv(o.rows));
    save_checkpoint(dir / "checkpoint.json", o.checkpoint);
    sqsnn::detail::write_atomic(dir / "summary.json", summary_json(c, o).dump(2) + "\n");
}

// ---------------------------------------------------------------- sweeps

/// Sets one numeric config field by name.
inline void apply_param(ExperimentConfig &c, const std::string &name, double v) {
    auto as_int = [&](int &field) {
        if (v != static_cast<double>(static_cast<int>(v))) {
            throw ConfigError("sweep parameter '" + name + "' needs integer values");
        }
        field = static_cast<int>(v);
    };
    auto &t = c.trainer.config;
    if (name == "lambda") {
        t.lambda = v;
    } else if (name == "lr_weights") {
        t.lr_weights = v;
    } else if (name == "lr_theta") {
        t.lr_theta = v;
    } else if (name == "epsilon") {
        t.epsilon = v;
    } else if (name == "clip_norm") {
        t.clip_norm = v;
    } else if (name == "momentum") {
        t.momentum = v;
    } else if (name == "temperature") {
        c.trainer.surrogate.temperature = v;
    } else if (name == "passes") {
        as_int(t.passes);
    } else if (name == "spsa_perturbations") {
        as_int(t.spsa_perturbations);
    } else if (name == "shift_repeats") {
        as_int(t.shift_repeats);
    } else if (name == "shots") {
        as_int(t.shots);
    } else if (name == "batch_size") {
        as_int(t.batch_size);
    } else if (name == "memory_qubits") {
        as_int(c.model.memory_qubits);
    } else if (name == "iterations") {
        as_int(c.run.iterations);
    } else {
        throw ConfigError("unknown sweep parameter '" + name + "'");
    }
}

struct SweepRow {
    double value = 0;
    double best_test_acc = 0;
    double final_test_acc = 0;
    double final_train_acc = 0;
    double spikes_per_step = 0;
};

inline std::string sweep_csv(const std::string &param, const std::vector<SweepRow> &rows) {
    std::string s = "# sqsnn-sweep v1\nparam,value,best_test_acc,final_test_acc,final_train_acc,mean_spikes_per_step\n";
    for (const auto &r : rows) {
        s += param + "," + format_double(r.value) + "," + format_double(r.best_test_acc) + "," +
             format_double(r.final_test_acc) + "," + format_double(r.final_train_acc) + "," +
             format_double(r.spikes_per_step) + "\n";
    }
    return s;
}

}  // namespace sqsnn::cli
