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

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>

#include "experiment.hpp"
#include "oracle.hpp"

namespace {

using namespace sqsnn;
using namespace sqsnn::cli;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
    std::optional<std::string> mode;
};

void apply(ExperimentConfig &c, const Overrides &o) {
    if (o.seed) {
        c.run.seed = *o.seed;
    }
    if (o.workers) {
        c.run.workers = *o.workers;
    }
    if (o.out_dir) {
        c.run.out_dir = *o.out_dir;
    }
    if (o.mode) {
        if (*o.mode != "exact" && *o.mode != "shots") {
            throw ConfigError("--mode must be exact or shots");
        }
        c.trainer.config.exact = *o.mode == "exact";
    }
}

void add_overrides(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--workers", o.workers, "worker threads");
    cmd->add_option("--out-dir", o.out_dir, "output directory");
    cmd->add_option("--mode", o.mode, "exact or shots");
}

int cmd_train(const std::string &config_path, const Overrides &o, bool quiet) {
    ExperimentConfig c = load_config(config_path);
    apply(c, o);
    validate(c);
    const ExperimentData data = load_data(c.dataset, c.run.seed);
    const TrainOutcome r = train(c, data, quiet ? nullptr : &std::cerr);
    write_outputs(c.run.out_dir, c, r);
    std::cout << summary_json(c, r).dump(2) << "\n";
    return 0;
}

int cmd_eval(const std::string &checkpoint, const std::string &config_path, const std::string &dataset_path,
             const std::string &split, const Overrides &o) {
    if (config_path.empty() == dataset_path.empty()) {
        throw ConfigError("eval needs exactly one of --config or --dataset");
    }
    if (split != "test" && split != "train") {
        throw ConfigError("--split must be test or train");
    }
    const Checkpoint ck = load_checkpoint(checkpoint);
    ExperimentConfig c;
    Dataset ds;
    if (!config_path.empty()) {
        c = load_config(config_path);
        apply(c, o);
        validate(c);
        ExperimentData data = load_data(c.dataset, c.run.seed);
        ds = split == "test" ? std::move(data.test) : std::move(data.train);
    } else {
        apply(c, o);
        ds = load_spiketrain_file(dataset_path);
    }
    const EvalResult r = evaluate(ck.graph, ds, c.dataset.encoder, c.run.seed, split == "test" ? 2 : 1,
                                  c.trainer.config.mode(), c.run.workers);
    const Json j{{"accuracy", r.accuracy}, {"mean_spikes_per_step", r.spikes_per_step}, {"items", r.items}};
    if (o.out_dir) {
        fs::create_directories(*o.out_dir);
        sqsnn::detail::write_atomic(fs::path(*o.out_dir) / "eval.json", j.dump(2) + "\n");
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string &config_path, const std::string &param, const std::string &values,
              const Overrides &o, bool quiet) {
    ExperimentConfig c = load_config(config_path);
    apply(c, o);
    if (!param.empty()) {
        c.sweep.param = param;
    }
    if (!values.empty()) {
        c.sweep.values.clear();
        std::stringstream ss(values);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                c.sweep.values.push_back(std::stod(item, &used));
                if (used != item.size()) {
                    throw std::invalid_argument(item);
                }
            } catch (const std::exception &) {
                throw ConfigError("--values: '" + item + "' is not a number");
            }
        }
    }
    if (c.sweep.param.empty()) {
        throw ConfigError("sweep needs a parameter name ([sweep] param or --param)");
    }
    if (c.sweep.values.empty()) {
        throw ConfigError("sweep grid is empty");
    }
    // Check every grid point before running any of them.
    for (double v : c.sweep.values) {
        ExperimentConfig point = c;
        apply_param(point, c.sweep.param, v);
        validate(point);
    }
    const ExperimentData data = load_data(c.dataset, c.run.seed);
    std::vector<SweepRow> rows;
    for (std::size_t k = 0; k < c.sweep.values.size(); ++k) {
        ExperimentConfig point = c;
        apply_param(point, c.sweep.param, c.sweep.values[k]);
        if (!quiet) {
            std::cerr << "sweep " << c.sweep.param << " = " << c.sweep.values[k] << "\n";
        }
        const TrainOutcome r = train(point, data, quiet ? nullptr : &std::cerr);
        write_outputs(c.run.out_dir / ("point-" + std::to_string(k)), point, r);
        const MetricRow &last = r.rows.back();
        rows.push_back({c.sweep.values[k], r.best_test_acc, last.test_acc, last.train_acc, last.spikes_per_step});
    }
    fs::create_directories(c.run.out_dir);
    const std::string csv = sweep_csv(c.sweep.param, rows);
    sqsnn::detail::write_atomic(c.run.out_dir / "sweep.csv", csv);
    std::cout << csv;
    return 0;
}

/// Maps library exceptions onto the documented exit codes.
template <typename F>
int guarded(F &&f) {
    try {
        return f();
    } catch (const ConfigError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Stochastic quantum spiking neural networks: training, evaluation and self-checks"};
    app.require_subcommand(1);

    Overrides train_o, eval_o, sweep_o;
    std::string train_config, eval_checkpoint, eval_config, eval_dataset, eval_split = "test", sweep_config,
        sweep_param, sweep_values, fault;
    std::uint64_t oracle_seed = 12345;
    bool quiet = false;

    auto *train_cmd = app.add_subcommand("train", "train a network from a TOML config");
    train_cmd->add_option("--config", train_config, "experiment config")->required();
    train_cmd->add_flag("--quiet", quiet, "no progress lines");
    add_overrides(train_cmd, train_o);

    auto *eval_cmd = app.add_subcommand("eval", "accuracy and spikes per step of a checkpoint");
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "checkpoint or graph JSON")->required();
    eval_cmd->add_option("--config", eval_config, "experiment config naming the dataset");
    eval_cmd->add_option("--dataset", eval_dataset, "spike-train file to evaluate on");
    eval_cmd->add_option("--split", eval_split, "test or train (with --config)");
    add_overrides(eval_cmd, eval_o);

    auto *oracle_cmd = app.add_subcommand("oracle-check", "run the enumeration-based self-checks");
    oracle_cmd->add_option("--seed", oracle_seed, "seed for the random instances");
    oracle_cmd->add_option("--inject-fault", fault, "break one check on purpose (jensen, psr)");

    auto *sweep_cmd = app.add_subcommand("sweep", "train once per value of one parameter");
    sweep_cmd->add_option("--config", sweep_config, "experiment config")->required();
    sweep_cmd->add_option("--param", sweep_param, "parameter name, overrides [sweep] param");
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values, overrides [sweep] values");
    sweep_cmd->add_flag("--quiet", quiet, "no progress lines");
    add_overrides(sweep_cmd, sweep_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*train_cmd) {
        return guarded([&] { return cmd_train(train_config, train_o, quiet); });
    }
    if (*eval_cmd) {
        return guarded([&] { return cmd_eval(eval_checkpoint, eval_config, eval_dataset, eval_split, eval_o); });
    }
    if (*oracle_cmd) {
        return guarded([&] {
            if (!fault.empty() && fault != "jensen" && fault != "psr") {
                throw ConfigError("--inject-fault must be jensen or psr");
            }
            return run_oracle_suite(oracle_seed, fault, std::cout) ? 0 : 1;
        });
    }
    return guarded([&] { return cmd_sweep(sweep_config, sweep_param, sweep_values, sweep_o, quiet); });
}
