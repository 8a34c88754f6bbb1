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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "experiment.hpp"

namespace sqsnn::cli {
namespace {

std::string read_text(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

class Scratch {
   public:
    Scratch() {
        static int counter = 0;
        dir_ = fs::temp_directory_path() /
               ("sqsnn_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                std::to_string(counter++));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
    fs::path write(const std::string &name, const std::string &text) const {
        std::ofstream(dir_ / name) << text;
        return dir_ / name;
    }
    const fs::path &dir() const {
        return dir_;
    }

   private:
    fs::path dir_;
};

int run_cli(const std::string &args, const fs::path &log) {
    const std::string cmd = std::string("\"") + SQSNN_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
    return WEXITSTATUS(status);
#else
    return status;
#endif
}

constexpr const char *kTinyConfig = R"(
[dataset]
kind = "synthetic"
per_class = 12
test_per_class = 6
steps = 5
channels = 4

[model]
hidden = [2]
memory_qubits = 1

[trainer]
kind = "surrogate"
lr_weights = 0.3
lr_theta = 0.3
batch_size = 4

[run]
iterations = 6
eval_every = 3
seed = 4
)";

ExperimentConfig parse_text(const std::string &text) {
    return parse_config(toml::parse(text), fs::current_path());
}

// ---------------------------------------------------------------- parsing

TEST(ConfigParsing, DefaultsAndOverrides) {
    const ExperimentConfig c = parse_text(kTinyConfig);
    EXPECT_EQ(c.dataset.per_class, 12);
    EXPECT_EQ(c.model.hidden, std::vector<int>{2});
    EXPECT_EQ(c.trainer.kind, TrainerKind::kSurrogate);
    EXPECT_DOUBLE_EQ(c.trainer.config.lr_weights, 0.3);
    EXPECT_EQ(c.run.seed, 4u);
    EXPECT_TRUE(c.trainer.config.exact);
    EXPECT_NO_THROW(validate(c));
}

TEST(ConfigParsing, UnknownFieldNamesKeyAndLine) {
    try {
        parse_text("[run]\niterations = 3\nitertions = 4\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("run.itertions"), std::string::npos) << msg;
        EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    }
    EXPECT_THROW(parse_text("[modle]\nkind = \"sqs\"\n"), ConfigError);
}

TEST(ConfigParsing, WrongTypesAndEnums) {
    EXPECT_THROW(parse_text("[run]\niterations = \"ten\"\n"), ConfigError);
    EXPECT_THROW(parse_text("[trainer]\nkind = \"backprop\"\n"), ConfigError);
    EXPECT_THROW(parse_text("[trainer]\npairing = \"sideways\"\n"), ConfigError);
    EXPECT_THROW(parse_text("[model]\nkind = \"transmon\"\n"), ConfigError);
    EXPECT_THROW(parse_text("[run]\nmode = \"approximate\"\n"), ConfigError);
    EXPECT_THROW(parse_text("[run]\nseed = -1\n"), ConfigError);
}

TEST(ConfigParsing, SyntaxErrorReportsLine) {
    Scratch s;
    const fs::path p = s.write("bad.toml", "[run]\niterations = \n");
    try {
        load_config(p);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_config(s.dir() / "absent.toml"), ConfigError);
}

TEST(ConfigParsing, ValidationRejectsMissingFiles) {
    ExperimentConfig c = parse_text("[dataset]\nkind = \"idx\"\ntrain = \"/nonexistent/a\"\n");
    EXPECT_THROW(validate(c), ConfigError);
    c = parse_text("[dataset]\nflip = 1.5\n");
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Sweeps, ApplyParamKnowsItsFields) {
    ExperimentConfig c;
    apply_param(c, "lambda", 0.25);
    EXPECT_DOUBLE_EQ(c.trainer.config.lambda, 0.25);
    apply_param(c, "memory_qubits", 2);
    EXPECT_EQ(c.model.memory_qubits, 2);
    EXPECT_THROW(apply_param(c, "memory_qubits", 1.5), ConfigError);
    EXPECT_THROW(apply_param(c, "colour", 1), ConfigError);
}

TEST(Training, InProcessRunIsDeterministic) {
    ExperimentConfig c = parse_text(kTinyConfig);
    const ExperimentData data = load_data(c.dataset, c.run.seed);
    const std::string a = metrics_csv(train(c, data).rows);
    c.run.workers = 3;
    EXPECT_EQ(metrics_csv(train(c, data).rows), a);
    c.run.seed = 5;
    EXPECT_NE(metrics_csv(train(c, load_data(c.dataset, c.run.seed)).rows), a);
}

// ---------------------------------------------------------------- binary

TEST(CliBinary, TrainIsByteIdenticalAcrossRunsAndWorkers) {
    Scratch s;
    const fs::path cfg = s.write("tiny.toml", kTinyConfig);
    const fs::path a = s.dir() / "a", b = s.dir() / "b", c = s.dir() / "c";
    ASSERT_EQ(run_cli("train --quiet --config \"" + cfg.string() + "\" --out-dir \"" + a.string() + "\"",
                      s.dir() / "log"),
              0)
        << read_text(s.dir() / "log");
    ASSERT_EQ(run_cli("train --quiet --config \"" + cfg.string() + "\" --out-dir \"" + b.string() + "\"",
                      s.dir() / "log"),
              0);
    ASSERT_EQ(run_cli("train --quiet --config \"" + cfg.string() + "\" --workers 4 --out-dir \"" + c.string() +
                          "\"",
                      s.dir() / "log"),
              0);
    const std::string m = read_text(a / "metrics.csv");
    EXPECT_FALSE(m.empty());
    EXPECT_EQ(read_text(b / "metrics.csv"), m);
    EXPECT_EQ(read_text(c / "metrics.csv"), m);
    EXPECT_EQ(read_text(b / "checkpoint.json"), read_text(a / "checkpoint.json"));
    EXPECT_TRUE(fs::exists(a / "summary.json"));
}

TEST(CliBinary, MissingDatasetExitsTwoWithoutOutputs) {
    Scratch s;
    const fs::path cfg = s.write("idx.toml", "[dataset]\nkind = \"idx\"\ntrain = \"nope-images\"\n"
                                             "train_labels = \"nope-labels\"\ntest = \"nope-images\"\n"
                                             "test_labels = \"nope-labels\"\n");
    const fs::path out = s.dir() / "out";
    EXPECT_EQ(run_cli("train --quiet --config \"" + cfg.string() + "\" --out-dir \"" + out.string() + "\"",
                      s.dir() / "log"),
              2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_NE(read_text(s.dir() / "log").find("does not exist"), std::string::npos);
}

TEST(CliBinary, SweepWritesOneRowPerValue) {
    Scratch s;
    const fs::path cfg = s.write("tiny.toml", kTinyConfig);
    const fs::path out = s.dir() / "sweep";
    ASSERT_EQ(run_cli("sweep --quiet --config \"" + cfg.string() + "\" --param lambda --values 0,0.1,1 --out-dir \"" +
                          out.string() + "\"",
                      s.dir() / "log"),
              0)
        << read_text(s.dir() / "log");
    std::istringstream csv(read_text(out / "sweep.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) {
        if (line.rfind("lambda,", 0) == 0) {
            ++rows;
        }
    }
    EXPECT_EQ(rows, 3);
    EXPECT_EQ(run_cli("sweep --quiet --config \"" + cfg.string() + "\" --param lambda --out-dir \"" +
                          (s.dir() / "empty").string() + "\"",
                      s.dir() / "log"),
              2);
    EXPECT_FALSE(fs::exists(s.dir() / "empty" / "sweep.csv"));
}

TEST(CliBinary, EvalLeavesCheckpointUntouched) {
    Scratch s;
    const fs::path cfg = s.write("tiny.toml", kTinyConfig);
    const fs::path out = s.dir() / "run";
    ASSERT_EQ(run_cli("train --quiet --config \"" + cfg.string() + "\" --out-dir \"" + out.string() + "\"",
                      s.dir() / "log"),
              0);
    const std::string before = read_text(out / "checkpoint.json");
    const auto listing = [&] {
        std::vector<std::string> names;
        for (const auto &e : fs::directory_iterator(out)) {
            names.push_back(e.path().filename().string());
        }
        std::sort(names.begin(), names.end());
        return names;
    };
    const auto files = listing();
    ASSERT_EQ(run_cli("eval --checkpoint \"" + (out / "checkpoint.json").string() + "\" --config \"" + cfg.string() +
                          "\"",
                      s.dir() / "eval.log"),
              0);
    EXPECT_NE(read_text(s.dir() / "eval.log").find("accuracy"), std::string::npos);
    EXPECT_EQ(read_text(out / "checkpoint.json"), before);
    EXPECT_EQ(listing(), files);
}

TEST(CliBinary, OracleCheckPassesAndCatchesInjectedFault) {
    Scratch s;
    EXPECT_EQ(run_cli("oracle-check", s.dir() / "ok.log"), 0) << read_text(s.dir() / "ok.log");
    EXPECT_EQ(run_cli("oracle-check --inject-fault jensen", s.dir() / "bad.log"), 1);
    EXPECT_NE(read_text(s.dir() / "bad.log").find("Jensen"), std::string::npos);
    EXPECT_EQ(run_cli("oracle-check --inject-fault gravity", s.dir() / "bad2.log"), 2);
}

TEST(CliBinary, UsageErrorsExitTwo) {
    Scratch s;
    EXPECT_EQ(run_cli("", s.dir() / "log"), 2);
    EXPECT_EQ(run_cli("train", s.dir() / "log"), 2);
    EXPECT_EQ(run_cli("train --config \"" + (s.dir() / "nothing.toml").string() + "\"", s.dir() / "log"), 2);
}

}  // namespace
}  // namespace sqsnn::cli
