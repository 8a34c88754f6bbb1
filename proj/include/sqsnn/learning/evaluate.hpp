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

#include <cstdint>
#include <vector>

#include "sqsnn/encoding.hpp"
#include "sqsnn/learning/local_rule.hpp"
#include "sqsnn/network.hpp"
#include "sqsnn/parallel.hpp"

namespace sqsnn {

/// Key for encoding item `index` of a split in a given epoch. Images are
/// re-encoded each epoch; ready-made spike trains ignore the key.
inline StreamKey encoding_key(std::uint64_t seed, std::uint64_t split, std::uint64_t epoch, std::uint64_t index) {
    return StreamKey(seed).derive(Purpose::kEncode, split, epoch, index);
}

/// Encoded inputs and one-hot target trains, shaped for the output layer.
inline std::vector<TrainingItem> encode_items(const NetworkGraph &g, const Dataset &ds, const EncoderConfig &enc,
                                              std::uint64_t seed, std::uint64_t split, std::uint64_t epoch) {
    if (ds.input_dim != g.input_dim) {
        throw ConfigError("dataset has " + std::to_string(ds.input_dim) + " inputs, network expects " +
                          std::to_string(g.input_dim));
    }
    if (ds.num_classes != static_cast<int>(g.output.size())) {
        throw ConfigError("dataset has " + std::to_string(ds.num_classes) + " classes, network has " +
                          std::to_string(g.output.size()) + " output neurons");
    }
    std::vector<TrainingItem> out;
    out.reserve(ds.size());
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const Sample &s = ds.items[k];
        TrainingItem it;
        it.input = encode_sample(s, enc, encoding_key(seed, split, epoch, k));
        it.id = k;
        for (std::size_t o = 0; o < g.output.size(); ++o) {
            const int ch = g.neurons[static_cast<std::size_t>(g.output[o])].channels();
            SpikeTrain target(it.input.steps(), ch);
            if (static_cast<int>(o) == s.label) {
                for (int t = 0; t < target.steps(); ++t) {
                    for (int c = 0; c < ch; ++c) {
                        target.set(t, c, true);
                    }
                }
            }
            it.targets.push_back(std::move(target));
        }
        out.push_back(std::move(it));
    }
    return out;
}

struct EvalResult {
    double accuracy = 0;
    double spikes_per_step = 0;  // whole-network count per time step, averaged over items
    std::size_t items = 0;
};

/// Free-running classification by output spike counts.
inline EvalResult evaluate(const NetworkGraph &g, const Dataset &ds, const EncoderConfig &enc, std::uint64_t seed,
                           std::uint64_t split, Mode mode = Mode::exact(), int workers = 1) {
    const auto items = encode_items(g, ds, enc, seed, split, 0);
    std::vector<int> correct(items.size(), 0);
    std::vector<double> spikes(items.size(), 0.0);
    parallel_for(items.size(), workers, [&](std::size_t k) {
        ForwardOptions opt;
        opt.mode = mode;
        const auto rec = forward(g, items[k].input, StreamKey(seed).derive(Purpose::kEval, split, k), opt);
        correct[k] = rate_decode(g, rec) == ds.items[k].label ? 1 : 0;
        spikes[k] = spikes_per_step(rec);
    });
    EvalResult r;
    r.items = items.size();
    if (items.empty()) {
        return r;
    }
    for (std::size_t k = 0; k < items.size(); ++k) {
        r.accuracy += correct[k];
        r.spikes_per_step += spikes[k];
    }
    r.accuracy /= static_cast<double>(items.size());
    r.spikes_per_step /= static_cast<double>(items.size());
    return r;
}

}  // namespace sqsnn
