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

// Datasets, rate encoding and the file formats they arrive in.
//
// Spike-train container (all integers little-endian u32):
//
//     "SQST" version T channels num_items num_classes
//     per item: label, then ceil(T * channels / 8) bytes of spikes, bit k of
//     the item bitmap (byte k / 8, LSB first) holding spike (t, c) for
//     k = t * channels + c.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sqsnn/errors.hpp"
#include "sqsnn/rng.hpp"
#include "sqsnn/spikes.hpp"

namespace sqsnn {

struct EncoderConfig {
    int steps = 10;
    double p_max = 0.5;

    void validate() const {
        if (steps < 1) {
            throw ConfigError("encoder needs at least one time step");
        }
        if (!(p_max > 0 && p_max <= 1)) {
            throw ConfigError("encoder p_max must lie in (0, 1]");
        }
    }
};

/// A static image with values in [0, 1], or a ready-made spike train.
struct Sample {
    std::vector<double> image;
    std::optional<SpikeTrain> train;
    int label = 0;
};

struct Dataset {
    std::vector<Sample> items;
    int num_classes = 0;
    int input_dim = 0;
    int steps = 0;  // native length of spike-train items, 0 for images

    std::size_t size() const noexcept {
        return items.size();
    }

    void validate() const {
        for (const auto &it : items) {
            if (it.label < 0 || it.label >= num_classes) {
                throw ConfigError("dataset label " + std::to_string(it.label) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
            }
            const int dim = it.train ? it.train->channels() : static_cast<int>(it.image.size());
            if (dim != input_dim) {
                throw ConfigError("dataset item has dimension " + std::to_string(dim) + ", expected " +
                                  std::to_string(input_dim));
            }
        }
    }
};

/// Pixel v spikes at each step with probability v * p_max.
inline SpikeTrain rate_encode(std::span<const double> image, const EncoderConfig &cfg, Stream &rng) {
    cfg.validate();
    for (double v : image) {
        if (!(v >= 0 && v <= 1)) {
            throw InvalidArgument("rate_encode: pixel value outside [0, 1]");
        }
    }
    SpikeTrain s(cfg.steps, static_cast<int>(image.size()));
    for (int t = 0; t < cfg.steps; ++t) {
        for (std::size_t c = 0; c < image.size(); ++c) {
            s.set(t, static_cast<int>(c), rng.uniform() < image[c] * cfg.p_max);
        }
    }
    return s;
}

/// Spike train for one sample. Images draw from the stream keyed by `key`.
inline SpikeTrain encode_sample(const Sample &item, const EncoderConfig &cfg, StreamKey key) {
    if (item.train) {
        return *item.train;
    }
    Stream rng = key.child(Purpose::kEncode).stream();
    return rate_encode(item.image, cfg, rng);
}

/// The labelled class neuron fires on every channel at every step; the rest stay silent.
inline NeuronTrains encode_target(int label, int num_classes, int steps, int channels = 1) {
    if (label < 0 || label >= num_classes) {
        throw InvalidArgument("encode_target: label " + std::to_string(label) + " outside [0, " +
                              std::to_string(num_classes) + ")");
    }
    NeuronTrains out;
    for (int k = 0; k < num_classes; ++k) {
        SpikeTrain s(steps, channels);
        if (k == label) {
            for (int t = 0; t < steps; ++t) {
                for (int c = 0; c < channels; ++c) {
                    s.set(t, c, true);
                }
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

/// Two balanced classes: class 0 drives the first half of the channels, class
/// 1 the second half, every step; each bit is then flipped independently.
inline Dataset synth_two_pattern(int n_per_class, double flip_prob, int steps, int channels, StreamKey key) {
    if (n_per_class < 0 || steps < 1 || channels < 2) {
        throw InvalidArgument("synth_two_pattern: need n >= 0, T >= 1 and at least two channels");
    }
    if (!(flip_prob >= 0 && flip_prob <= 1)) {
        throw InvalidArgument("synth_two_pattern: flip probability outside [0, 1]");
    }
    Dataset ds;
    ds.num_classes = 2;
    ds.input_dim = channels;
    ds.steps = steps;
    const int half = channels / 2;
    for (int k = 0; k < 2 * n_per_class; ++k) {
        const int label = k % 2;
        Stream rng = key.derive(Purpose::kItem, static_cast<std::uint64_t>(k)).stream();
        SpikeTrain s(steps, channels);
        for (int t = 0; t < steps; ++t) {
            for (int c = 0; c < channels; ++c) {
                const bool base = label == 0 ? c < half : c >= half;
                s.set(t, c, base != rng.bernoulli(flip_prob));
            }
        }
        ds.items.push_back(Sample{{}, std::move(s), label});
    }
    return ds;
}

/// Keeps only `classes`, relabelled to their position in that list.
inline Dataset select_classes(const Dataset &ds, std::span<const int> classes) {
    Dataset out;
    out.num_classes = static_cast<int>(classes.size());
    out.input_dim = ds.input_dim;
    out.steps = ds.steps;
    for (const auto &it : ds.items) {
        const auto pos = std::find(classes.begin(), classes.end(), it.label);
        if (pos != classes.end()) {
            Sample s = it;
            s.label = static_cast<int>(pos - classes.begin());
            out.items.push_back(std::move(s));
        }
    }
    return out;
}

/// First `n` items (or all, if fewer).
inline Dataset take(const Dataset &ds, std::size_t n, std::size_t offset = 0) {
    Dataset out = ds;
    out.items.clear();
    for (std::size_t k = offset; k < ds.items.size() && k < offset + n; ++k) {
        out.items.push_back(ds.items[k]);
    }
    return out;
}

// ---------------------------------------------------------------- files

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw FormatError("cannot open '" + path.string() + "'", 0);
    }
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class ByteReader {
   public:
    ByteReader(std::span<const std::uint8_t> data, std::string what) : data_(data), what_(std::move(what)) {
    }

    std::uint32_t be32() {
        need(4, "32-bit field");
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            v = (v << 8) | data_[pos_++];
        }
        return v;
    }

    std::uint32_t le32() {
        need(4, "32-bit field");
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * k);
        }
        return v;
    }

    std::span<const std::uint8_t> bytes(std::uint64_t n, const char *field) {
        need(n, field);
        auto s = data_.subspan(pos_, static_cast<std::size_t>(n));
        pos_ += static_cast<std::size_t>(n);
        return s;
    }

    std::size_t offset() const noexcept {
        return pos_;
    }
    bool at_end() const noexcept {
        return pos_ == data_.size();
    }

    [[noreturn]] void fail(const std::string &msg) const {
        throw FormatError(what_ + ": " + msg, pos_);
    }

   private:
    void need(std::uint64_t n, const char *field) const {
        if (data_.size() - pos_ < n) {
            fail(std::string("truncated while reading ") + field);
        }
    }

    std::span<const std::uint8_t> data_;
    std::string what_;
    std::size_t pos_ = 0;
};

inline void put_le32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
    }
}

/// Writes via a sibling temporary file and a rename.
inline void write_atomic(const std::filesystem::path &path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        f.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f) {
            throw std::runtime_error("short write to '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

inline void write_atomic(const std::filesystem::path &path, const std::string &text) {
    write_atomic(path, std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

}  // namespace detail

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// IDX image file (unsigned bytes, n x rows x cols), pixels scaled to [0, 1].
/// Labels are left at zero.
inline Dataset load_idx_images(const std::filesystem::path &path) {
    const auto data = detail::read_file(path);
    detail::ByteReader r(data, path.string());
    if (data.empty()) {
        r.fail("empty file");
    }
    const std::uint32_t magic = r.be32();
    if (magic != kIdxImageMagic) {
        throw FormatError(path.string() + ": bad IDX image magic 0x" + [&] {
            std::ostringstream os;
            os << std::hex << magic;
            return os.str();
        }(), 0);
    }
    const std::uint32_t n = r.be32();
    const std::uint32_t rows = r.be32();
    const std::uint32_t cols = r.be32();
    const std::uint64_t dim = std::uint64_t{rows} * cols;
    if (dim == 0) {
        r.fail("zero image size in header");
    }
    if ((data.size() - r.offset()) / dim < n) {
        throw FormatError(path.string() + ": header announces " + std::to_string(n) +
                              " images but payload is truncated",
                          data.size());
    }
    Dataset ds;
    ds.input_dim = static_cast<int>(dim);
    ds.items.resize(n);
    for (std::uint32_t k = 0; k < n; ++k) {
        const auto px = r.bytes(dim, "pixel payload");
        auto &img = ds.items[k].image;
        img.resize(static_cast<std::size_t>(dim));
        for (std::size_t j = 0; j < img.size(); ++j) {
            img[j] = px[j] / 255.0;
        }
    }
    if (!r.at_end()) {
        r.fail("trailing bytes after payload");
    }
    return ds;
}

inline std::vector<int> load_idx_labels(const std::filesystem::path &path) {
    const auto data = detail::read_file(path);
    detail::ByteReader r(data, path.string());
    if (data.empty()) {
        r.fail("empty file");
    }
    const std::uint32_t magic = r.be32();
    if (magic != kIdxLabelMagic) {
        throw FormatError(path.string() + ": bad IDX label magic 0x" + [&] {
            std::ostringstream os;
            os << std::hex << magic;
            return os.str();
        }(), 0);
    }
    const std::uint32_t n = r.be32();
    const auto payload = r.bytes(n, "label payload");
    if (!r.at_end()) {
        r.fail("trailing bytes after payload");
    }
    return {payload.begin(), payload.end()};
}

/// Image and label files together; num_classes is one past the largest label.
inline Dataset load_idx(const std::filesystem::path &images, const std::filesystem::path &labels) {
    Dataset ds = load_idx_images(images);
    const auto ls = load_idx_labels(labels);
    if (ls.size() != ds.items.size()) {
        throw FormatError(labels.string() + ": " + std::to_string(ls.size()) + " labels for " +
                          std::to_string(ds.items.size()) + " images", 8);
    }
    int top = 0;
    for (std::size_t k = 0; k < ls.size(); ++k) {
        ds.items[k].label = ls[k];
        top = std::max(top, ls[k]);
    }
    ds.num_classes = ls.empty() ? 0 : top + 1;
    return ds;
}

/// USPS as CSV: 256 pixel columns then an integer label, one item per row.
/// Pixels in [-1, 1] (the common distribution range) are mapped to [0, 1]
/// when any negative value is present; otherwise they must already be in [0, 1].
inline Dataset load_usps_csv(const std::filesystem::path &path, int pixels = 256) {
    const auto data = detail::read_file(path);
    const std::string text(data.begin(), data.end());
    Dataset ds;
    ds.input_dim = pixels;
    std::size_t pos = 0;
    bool any_negative = false;
    int top = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) {
            eol = text.size();
        }
        std::string line = text.substr(pos, eol - pos);
        const std::size_t line_start = pos;
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') {
            continue;
        }
        std::vector<double> fields;
        std::size_t p = 0;
        while (p <= line.size()) {
            std::size_t comma = line.find(',', p);
            if (comma == std::string::npos) {
                comma = line.size();
            }
            const std::string cell = line.substr(p, comma - p);
            char *end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end == cell.c_str() || !std::isfinite(v)) {
                throw FormatError(path.string() + ": bad number '" + cell + "'", line_start + p);
            }
            fields.push_back(v);
            p = comma + 1;
        }
        if (static_cast<int>(fields.size()) != pixels + 1) {
            throw FormatError(path.string() + ": row has " + std::to_string(fields.size()) + " columns, expected " +
                              std::to_string(pixels + 1), line_start);
        }
        Sample s;
        s.image.assign(fields.begin(), fields.end() - 1);
        const double lab = fields.back();
        if (lab < 0 || lab != std::floor(lab)) {
            throw FormatError(path.string() + ": label must be a non-negative integer", line_start);
        }
        s.label = static_cast<int>(lab);
        top = std::max(top, s.label);
        for (double v : s.image) {
            any_negative = any_negative || v < 0;
        }
        ds.items.push_back(std::move(s));
    }
    for (auto &s : ds.items) {
        for (double &v : s.image) {
            if (any_negative) {
                v = (v + 1) / 2;
            }
            if (v < -1e-9 || v > 1 + 1e-9) {
                throw FormatError(path.string() + ": pixel value " + std::to_string(v) + " outside range", 0);
            }
            v = std::clamp(v, 0.0, 1.0);
        }
    }
    ds.num_classes = ds.items.empty() ? 0 : top + 1;
    return ds;
}

inline constexpr std::uint32_t kSpikeFileVersion = 1;

inline std::vector<std::uint8_t> serialize_spike_trains(const Dataset &ds) {
    std::vector<std::uint8_t> out = {'S', 'Q', 'S', 'T'};
    detail::put_le32(out, kSpikeFileVersion);
    detail::put_le32(out, static_cast<std::uint32_t>(ds.steps));
    detail::put_le32(out, static_cast<std::uint32_t>(ds.input_dim));
    detail::put_le32(out, static_cast<std::uint32_t>(ds.items.size()));
    detail::put_le32(out, static_cast<std::uint32_t>(ds.num_classes));
    const std::size_t bits = static_cast<std::size_t>(ds.steps) * static_cast<std::size_t>(ds.input_dim);
    for (const auto &it : ds.items) {
        if (!it.train || it.train->steps() != ds.steps || it.train->channels() != ds.input_dim) {
            throw InvalidArgument("spike-train file: every item needs a train of shape T x channels");
        }
        detail::put_le32(out, static_cast<std::uint32_t>(it.label));
        std::vector<std::uint8_t> packed((bits + 7) / 8, 0);
        const auto &raw = it.train->raw();
        for (std::size_t k = 0; k < bits; ++k) {
            if (raw[k]) {
                packed[k / 8] |= static_cast<std::uint8_t>(1U << (k % 8));
            }
        }
        out.insert(out.end(), packed.begin(), packed.end());
    }
    return out;
}

inline void write_spike_train_file(const std::filesystem::path &path, const Dataset &ds) {
    detail::write_atomic(path, serialize_spike_trains(ds));
}

inline Dataset parse_spike_trains(std::span<const std::uint8_t> data, const std::string &what) {
    detail::ByteReader r(data, what);
    const auto magic = r.bytes(4, "magic");
    if (std::memcmp(magic.data(), "SQST", 4) != 0) {
        throw FormatError(what + ": bad spike-train magic", 0);
    }
    const std::uint32_t version = r.le32();
    if (version != kSpikeFileVersion) {
        throw FormatError(what + ": unsupported version " + std::to_string(version), 4);
    }
    Dataset ds;
    const std::uint32_t steps = r.le32();
    const std::uint32_t channels = r.le32();
    const std::uint32_t n = r.le32();
    const std::uint32_t classes = r.le32();
    if (steps == 0 || channels == 0 || classes == 0) {
        throw FormatError(what + ": zero T, channel or class count in header", 8);
    }
    const std::uint64_t bits = std::uint64_t{steps} * channels;
    if (bits > (std::uint64_t{1} << 31)) {
        throw FormatError(what + ": item shape too large", 8);
    }
    const std::uint64_t item_bytes = 4 + (bits + 7) / 8;
    if ((data.size() - r.offset()) / item_bytes < n) {
        throw FormatError(what + ": header announces " + std::to_string(n) + " items but payload is truncated",
                          data.size());
    }
    ds.steps = static_cast<int>(steps);
    ds.input_dim = static_cast<int>(channels);
    ds.num_classes = static_cast<int>(classes);
    ds.items.reserve(n);
    for (std::uint32_t k = 0; k < n; ++k) {
        const std::size_t at = r.offset();
        const std::uint32_t label = r.le32();
        if (label >= classes) {
            throw FormatError(what + ": label " + std::to_string(label) + " not below class count", at);
        }
        const auto packed = r.bytes((bits + 7) / 8, "spike bitmap");
        SpikeTrain s(static_cast<int>(steps), static_cast<int>(channels));
        for (std::uint64_t b = 0; b < bits; ++b) {
            if ((packed[b / 8] >> (b % 8)) & 1U) {
                s.set(static_cast<int>(b / channels), static_cast<int>(b % channels), true);
            }
        }
        ds.items.push_back(Sample{{}, std::move(s), static_cast<int>(label)});
    }
    if (!r.at_end()) {
        r.fail("trailing bytes after last item");
    }
    return ds;
}

inline Dataset load_spiketrain_file(const std::filesystem::path &path) {
    const auto data = detail::read_file(path);
    return parse_spike_trains(data, path.string());
}

}  // namespace sqsnn
