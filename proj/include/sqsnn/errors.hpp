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
#include <stdexcept>
#include <string>

namespace sqsnn {

/// Argument outside an operation's domain (shape mismatch, non-finite angle, ...).
class InvalidArgument : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A register, enumeration or buffer would exceed a configured size cap.
class CapacityError : public std::length_error {
   public:
    using std::length_error::length_error;
};

/// A density matrix no longer satisfies trace/Hermiticity/PSD tolerances.
class StateCorruption : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Projection onto an outcome whose probability is below the branch floor.
class ZeroProbabilityBranch : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent model or trainer configuration.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the byte offset where parsing stopped.
class FormatError : public std::runtime_error {
   public:
    FormatError(const std::string &what, std::uint64_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {
    }

    std::uint64_t offset() const noexcept {
        return offset_;
    }

   private:
    std::uint64_t offset_;
};

}  // namespace sqsnn
