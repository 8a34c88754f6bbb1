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

#include "sqsnn/encoding.hpp"
#include "sqsnn/errors.hpp"
#include "sqsnn/learning/evaluate.hpp"
#include "sqsnn/learning/local_rule.hpp"
#include "sqsnn/learning/objective.hpp"
#include "sqsnn/learning/params.hpp"
#include "sqsnn/learning/surrogate.hpp"
#include "sqsnn/network.hpp"
#include "sqsnn/network_io.hpp"
#include "sqsnn/neurons/lif.hpp"
#include "sqsnn/neurons/qlif.hpp"
#include "sqsnn/neurons/sqs.hpp"
#include "sqsnn/qcore.hpp"
#include "sqsnn/rng.hpp"
#include "sqsnn/spikes.hpp"
