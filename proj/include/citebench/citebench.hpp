// Copyright (c) 2026 The citebench Authors. All Rights Reserved
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "citebench/analyzer.hpp"
#include "citebench/benchgen.hpp"
#include "citebench/bm25.hpp"
#include "citebench/corpus.hpp"
#include "citebench/dense.hpp"
#include "citebench/error.hpp"
#include "citebench/field.hpp"
#include "citebench/harness.hpp"
#include "citebench/metrics.hpp"
#include "citebench/pools.hpp"
#include "citebench/report.hpp"
#include "citebench/rng.hpp"
#include "citebench/run.hpp"
#include "citebench/synthetic.hpp"
#include "citebench/types.hpp"

namespace citebench {
inline constexpr const char* kVersion = "0.1.0";
}  // namespace citebench
