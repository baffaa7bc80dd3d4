// Copyright 2026 The A3D Optimizer Authors
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

// Straight-line reference interpreter kept independent of src/eval.cpp:
// nested-loop joins, list-based grouping and its own predicate and
// aggregate arithmetic. Used as the second oracle in tests.

#include <optional>

#include "a3d/relation.hpp"
#include "a3d/term.hpp"

namespace a3d::testing {

std::optional<bool> naive_pred(const PredPtr& p, const Tuple& t);

Value naive_aggregate(AggFn fn, bool for_each, const std::vector<Value>& values);

Relation naive_eval(const TermPtr& t, const Database& db);

}  // namespace a3d::testing
