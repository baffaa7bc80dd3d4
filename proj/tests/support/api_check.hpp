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

#include <string>

#include "a3d/testkit.hpp"

namespace a3d::testing {

struct ApiOutcome {
  bool checked = false;  // false when the drawn pair was dependent
  bool holds = true;
  std::string detail;
};

/// Draws a random operator chain over one relation, picks an adjacent
/// independent pair (i, j) with context u below and v above, and checks
/// that the pair ordered by rank_before is no more expensive than the
/// swapped order under the cost model, up to `rel_tol` relative slack.
ApiOutcome api_pair_check(SplitMix64& rng, double rel_tol = 1e-9);

}  // namespace a3d::testing
