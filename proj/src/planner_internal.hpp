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

#include <functional>
#include <set>
#include <string>

#include "a3d/planner.hpp"
#include "a3d/term.hpp"

namespace a3d::planning {

/// Columns a rankable unary node reads and the ones it creates, removes or
/// overwrites.
struct Access {
  std::set<std::string> reads;
  std::set<std::string> writes;
  std::set<std::string> outputs;  // created or overwritten names
  std::set<std::string> removed;  // sources dropped by an alias
};

Access access_of(const TermPtr& op);

/// True when the two nodes cannot be swapped without changing what one of
/// them reads or writes.
bool conflicts(const Access& lower, const Access& upper);

bool is_rankable(const TermPtr& t);

struct BlockContext {
  CostModel& model;
  const PlannerOptions& options;
  EnumerationStats& stats;
  /// Optimizes a subterm that is a leaf of the block (Γ, Π).
  std::function<TermPtr(const TermPtr&)> optimize_leaf;
};

/// Reorders one select-join block (joins and rankable unary nodes over
/// leaves) with Algorithm 1, or with the exact oracle.
TermPtr plan_block(const TermPtr& t, BlockContext& ctx, bool oracle);

/// Join graph of the block rooted at `t`, leaves left unoptimized.
JoinGraph block_join_graph(const TermPtr& t, CostModel& model);

}  // namespace a3d::planning
