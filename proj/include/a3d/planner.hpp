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

#include <cstddef>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "a3d/rewrite.hpp"
#include "a3d/stats.hpp"
#include "a3d/term.hpp"

namespace a3d {

/// Ordering constraints among rankable unary operators. Edge i -> j means
/// i must run before j. The transitive closure is maintained eagerly.
class PrecedenceGraph {
 public:
  explicit PrecedenceGraph(size_t n = 0);
  size_t size() const { return adj_.size(); }
  /// Throws InfeasibleQuery if the edge closes a cycle.
  void add_edge(size_t from, size_t to);
  bool has_edge(size_t from, size_t to) const { return adj_[from][to]; }
  /// Transitive: true if `from` must run before `to`.
  bool precedes(size_t from, size_t to) const { return reach_[from][to]; }
  bool comparable(size_t a, size_t b) const { return reach_[a][b] || reach_[b][a]; }
  std::vector<std::pair<size_t, size_t>> edges() const;
  /// Induced subgraph over `nodes` (closure preserved), renumbered 0..k-1.
  PrecedenceGraph restrict(const std::vector<size_t>& nodes) const;

 private:
  std::vector<std::vector<char>> adj_;
  std::vector<std::vector<char>> reach_;
};

/// Adds edges until the order has no Z (N) pattern a<c, b<c, b<d with a, d
/// and a, b incomparable. The new edge between a and b points from the one
/// `before` prefers. Returns the number of edges added.
size_t repair_z(PrecedenceGraph& g, const std::function<bool(size_t, size_t)>& before);

/// Dependency edges for unary nodes listed bottom-up along one path of the
/// tree: i -> j (i below j) when they touch a common column and one of
/// them writes it. Then Z-repaired with rank_before over `profiles`.
PrecedenceGraph build_precedence(const std::vector<TermPtr>& ops, const std::vector<OpCostProfile>& profiles);

/// Minimum sequence_cost order respecting a series-parallel precedence
/// graph (chain merging over the series-parallel decomposition). Ties keep
/// the input order. Throws Error if `g` is not series-parallel.
std::vector<size_t> sort_ops(const std::vector<OpCostProfile>& profiles, const PrecedenceGraph& g);

struct JoinEdge {
  size_t left = 0;
  size_t right = 0;
  std::set<std::string> columns;  // shared names or derive-produced keys
};

/// Base relations of one select-join block and their join edges.
struct JoinGraph {
  std::vector<TermPtr> relations;
  std::vector<JoinEdge> edges;
  bool connected() const;
};

enum class PlanMode { kGreedy, kEnumerate, kOracle };

std::string mode_name(PlanMode m);
PlanMode parse_mode(const std::string& name);

struct PlannerOptions {
  PlanMode mode = PlanMode::kEnumerate;
  double preagg_alpha = 0.5;
  bool preaggregate = true;
  int postprocess_cap = 32;
  int greedy_cap = 10000;
  bool allow_cross_products = false;
  size_t oracle_max_relations = 4;
  size_t oracle_max_ops = 8;
};

struct EnumerationStats {
  size_t blocks = 0;
  size_t partitions = 0;
  size_t rejected_partitions = 0;
  size_t plans_costed = 0;
  size_t memo_entries = 0;
  /// Oracle only: number of distinct complete plans its table covers.
  double plans_represented = 0;
};

/// The optimization pipeline: preprocess, then greedy rewriting or
/// enumeration, then pre-aggregation.
class Planner {
 public:
  Planner(Catalog catalog, const StatsCatalog* stats, PlannerOptions options = {});

  TermPtr optimize(const TermPtr& t);

  TermPtr preprocess(const TermPtr& t);
  TermPtr enumerate(const TermPtr& t);
  /// Exact dynamic program over (relation set, applied set); refuses terms
  /// beyond the configured limits.
  TermPtr oracle_enumerate(const TermPtr& t);
  TermPtr postprocess(const TermPtr& t);
  TermPtr optimize_greedy(const TermPtr& t);

  /// Join graph of the outermost select-join block of `t`.
  JoinGraph join_graph(const TermPtr& t);

  double cost(const TermPtr& t) { return model_->cost(t); }
  CostModel& model() { return *model_; }
  const PlannerOptions& options() const { return options_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  const EnumerationStats& stats() const { return stats_; }

 private:
  TermPtr optimize_blocks(const TermPtr& t, bool oracle);
  TermPtr apply_to_fixpoint(const TermPtr& t, const std::vector<const Rule*>& rules, int cap, bool bottom_up);

  Catalog catalog_;
  PlannerOptions options_;
  std::unique_ptr<CostModel> model_;
  std::unique_ptr<RewriteEnv> env_;
  std::vector<TraceEntry> trace_;
  EnumerationStats stats_;
};

}  // namespace a3d
