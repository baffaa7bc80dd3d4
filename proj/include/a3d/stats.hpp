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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "a3d/predicate.hpp"
#include "a3d/relation.hpp"
#include "a3d/term.hpp"

namespace a3d {

enum class StatsKind { kExact, kUniform, kClustered };

std::string kind_name(StatsKind k);

/// A maximal run of consecutive distinct values (in value order) that fell
/// into the same frequency cluster.
struct ValueRun {
  Scalar lo;
  Scalar hi;
  int64_t count = 0;  // distinct values in the run
};

struct Cluster {
  double centroid = 0;   // relative frequency of a member value
  int64_t members = 0;   // distinct values in the cluster
  double dispersion = 0; // standard deviation of member frequencies
  std::vector<ValueRun> runs;
};

struct ScalarOrder {
  bool operator()(const Scalar& a, const Scalar& b) const { return total_order(a, b) < 0; }
};

/// Distribution summary of one column. For array columns the scalar
/// distribution fields are unused; `row_stats` describes the flattened
/// elements and the array_* fields the per-row arrays.
struct ColumnStats {
  StatsKind kind = StatsKind::kUniform;
  int64_t row_count = 0;
  int64_t ndv = 0;
  double null_fraction = 0;
  std::map<Scalar, double, ScalarOrder> freq;  // exact; sums to 1 over non-null values
  double avg_freq = 0;                         // uniform
  Scalar min = Null{};
  Scalar max = Null{};
  std::vector<Cluster> clusters;

  bool is_array = false;
  double avg_array_len = 0;
  double empty_fraction = 0;
  int64_t array_ndv = 0;  // experimental: distinct whole arrays
  std::shared_ptr<const ColumnStats> row_stats;
};

struct StatsConfig {
  int64_t exact_max_ndv = 64;
  double uniform_max_cv = 0.1;
  int max_clusters = 16;
};

struct TableStats {
  int64_t row_count = 0;
  std::map<std::string, ColumnStats> columns;
};

/// Statistics for every base relation plus user per-tuple cost overrides
/// keyed by function name.
struct StatsCatalog {
  std::map<std::string, TableStats> tables;
  std::map<std::string, double> cost_overrides;
};

ColumnStats build_column_stats(const std::vector<Scalar>& values, const StatsConfig& config = {});
TableStats build_stats(const Relation& rel, const StatsConfig& config = {});
StatsCatalog build_stats(const Database& db, const StatsConfig& config = {});

/// Selectivity of `column = v` and of `column < v` (or <=) for one column.
double equality_selectivity(const ColumnStats& s, const Scalar& v);
double less_selectivity(const ColumnStats& s, const Scalar& v, bool inclusive);

/// Per-column estimation state carried through a term.
struct ColProps {
  const ColumnStats* stats = nullptr;  // value distribution (elements for arrays)
  double avg_len = 0;                  // arrays only
  double empty_frac = 0;               // arrays only
  double ndv = 0;                      // distinct values, for joins and grouping
  /// Set for scalar derives y = scale * x + offset over a column x with
  /// statistics; comparisons on y are answered from x.
  const ColumnStats* affine_of = nullptr;
  double scale = 1;
  double offset = 0;
};

struct Props {
  double card = 0;
  std::map<std::string, ColProps> cols;
};

/// Estimates the selectivity of `p` against the columns in `props`. Unknown
/// columns use 0.1 for equality and 1/3 for other comparisons.
double estimate_selectivity(const PredPtr& p, const Props& props);

enum class OpKind { kFilter, kArrayFilter, kArrayJoin, kDerive, kAggregate };

struct OpCostProfile {
  OpKind kind = OpKind::kFilter;
  double s = 1;    // vertical selectivity
  double s_a = 1;  // horizontal selectivity
  double len = 1;  // |a| for arrayJoin
  double c = 1;    // per-tuple cost
  /// Factor applied to the row count: s for filters and aggregates, |a|
  /// for arrayJoin, 1 otherwise.
  double multiplier() const;
  /// Rank of the ≲ relation: (1-s)/c, (1-s_a)/c or (1-|a|)/c.
  double rank() const;
  /// (1 - multiplier)/c, the rank that orders row-count effects.
  double vertical_rank() const;
  /// (1 - s_a)/c for arrayFilter, 0 otherwise.
  double horizontal_rank() const;
};

/// Smith-rule ordering key: higher vertical rank first, then higher
/// horizontal rank. Returns true if `a` should run before `b`.
bool rank_before(const OpCostProfile& a, const OpCostProfile& b);

/// Σ c_k · N · Π_{j<k} m_j for a sequence of operators applied to N rows.
double sequence_cost(const std::vector<OpCostProfile>& ops, double rows);

struct CostParams {
  double default_rows = 1000;
  double array_join_row_cost = 2;  // per output-row construction overhead of μ
};

/// Cardinality and cost estimation for terms. Results are memoized per
/// node, and the model holds a reference to every node it has seen.
class CostModel {
 public:
  CostModel(const Catalog& catalog, const StatsCatalog* stats, CostParams params = {});

  const Props& props(const TermPtr& t);
  double cardinality(const TermPtr& t) { return props(t).card; }

  /// Estimated cost of evaluating the whole term.
  double cost(const TermPtr& t);

  /// Per-tuple cost of a unary node, given its input.
  double per_tuple_cost(const TermPtr& op);

  /// Profile of a rankable unary node (σ, φ, μ, δ, Γ).
  OpCostProfile profile(const TermPtr& op);

  const Catalog& catalog() const { return catalog_; }
  TypeEnv& types() { return types_; }

 private:
  Props compute(const TermPtr& t);
  double function_cost(const std::string& fn, double base) const;
  double expr_cost(const ExprPtr& e, const Props& in) const;

  Catalog catalog_;
  const StatsCatalog* stats_;
  CostParams params_;
  TypeEnv types_;
  std::unordered_map<const Term*, std::pair<TermPtr, Props>> props_;
  std::unordered_map<const Term*, double> cost_;
};

}  // namespace a3d
