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
#include <optional>
#include <string>
#include <vector>

#include "a3d/stats.hpp"
#include "a3d/term.hpp"

namespace a3d {

enum class RuleKind { kRuleBased, kCostBased };

std::string kind_name(RuleKind k);

/// Environment shared by rule applications: schemas, optional cost model
/// and guard policy.
class RewriteEnv {
 public:
  explicit RewriteEnv(Catalog catalog, CostModel* model = nullptr);

  const Catalog& catalog() const { return catalog_; }
  const Schema& schema(const TermPtr& t) { return types_.schema(t); }
  CostModel* model() const { return model_; }

  /// Skip cost guards (cost-based rules fire whenever they match).
  bool force = false;
  /// Pre-aggregation requires groups < alpha * input rows.
  double alpha = 0.5;

  /// A column name starting with "__" that occurs nowhere in `scope`.
  std::string fresh(const std::string& base, const TermPtr& scope);

 private:
  Catalog catalog_;
  TypeEnv types_;
  CostModel* model_;
  int counter_ = 0;
};

struct Rule {
  std::string id;
  RuleKind kind;
  std::string summary;
  /// Matches at the root of the term and builds the rewritten term; no
  /// cost guard is applied here.
  std::function<std::optional<TermPtr>(const TermPtr&, RewriteEnv&)> rewrite;
  /// Pre-aggregation rules additionally require a small group count.
  bool pre_aggregation = false;
};

/// All rules of the catalog, in table order.
const std::vector<Rule>& rule_catalog();
const Rule& find_rule(const std::string& id);

/// Guard of a cost-based rule: the rewrite lowers the estimated cost and,
/// for pre-aggregations, the inner aggregate groups below alpha of its input.
bool guard_cost_improves(const Rule& rule, const TermPtr& before, const TermPtr& after, RewriteEnv& env);

/// Applies the rule at the root if it matches and its guard holds. Rule-based
/// rules have no guard; cost-based ones need a cost model or env.force.
std::optional<TermPtr> try_apply(const Rule& rule, const TermPtr& t, RewriteEnv& env);

/// Child indices from the root.
using Path = std::vector<int>;

TermPtr subterm_at(const TermPtr& t, const Path& path);
TermPtr replace_at(const TermPtr& t, const Path& path, TermPtr replacement);
/// Every path in the term, pre-order.
std::vector<Path> all_paths(const TermPtr& t);
std::string path_string(const Path& path);

struct TraceEntry {
  std::string rule_id;
  Path path;
  double before_cost = 0;
  double after_cost = 0;
};

std::optional<TermPtr> try_apply_at(const Rule& rule, const TermPtr& t, const Path& path, RewriteEnv& env,
                                    std::vector<TraceEntry>* trace = nullptr);

/// Removes Γ_G(agg^(f))∘Γ_G(agg^(i)) pairs with identical group keys,
/// restoring the single aggregate.
TermPtr simplify_reaggregation(const TermPtr& t);

}  // namespace a3d
