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

#include "a3d/rewrite.hpp"

#include <algorithm>
#include <map>

#include "a3d/errors.hpp"
#include "rules_internal.hpp"

namespace a3d {

std::string kind_name(RuleKind k) { return k == RuleKind::kRuleBased ? "rule_based" : "cost_based"; }

RewriteEnv::RewriteEnv(Catalog catalog, CostModel* model)
    : catalog_(std::move(catalog)), types_(catalog_), model_(model) {}

std::string RewriteEnv::fresh(const std::string& base, const TermPtr& scope) {
  std::set<std::string> taken;
  std::vector<TermPtr> stack{scope};
  while (!stack.empty()) {
    TermPtr t = stack.back();
    stack.pop_back();
    for (const auto& c : schema(t).columns()) taken.insert(c);
    for (const auto& k : children(t)) stack.push_back(k);
  }
  for (;;) {
    std::string name = "__" + base + std::to_string(counter_++);
    if (!taken.count(name)) return name;
  }
}

namespace rules {

Names sources(const std::vector<Target>& ts) {
  Names out;
  for (const auto& t : ts) out.insert(t.source);
  return out;
}

Names aliases(const std::vector<Target>& ts) {
  Names out;
  for (const auto& t : ts) out.insert(t.alias);
  return out;
}

bool disjoint(const Names& a, const Names& b) {
  for (const auto& x : a)
    if (b.count(x)) return false;
  return true;
}

bool subset(const Names& a, const Names& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Names unite(Names a, const Names& b) {
  a.insert(b.begin(), b.end());
  return a;
}

Names minus(Names a, const Names& b) {
  for (const auto& x : b) a.erase(x);
  return a;
}

Names shared_columns(const Schema& a, const Schema& b) {
  Names out;
  for (const auto& c : a.columns())
    if (b.has(c)) out.insert(c);
  return out;
}

TermPtr filter_if(TermPtr input, const std::vector<PredPtr>& parts) {
  if (parts.empty()) return input;
  return filter(std::move(input), conjoin(parts));
}

PredPtr nonempty_pred(const std::string& array) {
  return p_cmp(CmpOp::kNe, apply(FnRef{"length", {}, false}, {col(array)}), lit(int64_t{0}));
}

bool is_nonempty_filter(const TermPtr& t, const std::string& array) {
  const auto* f = t->as<Filter>();
  if (!f) return false;
  for (const auto& c : split_conjuncts(f->pred))
    if (same_pred(c, nonempty_pred(array))) return true;
  return false;
}

}  // namespace rules

namespace {

std::vector<Rule> build_catalog() {
  std::vector<Rule> all;
  for (auto group : {rules::unnest_rules(), rules::derive_rules(), rules::aggregate_rules()})
    for (auto& r : group) all.push_back(std::move(r));
  static const std::vector<std::string> order = {
      "R1",    "R2.1",  "R2.2",  "R2.3",  "R3",    "R4.1",  "R4.2",  "R5.1",  "R5.2",  "R6",    "R7",
      "R8",    "R9",    "R10.1", "R10.2", "R10.3", "R11.1", "R11.2", "R12",   "R13.1", "R13.2", "R14",
      "R15",   "R16",   "R17.1", "R17.2", "R17.3", "R18",   "R19",   "R20",   "R21"};
  auto pos = [&](const Rule& r) { return std::find(order.begin(), order.end(), r.id) - order.begin(); };
  std::sort(all.begin(), all.end(), [&](const Rule& a, const Rule& b) { return pos(a) < pos(b); });
  return all;
}

// Aggregates of `after` that are not nodes of `before`, deepest first.
void new_aggregates(const TermPtr& t, const std::set<const Term*>& old, std::vector<TermPtr>* out) {
  for (const auto& k : children(t)) new_aggregates(k, old, out);
  if (t->is<Aggregate>() && !old.count(t.get())) out->push_back(t);
}

void collect_nodes(const TermPtr& t, std::set<const Term*>* out) {
  out->insert(t.get());
  for (const auto& k : children(t)) collect_nodes(k, out);
}

}  // namespace

const std::vector<Rule>& rule_catalog() {
  static const std::vector<Rule> catalog = build_catalog();
  return catalog;
}

const Rule& find_rule(const std::string& id) {
  for (const auto& r : rule_catalog())
    if (r.id == id) return r;
  throw Error("unknown rule " + id);
}

bool guard_cost_improves(const Rule& rule, const TermPtr& before, const TermPtr& after, RewriteEnv& env) {
  CostModel* m = env.model();
  if (!m) return false;
  if (rule.pre_aggregation) {
    std::set<const Term*> old;
    collect_nodes(before, &old);
    std::vector<TermPtr> fresh;
    new_aggregates(after, old, &fresh);
    if (fresh.empty()) return false;
    const auto& inner = *fresh.front()->as<Aggregate>();
    if (!(m->cardinality(fresh.front()) < env.alpha * m->cardinality(inner.input))) return false;
  }
  double b = m->cost(before), a = m->cost(after);
  return a < b - 1e-9 * std::max(1.0, b);
}

std::optional<TermPtr> try_apply(const Rule& rule, const TermPtr& t, RewriteEnv& env) {
  auto out = rule.rewrite(t, env);
  if (!out) return std::nullopt;
  if (rule.kind == RuleKind::kCostBased && !env.force && !guard_cost_improves(rule, t, *out, env))
    return std::nullopt;
  return out;
}

TermPtr subterm_at(const TermPtr& t, const Path& path) {
  TermPtr cur = t;
  for (int i : path) cur = children(cur).at(i);
  return cur;
}

TermPtr replace_at(const TermPtr& t, const Path& path, TermPtr replacement) {
  if (path.empty()) return replacement;
  auto kids = children(t);
  Path rest(path.begin() + 1, path.end());
  kids.at(path[0]) = replace_at(kids.at(path[0]), rest, std::move(replacement));
  return with_children(t, kids);
}

std::vector<Path> all_paths(const TermPtr& t) {
  std::vector<Path> out{{}};
  auto kids = children(t);
  for (size_t i = 0; i < kids.size(); ++i)
    for (auto p : all_paths(kids[i])) {
      p.insert(p.begin(), static_cast<int>(i));
      out.push_back(std::move(p));
    }
  return out;
}

std::string path_string(const Path& path) {
  std::string s = "/";
  for (size_t i = 0; i < path.size(); ++i) s += (i ? "/" : "") + std::to_string(path[i]);
  return s;
}

std::optional<TermPtr> try_apply_at(const Rule& rule, const TermPtr& t, const Path& path, RewriteEnv& env,
                                    std::vector<TraceEntry>* trace) {
  TermPtr sub = subterm_at(t, path);
  auto out = try_apply(rule, sub, env);
  if (!out) return std::nullopt;
  TermPtr whole = replace_at(t, path, *out);
  if (trace) {
    TraceEntry e{rule.id, path, 0, 0};
    if (env.model()) {
      e.before_cost = env.model()->cost(t);
      e.after_cost = env.model()->cost(whole);
    }
    trace->push_back(e);
  }
  return whole;
}

}  // namespace a3d
