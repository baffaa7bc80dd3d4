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

// Aggregation rules: filter/aggregate swap and pre-aggregation.

#include "a3d/errors.hpp"
#include "rules_internal.hpp"

namespace a3d {
namespace rules {
namespace {

using Out = std::optional<TermPtr>;

Names agg_inputs(const std::vector<AggSpec>& aggs) {
  Names out;
  for (const auto& a : aggs) out.insert(a.inputs.begin(), a.inputs.end());
  return out;
}

// Two-phase form of a list of aggregates: `inner` computes partials under
// fresh names, `outer` combines them, and avg adds a division afterwards.
struct TwoPhase {
  std::vector<AggSpec> inner;
  std::vector<AggSpec> outer;
  struct Division {
    std::string output, sum, count;
  };
  std::vector<Division> divisions;

  // Γ_{G, outer} over `input`, followed by the avg divisions.
  TermPtr finish(TermPtr input, const std::set<std::string>& group_by, const std::vector<AggSpec>& original) const {
    TermPtr t = aggregate(std::move(input), group_by, outer);
    if (divisions.empty()) return t;
    for (const auto& d : divisions) t = derive(t, d.output, FnRef{"div", {}, false}, {d.sum, d.count});
    Names keep = group_by;
    for (const auto& a : original) keep.insert(a.alias);
    return project(t, keep);
  }
};

std::optional<TwoPhase> two_phase(const std::vector<AggSpec>& aggs, RewriteEnv& env, const TermPtr& scope) {
  TwoPhase out;
  for (const auto& a : aggs) {
    if (a.for_each && !supports_for_each(a.fn)) return std::nullopt;
    AggDecomposition dec = decompose(a.fn);
    if (a.fn == AggFn::kAvg) {
      if (a.for_each) return std::nullopt;
      std::string s = env.fresh("sum_", scope), c = env.fresh("cnt_", scope);
      std::string S = env.fresh("sum_", scope), C = env.fresh("cnt_", scope);
      out.inner.push_back({AggFn::kSum, a.inputs, s, false});
      out.inner.push_back({AggFn::kCount, a.inputs, c, false});
      out.outer.push_back({AggFn::kSum, {s}, S, false});
      out.outer.push_back({AggFn::kSum, {c}, C, false});
      out.divisions.push_back({a.alias, S, C});
      continue;
    }
    std::string m = env.fresh("part_", scope);
    out.inner.push_back({dec.initial[0], a.inputs, m, a.for_each});
    out.outer.push_back({dec.final[0], {m}, a.alias, a.for_each});
  }
  return out;
}

// σ_θG(Γ_G(φ)) -> Γ_G(σ_θG(φ)) for the conjuncts over grouping columns.
Out r16(const TermPtr& t, RewriteEnv&) {
  const auto* f = t->as<Filter>();
  if (!f) return std::nullopt;
  const auto* g = f->input->as<Aggregate>();
  if (!g) return std::nullopt;
  auto [push, rest] = partition(f->pred, [&](const PredPtr& c) { return subset(columns_of(c), g->group_by); });
  if (push.empty()) return std::nullopt;
  return filter_if(aggregate(filter(g->input, conjoin(push)), g->group_by, g->aggs), rest);
}

// Γ_{G, agg(a):n}(μ_{A:a}(φ)) -> Π(δ_{n=arrayFold(N)}(Γ_{G, aggForEach(A):N}(σ_{A≠[]}(φ)))).
Out r17_1(const TermPtr& t, RewriteEnv& env) {
  const auto* g = t->as<Aggregate>();
  if (!g) return std::nullopt;
  const auto* mu = g->input->as<ArrayJoin>();
  if (!mu || mu->targets.size() != 1) return std::nullopt;
  const auto& [src, alias] = mu->targets[0];
  if (g->group_by.count(alias) || g->group_by.count(src) || g->aggs.empty()) return std::nullopt;
  for (const auto& a : g->aggs)
    if (a.for_each || a.inputs != std::vector<std::string>{alias} || !supports_for_each(a.fn)) return std::nullopt;
  std::vector<AggSpec> inner;
  std::vector<std::pair<std::string, AggSpec>> folds;
  for (const auto& a : g->aggs) {
    std::string n = env.fresh("each_", t);
    inner.push_back({a.fn, {src}, n, true});
    folds.push_back({n, a});
  }
  TermPtr out = aggregate(filter(mu->input, nonempty_pred(src)), g->group_by, inner);
  Names keep = g->group_by;
  for (const auto& [n, a] : folds) {
    out = derive(out, a.alias, FnRef{array_fold_fn(a.fn), {}, false}, {n});
    keep.insert(a.alias);
  }
  return project(out, keep);
}

// Γ_{a, agg(s):n}(μ_{A:a}(φ)) -> Γ_{a, agg^f(m):n}(μ_{A:a}(Γ_{A, agg^i(s):m}(φ))).
Out r17_2(const TermPtr& t, RewriteEnv& env) {
  const auto* g = t->as<Aggregate>();
  if (!g) return std::nullopt;
  const auto* mu = g->input->as<ArrayJoin>();
  if (!mu || mu->targets.size() != 1) return std::nullopt;
  const auto& [src, alias] = mu->targets[0];
  if (!g->group_by.count(alias)) return std::nullopt;
  Names inputs = agg_inputs(g->aggs);
  if (inputs.count(alias) || inputs.count(src)) return std::nullopt;
  for (const auto& a : g->aggs)
    if (a.for_each) return std::nullopt;
  auto tp = two_phase(g->aggs, env, t);
  if (!tp) return std::nullopt;
  Names inner_g = g->group_by;
  inner_g.erase(alias);
  inner_g.insert(src);
  TermPtr inner = aggregate(mu->input, inner_g, tp->inner);
  return tp->finish(array_join(inner, mu->targets), g->group_by, g->aggs);
}

// Γ_{a1, agg(a2):n}(μ_{A1:a1, A2:a2}(φ)) ->
//   Γ_{a1, agg^f(m):n}(μ_{A1:a1, N:m}(Γ_{A1, aggForEach^i(A2):N}(φ))).
Out r17_3(const TermPtr& t, RewriteEnv& env) {
  const auto* g = t->as<Aggregate>();
  if (!g) return std::nullopt;
  const auto* mu = g->input->as<ArrayJoin>();
  if (!mu || mu->targets.size() != 2) return std::nullopt;
  for (int first = 0; first < 2; ++first) {
    const Target& t1 = mu->targets[first];
    const Target& t2 = mu->targets[1 - first];
    if (!g->group_by.count(t1.alias) || g->group_by.count(t2.alias) || g->aggs.empty()) continue;
    bool ok = true;
    for (const auto& a : g->aggs)
      ok &= !a.for_each && a.inputs == std::vector<std::string>{t2.alias} && supports_for_each(a.fn);
    if (!ok) continue;
    Names inner_g = g->group_by;
    inner_g.erase(t1.alias);
    if (inner_g.count(t2.source)) continue;
    inner_g.insert(t1.source);
    std::vector<AggSpec> inner, outer;
    std::vector<Target> targets{t1};
    for (const auto& a : g->aggs) {
      std::string arr = env.fresh("each_", t), elem = env.fresh("part_", t);
      AggDecomposition dec = decompose(a.fn);
      inner.push_back({dec.initial[0], {t2.source}, arr, true});
      targets.push_back({arr, elem});
      outer.push_back({dec.final[0], {elem}, a.alias, false});
    }
    return aggregate(array_join(aggregate(mu->input, inner_g, inner), targets), g->group_by, outer);
  }
  return std::nullopt;
}

// Γ_{G, agg(X):m}(σ_θL(φ)) -> Γ_{G, agg^f}(σ_θL(Γ_{G ∪ L, agg^i(X)}(φ))).
Out r18(const TermPtr& t, RewriteEnv& env) {
  const auto* g = t->as<Aggregate>();
  if (!g) return std::nullopt;
  const auto* f = g->input->as<Filter>();
  if (!f) return std::nullopt;
  Names l = columns_of(f->pred);
  if (!disjoint(l, agg_inputs(g->aggs))) return std::nullopt;
  auto tp = two_phase(g->aggs, env, t);
  if (!tp) return std::nullopt;
  TermPtr inner = aggregate(f->input, unite(g->group_by, l), tp->inner);
  return tp->finish(filter(inner, f->pred), g->group_by, g->aggs);
}

// Γ_{G, agg(X):m}(δ_{y=f(x..)}(φ)) -> Γ_{G, agg^f}(δ(Γ_{G \ y ∪ {x..}, agg^i(X)}(φ))).
Out r19(const TermPtr& t, RewriteEnv& env) {
  const auto* g = t->as<Aggregate>();
  if (!g) return std::nullopt;
  const auto* d = g->input->as<Derive>();
  if (!d) return std::nullopt;
  if (agg_inputs(g->aggs).count(d->output)) return std::nullopt;
  auto tp = two_phase(g->aggs, env, t);
  if (!tp) return std::nullopt;
  Names inner_g = g->group_by;
  inner_g.erase(d->output);
  inner_g.insert(d->inputs.begin(), d->inputs.end());
  TermPtr inner = aggregate(d->input, inner_g, tp->inner);
  return tp->finish(derive(inner, d->output, d->fn, d->inputs), g->group_by, g->aggs);
}

// Γ_{G, agg(X):m}(φ_T(φ)) -> Γ_{G, agg^f}(φ_T(Γ_{G \ A ∪ S, agg^i(X)}(φ))).
Out r20(const TermPtr& t, RewriteEnv& env) {
  const auto* g = t->as<Aggregate>();
  if (!g) return std::nullopt;
  const auto* af = g->input->as<ArrayFilter>();
  if (!af) return std::nullopt;
  Names s = sources(af->targets), a = aliases(af->targets);
  if (!disjoint(agg_inputs(g->aggs), unite(s, a))) return std::nullopt;
  auto tp = two_phase(g->aggs, env, t);
  if (!tp) return std::nullopt;
  TermPtr inner = aggregate(af->input, unite(minus(g->group_by, a), s), tp->inner);
  return tp->finish(array_filter(inner, af->targets, af->pred), g->group_by, g->aggs);
}

// Γ_{G, agg(X):n}(φ1 ⋈ φ2) -> Γ_{G, agg^f}(Γ_{G1 ∪ J, agg^i(X)}(φ1) ⋈ φ2)
// when X belongs to one operand only.
Out r21(const TermPtr& t, RewriteEnv& env) {
  const auto* g = t->as<Aggregate>();
  if (!g) return std::nullopt;
  const auto* j = g->input->as<Join>();
  if (!j) return std::nullopt;
  const Schema& ls = env.schema(j->left);
  const Schema& rs = env.schema(j->right);
  Names x = agg_inputs(g->aggs), keys = shared_columns(ls, rs);
  for (int side = 0; side < 2; ++side) {
    Names mine = (side ? rs : ls).columns(), other = (side ? ls : rs).columns();
    if (!subset(x, mine) || !disjoint(x, other)) continue;
    auto tp = two_phase(g->aggs, env, t);
    if (!tp) return std::nullopt;
    Names inner_g = keys;
    for (const auto& c : g->group_by)
      if (mine.count(c)) inner_g.insert(c);
    TermPtr inner = aggregate(side ? j->right : j->left, inner_g, tp->inner);
    TermPtr joined = side ? join(j->left, inner) : join(inner, j->right);
    return tp->finish(joined, g->group_by, g->aggs);
  }
  return std::nullopt;
}

}  // namespace

std::vector<Rule> aggregate_rules() {
  const auto cb = RuleKind::kCostBased;
  return {
      {"R16", cb, "filter and aggregate swap on grouping columns", r16},
      {"R17.1", cb, "pre-aggregation with aggForEach under arrayJoin", r17_1, true},
      {"R17.2", cb, "pre-aggregation by the unnested array", r17_2, true},
      {"R17.3", cb, "pre-aggregation over corresponding arrays", r17_3, true},
      {"R18", cb, "pre-aggregation under filter", r18, true},
      {"R19", cb, "pre-aggregation under derive", r19, true},
      {"R20", cb, "pre-aggregation under arrayFilter", r20, true},
      {"R21", cb, "pre-aggregation below join", r21, true},
  };
}

}  // namespace rules

namespace {

// Γ_G(f(m))∘Γ_G(i(x):m) with each partial consumed once collapses to Γ_G(i(x)).
std::optional<TermPtr> collapse(const TermPtr& t) {
  const auto* outer = t->as<Aggregate>();
  if (!outer) return std::nullopt;
  const auto* inner = outer->input->as<Aggregate>();
  if (!inner || inner->group_by != outer->group_by || inner->aggs.size() != outer->aggs.size())
    return std::nullopt;
  std::vector<AggSpec> merged;
  std::set<std::string> used;
  for (const auto& o : outer->aggs) {
    if (o.inputs.size() != 1) return std::nullopt;
    const AggSpec* src = nullptr;
    for (const auto& i : inner->aggs)
      if (i.alias == o.inputs[0]) src = &i;
    if (!src || !used.insert(src->alias).second || src->for_each != o.for_each) return std::nullopt;
    AggDecomposition dec = decompose(src->fn);
    if (src->fn == AggFn::kAvg || dec.final[0] != o.fn) return std::nullopt;
    merged.push_back({src->fn, src->inputs, o.alias, src->for_each});
  }
  return aggregate(inner->input, outer->group_by, merged);
}

}  // namespace

TermPtr simplify_reaggregation(const TermPtr& t) {
  auto kids = children(t);
  for (auto& k : kids) k = simplify_reaggregation(k);
  TermPtr out = kids.empty() ? t : with_children(t, kids);
  while (auto c = collapse(out)) out = *c;
  return out;
}

}  // namespace a3d
