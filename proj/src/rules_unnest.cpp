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

// Rules moving operators across arrayJoin (μ).

#include "rules_internal.hpp"

namespace a3d::rules {
namespace {

using Out = std::optional<TermPtr>;

// μ_{T2}(μ_{T1}(φ)) -> μ_{T1}(μ_{T2}(φ)) over distinct attributes.
Out r1(const TermPtr& t, RewriteEnv&) {
  const auto* outer = t->as<ArrayJoin>();
  if (!outer) return std::nullopt;
  const auto* inner = outer->input->as<ArrayJoin>();
  if (!inner) return std::nullopt;
  Names s1 = sources(inner->targets), a1 = aliases(inner->targets);
  Names s2 = sources(outer->targets), a2 = aliases(outer->targets);
  if (!disjoint(s2, a1) || !disjoint(a2, s1) || !disjoint(a2, a1) || !disjoint(s1, s2)) return std::nullopt;
  return array_join(array_join(inner->input, outer->targets), inner->targets);
}

// σ_θ(μ_T(φ)) -> μ_T(σ_θ(φ)) for the conjuncts not reading the aliases.
Out r2_1(const TermPtr& t, RewriteEnv&) {
  const auto* f = t->as<Filter>();
  if (!f) return std::nullopt;
  const auto* mu = f->input->as<ArrayJoin>();
  if (!mu) return std::nullopt;
  Names a = aliases(mu->targets);
  auto [push, rest] = partition(f->pred, [&](const PredPtr& c) { return disjoint(columns_of(c), a); });
  if (push.empty()) return std::nullopt;
  return filter_if(array_join(filter(mu->input, conjoin(push)), mu->targets), rest);
}

// σ_θ(n)(μ_{a:n}(φ)) -> μ_{a:n}(φ_{(a:a), θ[n->a]}(φ)); the arrayFilter covers
// every target so the arrays stay aligned.
Out r2_2(const TermPtr& t, RewriteEnv&) {
  const auto* f = t->as<Filter>();
  if (!f) return std::nullopt;
  const auto* mu = f->input->as<ArrayJoin>();
  if (!mu) return std::nullopt;
  Names a = aliases(mu->targets);
  auto [move, rest] = partition(f->pred, [&](const PredPtr& c) {
    Names cols = columns_of(c);
    return !cols.empty() && subset(cols, a);
  });
  if (move.empty()) return std::nullopt;
  std::map<std::string, std::string> renames;
  std::vector<Target> in_place;
  for (const auto& tg : mu->targets) {
    renames[tg.alias] = tg.source;
    in_place.push_back({tg.source, tg.source});
  }
  TermPtr phi = array_filter(mu->input, in_place, rename_columns(conjoin(move), renames));
  return filter_if(array_join(phi, mu->targets), rest);
}

// μ_{a:n}(φ) -> μ_{a:n}(σ_{length(a) != 0}(φ)).
Out r2_3(const TermPtr& t, RewriteEnv&) {
  const auto* mu = t->as<ArrayJoin>();
  if (!mu) return std::nullopt;
  const std::string& a = mu->targets[0].source;
  if (is_nonempty_filter(mu->input, a)) return std::nullopt;
  return array_join(filter(mu->input, nonempty_pred(a)), mu->targets);
}

// Π_L(μ_T(φ)) -> Π_L(μ_T(Π_{L \ A ∪ S}(φ))).
Out r3(const TermPtr& t, RewriteEnv& env) {
  const auto* p = t->as<Project>();
  if (!p) return std::nullopt;
  const auto* mu = p->input->as<ArrayJoin>();
  if (!mu) return std::nullopt;
  Names keep = unite(minus(p->columns, aliases(mu->targets)), sources(mu->targets));
  if (keep.size() >= env.schema(mu->input).columns().size()) return std::nullopt;
  return project(array_join(project(mu->input, keep), mu->targets), p->columns);
}

// μ_T(φ1) ⋈ φ2 <-> μ_T(φ1 ⋈ φ2); both directions, either join side.
Out r4_1(const TermPtr& t, RewriteEnv& env) {
  if (const auto* j = t->as<Join>()) {
    for (int side = 0; side < 2; ++side) {
      const TermPtr& here = side ? j->right : j->left;
      const TermPtr& other = side ? j->left : j->right;
      const auto* mu = here->as<ArrayJoin>();
      if (!mu) continue;
      Names other_cols = env.schema(other).columns();
      if (!disjoint(unite(sources(mu->targets), aliases(mu->targets)), other_cols)) continue;
      return array_join(side ? join(other, mu->input) : join(mu->input, other), mu->targets);
    }
    return std::nullopt;
  }
  const auto* mu = t->as<ArrayJoin>();
  if (!mu) return std::nullopt;
  const auto* j = mu->input->as<Join>();
  if (!j) return std::nullopt;
  Names s = sources(mu->targets), a = aliases(mu->targets);
  Names left = env.schema(j->left).columns(), right = env.schema(j->right).columns();
  if (subset(s, left) && disjoint(unite(s, a), right)) return join(array_join(j->left, mu->targets), j->right);
  if (subset(s, right) && disjoint(unite(s, a), left)) return join(j->left, array_join(j->right, mu->targets));
  return std::nullopt;
}

// μ_{A:N, B:M}(φ1 ⋈ φ2) with A ≈ B from different sides -> join of both
// sides unnested with arrayEnumerate indices.
Out r4_2(const TermPtr& t, RewriteEnv& env) {
  const auto* mu = t->as<ArrayJoin>();
  if (!mu) return std::nullopt;
  const auto* j = mu->input->as<Join>();
  if (!j) return std::nullopt;
  Names left = env.schema(j->left).columns(), right = env.schema(j->right).columns();
  std::vector<Target> tl, tr;
  for (const auto& tg : mu->targets) {
    if (left.count(tg.source) && !right.count(tg.source))
      tl.push_back(tg);
    else if (right.count(tg.source) && !left.count(tg.source))
      tr.push_back(tg);
    else
      return std::nullopt;
  }
  if (tl.empty() || tr.empty()) return std::nullopt;
  if (!disjoint(aliases(tl), right) || !disjoint(aliases(tr), left) || !disjoint(aliases(tl), aliases(tr)))
    return std::nullopt;
  if (!corresponds(env.catalog(), tl[0].source, tr[0].source)) return std::nullopt;
  std::string idx = env.fresh("idx_", t);
  auto side = [&](const TermPtr& in, std::vector<Target> ts) {
    TermPtr d = derive(in, idx, FnRef{"arrayEnumerate", {}, false}, {ts[0].source});
    ts.push_back({idx, idx});
    return array_join(d, ts);
  };
  return project(join(side(j->left, tl), side(j->right, tr)), env.schema(t).columns());
}

// δ_{y=f(X)}(μ_T(φ)) -> μ_T(δ_{y=f(X)}(φ)) when X avoids the aliases.
Out r5_1(const TermPtr& t, RewriteEnv&) {
  const auto* d = t->as<Derive>();
  if (!d) return std::nullopt;
  const auto* mu = d->input->as<ArrayJoin>();
  if (!mu) return std::nullopt;
  Names s = sources(mu->targets), a = aliases(mu->targets);
  Names x(d->inputs.begin(), d->inputs.end());
  if (!disjoint(x, a) || s.count(d->output) || a.count(d->output)) return std::nullopt;
  return array_join(derive(mu->input, d->output, d->fn, d->inputs), mu->targets);
}

// δ_{y=f(n)}(μ_{a:n}(φ)) -> μ_{(a:n, y:y)}(δ_{y=arrayMap f(a)}(φ)).
Out r5_2(const TermPtr& t, RewriteEnv&) {
  const auto* d = t->as<Derive>();
  if (!d || d->fn.map) return std::nullopt;
  const auto* info = FunctionRegistry::instance().find(d->fn.name);
  if (!info || info->shape != FnShape::kElement) return std::nullopt;
  const auto* mu = d->input->as<ArrayJoin>();
  if (!mu) return std::nullopt;
  Names s = sources(mu->targets), a = aliases(mu->targets);
  if (s.count(d->output) || a.count(d->output)) return std::nullopt;
  std::map<std::string, std::string> back;
  for (const auto& tg : mu->targets) back[tg.alias] = tg.source;
  std::vector<std::string> inputs;
  bool uses_alias = false;
  for (const auto& x : d->inputs) {
    auto it = back.find(x);
    uses_alias |= it != back.end();
    inputs.push_back(it != back.end() ? it->second : x);
  }
  if (!uses_alias) return std::nullopt;
  auto targets = mu->targets;
  targets.push_back({d->output, d->output});
  return array_join(derive(mu->input, d->output, FnRef{d->fn.name, d->fn.params, true}, inputs), targets);
}

// φ_{T'}(μ_T(φ)) -> μ_T(φ_{T'}(φ)) over independent arrays.
Out r6(const TermPtr& t, RewriteEnv&) {
  const auto* af = t->as<ArrayFilter>();
  if (!af) return std::nullopt;
  const auto* mu = af->input->as<ArrayJoin>();
  if (!mu) return std::nullopt;
  if (!disjoint(unite(sources(af->targets), aliases(af->targets)),
                unite(sources(mu->targets), aliases(mu->targets))))
    return std::nullopt;
  return array_join(array_filter(mu->input, af->targets, af->pred), mu->targets);
}

}  // namespace

std::vector<Rule> unnest_rules() {
  const auto rb = RuleKind::kRuleBased, cb = RuleKind::kCostBased;
  return {
      {"R1", cb, "arrayJoin commutativity", r1},
      {"R2.1", rb, "filter pushdown under arrayJoin", r2_1},
      {"R2.2", rb, "filter on flattened columns to arrayFilter", r2_2},
      {"R2.3", cb, "empty-array elimination before arrayJoin", r2_3},
      {"R3", rb, "projection pushdown under arrayJoin", r3},
      {"R4.1", cb, "join and arrayJoin exchange", r4_1},
      {"R4.2", cb, "arrayJoin of corresponding arrays over a join", r4_2},
      {"R5.1", rb, "derive pushdown under arrayJoin", r5_1},
      {"R5.2", cb, "derive on flattened column via arrayMap", r5_2},
      {"R6", rb, "arrayFilter pushdown under arrayJoin", r6},
  };
}

}  // namespace a3d::rules
