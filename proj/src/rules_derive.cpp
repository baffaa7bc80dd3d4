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

// Rules for arrayFilter (φ) and derive (δ).

#include "rules_internal.hpp"

namespace a3d::rules {
namespace {

using Out = std::optional<TermPtr>;

bool in_place(const std::vector<Target>& ts) {
  for (const auto& t : ts)
    if (t.source != t.alias) return false;
  return true;
}

// φ_{T2}(φ_{T1}(φ)) -> φ_{T1}(φ_{T2}(φ)).
Out r7(const TermPtr& t, RewriteEnv&) {
  const auto* outer = t->as<ArrayFilter>();
  if (!outer) return std::nullopt;
  const auto* inner = outer->input->as<ArrayFilter>();
  if (!inner) return std::nullopt;
  bool same = outer->targets == inner->targets && in_place(outer->targets);
  Names s1 = sources(inner->targets), a1 = aliases(inner->targets);
  Names s2 = sources(outer->targets), a2 = aliases(outer->targets);
  bool independent = disjoint(s2, a1) && disjoint(a2, s1) && disjoint(a2, a1) && disjoint(s1, s2);
  if (!same && !independent) return std::nullopt;
  return array_filter(array_filter(inner->input, outer->targets, outer->pred), inner->targets, inner->pred);
}

// σ_θ(φ_T(φ)) -> φ_T(σ_θ(φ)) for the conjuncts not reading the aliases.
Out r8(const TermPtr& t, RewriteEnv&) {
  const auto* f = t->as<Filter>();
  if (!f) return std::nullopt;
  const auto* af = f->input->as<ArrayFilter>();
  if (!af) return std::nullopt;
  Names a = aliases(af->targets);
  auto [push, rest] = partition(f->pred, [&](const PredPtr& c) { return disjoint(columns_of(c), a); });
  if (push.empty()) return std::nullopt;
  return filter_if(array_filter(filter(af->input, conjoin(push)), af->targets, af->pred), rest);
}

// Π_L(φ_T(φ)) -> Π_L(φ_T(Π_{L \ A ∪ S}(φ))).
Out r9(const TermPtr& t, RewriteEnv& env) {
  const auto* p = t->as<Project>();
  if (!p) return std::nullopt;
  const auto* af = p->input->as<ArrayFilter>();
  if (!af) return std::nullopt;
  Names keep = unite(minus(p->columns, aliases(af->targets)), sources(af->targets));
  if (keep.size() >= env.schema(af->input).columns().size()) return std::nullopt;
  return project(array_filter(project(af->input, keep), af->targets, af->pred), p->columns);
}

// Side (0 left, 1 right) that owns every source exclusively and whose
// partner does not see the aliases.
std::optional<int> owning_side(const std::vector<Target>& ts, const Join& j, RewriteEnv& env) {
  Names s = sources(ts), a = aliases(ts);
  Names left = env.schema(j.left).columns(), right = env.schema(j.right).columns();
  if (subset(s, left) && disjoint(unite(s, a), right)) return 0;
  if (subset(s, right) && disjoint(unite(s, a), left)) return 1;
  return std::nullopt;
}

Out push_filter_into_join(const TermPtr& t, RewriteEnv& env, bool multi) {
  const auto* af = t->as<ArrayFilter>();
  if (!af || (af->targets.size() > 1) != multi) return std::nullopt;
  const auto* j = af->input->as<Join>();
  if (!j) return std::nullopt;
  auto side = owning_side(af->targets, *j, env);
  if (!side) return std::nullopt;
  if (*side == 0) return join(array_filter(j->left, af->targets, af->pred), j->right);
  return join(j->left, array_filter(j->right, af->targets, af->pred));
}

// φ_{a:n,θ}(φ1 ⋈ φ2) -> φ_{a:n,θ}(φ1) ⋈ φ2.
Out r10_1(const TermPtr& t, RewriteEnv& env) { return push_filter_into_join(t, env, false); }

// Same for a coordinated filter over arrays a1..ak of one side.
Out r10_2(const TermPtr& t, RewriteEnv& env) { return push_filter_into_join(t, env, true); }

// φ_{a:n,θa}(φ_{b:m,θb}(φ1 ⋈ φ2)) -> φ_{a:n,θa}(φ1) ⋈ φ_{b:m,θb}(φ2) for
// non-corresponding arrays of different sides.
Out r10_3(const TermPtr& t, RewriteEnv& env) {
  const auto* outer = t->as<ArrayFilter>();
  if (!outer || outer->targets.size() != 1) return std::nullopt;
  const auto* inner = outer->input->as<ArrayFilter>();
  if (!inner || inner->targets.size() != 1) return std::nullopt;
  const auto* j = inner->input->as<Join>();
  if (!j) return std::nullopt;
  if (corresponds(env.catalog(), outer->targets[0].source, inner->targets[0].source)) return std::nullopt;
  auto so = owning_side(outer->targets, *j, env), si = owning_side(inner->targets, *j, env);
  if (!so || !si || *so == *si) return std::nullopt;
  const ArrayFilter& l = *so == 0 ? *outer : *inner;
  const ArrayFilter& r = *so == 0 ? *inner : *outer;
  return join(array_filter(j->left, l.targets, l.pred), array_filter(j->right, r.targets, r.pred));
}

// φ_T(δ_{y=f(X)}(φ)) -> δ_{y=f(X)}(φ_T(φ)) when y and X avoid the filtered arrays.
Out r11_1(const TermPtr& t, RewriteEnv&) {
  const auto* af = t->as<ArrayFilter>();
  if (!af) return std::nullopt;
  const auto* d = af->input->as<Derive>();
  if (!d) return std::nullopt;
  Names touched = unite(sources(af->targets), aliases(af->targets));
  if (touched.count(d->output) || !disjoint(Names(d->inputs.begin(), d->inputs.end()), touched))
    return std::nullopt;
  return derive(array_filter(d->input, af->targets, af->pred), d->output, d->fn, d->inputs);
}

// φ_{(a:a),θ}(δ_{a=arrayMap f(a)}(φ)) -> δ_{a=arrayMap f(a)}(φ_{(a:a),θ'}(φ))
// with θ' the inversion of θ through f.
Out r11_2(const TermPtr& t, RewriteEnv&) {
  const auto* af = t->as<ArrayFilter>();
  if (!af || af->targets.size() != 1 || !in_place(af->targets)) return std::nullopt;
  const auto* d = af->input->as<Derive>();
  if (!d || !d->fn.map || d->inputs.size() != 1) return std::nullopt;
  const std::string& a = d->inputs[0];
  if (d->output != a || af->targets[0].source != a) return std::nullopt;
  FnRef scalar{d->fn.name, d->fn.params, false};
  auto inverted = invert_all(af->pred, a, scalar, a);
  if (!inverted) return std::nullopt;
  return derive(array_filter(d->input, af->targets, *inverted), d->output, d->fn, d->inputs);
}

// δ2(δ1(φ)) -> δ1(δ2(φ)) when neither reads the other's output.
Out r12(const TermPtr& t, RewriteEnv&) {
  const auto* d2 = t->as<Derive>();
  if (!d2) return std::nullopt;
  const auto* d1 = d2->input->as<Derive>();
  if (!d1) return std::nullopt;
  Names x1(d1->inputs.begin(), d1->inputs.end()), x2(d2->inputs.begin(), d2->inputs.end());
  if (x2.count(d1->output) || x1.count(d2->output) || d1->output == d2->output) return std::nullopt;
  return derive(derive(d1->input, d2->output, d2->fn, d2->inputs), d1->output, d1->fn, d1->inputs);
}

// σ_θ(δ_y(φ)) -> δ_y(σ_θ(φ)) for the conjuncts not reading y.
Out r13_1(const TermPtr& t, RewriteEnv&) {
  const auto* f = t->as<Filter>();
  if (!f) return std::nullopt;
  const auto* d = f->input->as<Derive>();
  if (!d) return std::nullopt;
  auto [push, rest] = partition(f->pred, [&](const PredPtr& c) { return !columns_of(c).count(d->output); });
  if (push.empty()) return std::nullopt;
  return filter_if(derive(filter(d->input, conjoin(push)), d->output, d->fn, d->inputs), rest);
}

// σ_θ(y)(δ_{y=f(x)}(φ)) -> δ_{y=f(x)}(σ_θ'(x)(φ)) for invertible f.
Out r13_2(const TermPtr& t, RewriteEnv&) {
  const auto* f = t->as<Filter>();
  if (!f) return std::nullopt;
  const auto* d = f->input->as<Derive>();
  if (!d || d->fn.map || d->inputs.size() != 1 || !affine_form(d->fn)) return std::nullopt;
  std::vector<PredPtr> push, rest;
  for (const auto& c : split_conjuncts(f->pred)) {
    if (!columns_of(c).count(d->output)) {
      rest.push_back(c);
      continue;
    }
    auto inv = invert_all(c, d->output, d->fn, d->inputs[0]);
    (inv ? push : rest).push_back(inv ? *inv : c);
  }
  if (push.empty()) return std::nullopt;
  return filter_if(derive(filter(d->input, conjoin(push)), d->output, d->fn, d->inputs), rest);
}

// Π_L(δ_{y=f(X)}(φ)) -> Π_L(δ(Π_{L \ {y} ∪ X}(φ))).
Out r14(const TermPtr& t, RewriteEnv& env) {
  const auto* p = t->as<Project>();
  if (!p) return std::nullopt;
  const auto* d = p->input->as<Derive>();
  if (!d) return std::nullopt;
  Names keep = p->columns;
  keep.erase(d->output);
  keep.insert(d->inputs.begin(), d->inputs.end());
  if (keep.size() >= env.schema(d->input).columns().size()) return std::nullopt;
  return project(derive(project(d->input, keep), d->output, d->fn, d->inputs), p->columns);
}

// δ_{y=f(X)}(φ1 ⋈ φ2) -> δ(φ1) ⋈ φ2 when X comes from one side.
Out r15(const TermPtr& t, RewriteEnv& env) {
  const auto* d = t->as<Derive>();
  if (!d) return std::nullopt;
  const auto* j = d->input->as<Join>();
  if (!j) return std::nullopt;
  Names x(d->inputs.begin(), d->inputs.end());
  Names left = env.schema(j->left).columns(), right = env.schema(j->right).columns();
  if (subset(x, left) && !right.count(d->output))
    return join(derive(j->left, d->output, d->fn, d->inputs), j->right);
  if (subset(x, right) && !left.count(d->output))
    return join(j->left, derive(j->right, d->output, d->fn, d->inputs));
  return std::nullopt;
}

}  // namespace

std::vector<Rule> derive_rules() {
  const auto rb = RuleKind::kRuleBased, cb = RuleKind::kCostBased;
  return {
      {"R7", cb, "arrayFilter commutativity", r7},
      {"R8", rb, "filter pushdown under arrayFilter", r8},
      {"R9", rb, "projection pushdown under arrayFilter", r9},
      {"R10.1", cb, "arrayFilter pushdown into one join side", r10_1},
      {"R10.2", cb, "coordinated arrayFilter pushdown into one join side", r10_2},
      {"R10.3", cb, "arrayFilters split across join sides", r10_3},
      {"R11.1", cb, "arrayFilter and derive exchange", r11_1},
      {"R11.2", rb, "arrayFilter inversion through arrayMap", r11_2},
      {"R12", cb, "derive commutativity", r12},
      {"R13.1", rb, "filter pushdown under derive", r13_1},
      {"R13.2", rb, "filter inversion through derive", r13_2},
      {"R14", rb, "projection pushdown under derive", r14},
      {"R15", cb, "derive pushdown into one join side", r15},
  };
}

}  // namespace a3d::rules
