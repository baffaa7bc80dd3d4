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

#include "a3d/term.hpp"

#include <algorithm>

#include "a3d/errors.hpp"

namespace a3d {

std::set<std::string> Schema::columns() const {
  std::set<std::string> out = scalars;
  out.insert(arrays.begin(), arrays.end());
  return out;
}

std::string to_string(const Schema& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& c : s.columns()) {
    out += (first ? "" : ", ") + c + (s.is_array(c) ? "[]" : "");
    first = false;
  }
  return out + "}";
}

bool corresponds(const Catalog& catalog, const std::string& a, const std::string& b) {
  if (a == b) return true;
  for (const auto& [name, info] : catalog)
    for (const auto& [x, y] : info.correspondences)
      if ((x == a && y == b) || (x == b && y == a)) return true;
  return false;
}

namespace {

TermPtr make(auto node) { return std::make_shared<Term>(Term{std::move(node)}); }

}  // namespace

TermPtr rel(std::string name) { return make(RelVar{std::move(name)}); }
TermPtr join(TermPtr left, TermPtr right) { return make(Join{std::move(left), std::move(right)}); }
TermPtr filter(TermPtr input, PredPtr pred) { return make(Filter{std::move(input), std::move(pred)}); }
TermPtr project(TermPtr input, std::set<std::string> columns) {
  return make(Project{std::move(input), std::move(columns)});
}
TermPtr array_filter(TermPtr input, std::vector<Target> targets, PredPtr pred) {
  return make(ArrayFilter{std::move(input), std::move(targets), std::move(pred)});
}
TermPtr array_join(TermPtr input, std::vector<Target> targets) {
  return make(ArrayJoin{std::move(input), std::move(targets)});
}
TermPtr derive(TermPtr input, std::string output, FnRef fn, std::vector<std::string> inputs) {
  return make(Derive{std::move(input), std::move(output), std::move(fn), std::move(inputs)});
}
TermPtr aggregate(TermPtr input, std::set<std::string> group_by, std::vector<AggSpec> aggs) {
  return make(Aggregate{std::move(input), std::move(group_by), std::move(aggs)});
}
TermPtr array_join(TermPtr input, const std::string& source, const std::string& alias) {
  return array_join(std::move(input), std::vector<Target>{{source, alias.empty() ? source : alias}});
}
TermPtr array_filter(TermPtr input, const std::string& source, const std::string& alias, PredPtr pred) {
  return array_filter(std::move(input), std::vector<Target>{{source, alias.empty() ? source : alias}},
                      std::move(pred));
}

std::vector<TermPtr> children(const TermPtr& t) {
  if (t->is<RelVar>()) return {};
  if (const auto* j = t->as<Join>()) return {j->left, j->right};
  return {std::visit(
      [](const auto& x) -> TermPtr {
        if constexpr (requires { x.input; })
          return x.input;
        else
          return nullptr;
      },
      t->node)};
}

TermPtr with_children(const TermPtr& t, const std::vector<TermPtr>& kids) {
  if (t->is<RelVar>()) return t;
  if (const auto* j = t->as<Join>()) {
    if (kids.at(0) == j->left && kids.at(1) == j->right) return t;
    return join(kids[0], kids[1]);
  }
  return with_input(t, kids.at(0));
}

TermPtr with_input(const TermPtr& t, TermPtr input) {
  return std::visit(
      [&](const auto& x) -> TermPtr {
        if constexpr (requires { x.input; }) {
          if (x.input == input) return t;
          auto copy = x;
          copy.input = std::move(input);
          return make(std::move(copy));
        } else {
          throw Error("with_input on a node without a single input");
        }
      },
      t->node);
}

bool same_term(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, RelVar>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Join>) {
          return same_term(x.left, y.left) && same_term(x.right, y.right);
        } else if constexpr (std::is_same_v<T, Filter>) {
          return same_pred(x.pred, y.pred) && same_term(x.input, y.input);
        } else if constexpr (std::is_same_v<T, Project>) {
          return x.columns == y.columns && same_term(x.input, y.input);
        } else if constexpr (std::is_same_v<T, ArrayFilter>) {
          return x.targets == y.targets && same_pred(x.pred, y.pred) && same_term(x.input, y.input);
        } else if constexpr (std::is_same_v<T, ArrayJoin>) {
          return x.targets == y.targets && same_term(x.input, y.input);
        } else if constexpr (std::is_same_v<T, Derive>) {
          return x.output == y.output && x.fn == y.fn && x.inputs == y.inputs && same_term(x.input, y.input);
        } else {
          return x.group_by == y.group_by && x.aggs == y.aggs && same_term(x.input, y.input);
        }
      },
      a->node);
}

size_t operator_count(const TermPtr& t) {
  size_t n = 1;
  for (const auto& c : children(t)) n += operator_count(c);
  return n;
}

std::set<std::string> relation_names(const TermPtr& t) {
  if (const auto* r = t->as<RelVar>()) return {r->name};
  std::set<std::string> out;
  for (const auto& c : children(t)) {
    auto sub = relation_names(c);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

namespace {

std::string join_names(const auto& items, const std::string& sep = ", ") {
  std::string out;
  bool first = true;
  for (const auto& i : items) {
    out += (first ? "" : sep) + i;
    first = false;
  }
  return out;
}

std::string targets_string(const std::vector<Target>& targets) {
  std::vector<std::string> parts;
  for (const auto& t : targets) parts.push_back(t.source == t.alias ? t.source : t.source + ":" + t.alias);
  return join_names(parts);
}

std::string fn_string(const FnRef& fn) {
  std::string out = fn.name;
  if (!fn.params.empty()) {
    std::vector<std::string> ps;
    for (const auto& p : fn.params) ps.push_back(to_string(p));
    out += "[" + join_names(ps, ",") + "]";
  }
  return fn.map ? "arrayMap(" + out + ")" : out;
}

std::string agg_string(const AggSpec& a) {
  std::string fn = agg_name(a.fn) + (a.for_each ? "ForEach" : "");
  return fn + "(" + (a.inputs.empty() ? std::string("*") : join_names(a.inputs)) + "):" + a.alias;
}

}  // namespace

std::string op_symbol(const TermPtr& t) {
  static const char* symbols[] = {"R", "⋈", "σ", "Π", "φ", "μ", "δ", "Γ"};
  return symbols[t->node.index()];
}

std::string op_params(const TermPtr& t) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RelVar>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, Join>) {
          return "";
        } else if constexpr (std::is_same_v<T, Filter>) {
          return to_string(x.pred);
        } else if constexpr (std::is_same_v<T, Project>) {
          return join_names(x.columns);
        } else if constexpr (std::is_same_v<T, ArrayFilter>) {
          return targets_string(x.targets) + "; " + to_string(x.pred);
        } else if constexpr (std::is_same_v<T, ArrayJoin>) {
          return targets_string(x.targets);
        } else if constexpr (std::is_same_v<T, Derive>) {
          return x.output + "=" + fn_string(x.fn) + "(" + join_names(x.inputs) + ")";
        } else {
          std::vector<std::string> parts(x.group_by.begin(), x.group_by.end());
          for (const auto& a : x.aggs) parts.push_back(agg_string(a));
          return join_names(parts);
        }
      },
      t->node);
}

std::string to_string(const TermPtr& t) {
  if (const auto* r = t->as<RelVar>()) return r->name;
  if (const auto* j = t->as<Join>()) return "(" + to_string(j->left) + " ⋈ " + to_string(j->right) + ")";
  return op_symbol(t) + "[" + op_params(t) + "](" + to_string(children(t)[0]) + ")";
}

std::set<std::string> columns_read(const TermPtr& t) {
  return std::visit(
      [](const auto& x) -> std::set<std::string> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Filter>) {
          return columns_of(x.pred);
        } else if constexpr (std::is_same_v<T, Project>) {
          return x.columns;
        } else if constexpr (std::is_same_v<T, ArrayFilter> || std::is_same_v<T, ArrayJoin>) {
          std::set<std::string> out;
          for (const auto& tg : x.targets) out.insert(tg.source);
          return out;
        } else if constexpr (std::is_same_v<T, Derive>) {
          return {x.inputs.begin(), x.inputs.end()};
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          std::set<std::string> out = x.group_by;
          for (const auto& a : x.aggs) out.insert(a.inputs.begin(), a.inputs.end());
          return out;
        } else {
          return {};
        }
      },
      t->node);
}

// ---------------------------------------------------------------------------
// Typing

namespace {

void require_column(const Schema& s, const std::string& c, const std::string& where) {
  if (!s.has(c)) throw SchemaError("unknown column '" + c + "' in " + where);
}

void check_expr(const ExprPtr& e, const Schema& s, const std::string& where) {
  if (const auto* c = std::get_if<ColRef>(&e->node)) {
    require_column(s, c->name, where);
  } else if (const auto* a = std::get_if<Apply>(&e->node)) {
    check_fn(a->fn, a->args.size());
    for (const auto& arg : a->args) check_expr(arg, s, where);
  }
}

void check_pred(const PredPtr& p, const Schema& s, const std::string& where) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Compare>) {
          check_expr(x.lhs, s, where);
          check_expr(x.rhs, s, where);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          check_pred(x.inner, s, where);
        } else if constexpr (std::is_same_v<T, AndPred> || std::is_same_v<T, OrPred>) {
          for (const auto& part : x.parts) check_pred(part, s, where);
        }
      },
      p->node);
}

void check_targets(const std::vector<Target>& targets, const Schema& in, const std::string& where) {
  if (targets.empty()) throw SchemaError(where + " without targets");
  std::set<std::string> sources, aliases;
  for (const auto& t : targets) {
    require_column(in, t.source, where);
    if (!in.is_array(t.source)) throw SchemaError(where + " target '" + t.source + "' is not an array column");
    if (!sources.insert(t.source).second) throw SchemaError("duplicate source '" + t.source + "' in " + where);
    if (!aliases.insert(t.alias).second) throw SchemaError("duplicate output column '" + t.alias + "' in " + where);
  }
}

Schema compute(const TermPtr& t, TypeEnv& env) {
  return std::visit(
      [&](const auto& x) -> Schema {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RelVar>) {
          auto it = env.catalog().find(x.name);
          if (it == env.catalog().end()) throw SchemaError("unknown relation '" + x.name + "'");
          return it->second.schema;
        } else if constexpr (std::is_same_v<T, Join>) {
          Schema out = env.schema(x.left);
          const Schema& r = env.schema(x.right);
          for (const auto& c : r.columns()) {
            if (out.has(c) && out.is_array(c) != r.is_array(c))
              throw SchemaError("join column '" + c + "' is an array on one side only");
          }
          out.scalars.insert(r.scalars.begin(), r.scalars.end());
          out.arrays.insert(r.arrays.begin(), r.arrays.end());
          return out;
        } else if constexpr (std::is_same_v<T, Filter>) {
          Schema in = env.schema(x.input);
          check_pred(x.pred, in, "filter");
          return in;
        } else if constexpr (std::is_same_v<T, Project>) {
          const Schema& in = env.schema(x.input);
          if (x.columns.empty()) throw SchemaError("projection onto no columns");
          Schema out;
          for (const auto& c : x.columns) {
            require_column(in, c, "projection");
            (in.is_array(c) ? out.arrays : out.scalars).insert(c);
          }
          return out;
        } else if constexpr (std::is_same_v<T, ArrayFilter> || std::is_same_v<T, ArrayJoin>) {
          constexpr bool kFilter = std::is_same_v<T, ArrayFilter>;
          const char* where = kFilter ? "arrayFilter" : "arrayJoin";
          Schema out = env.schema(x.input);
          check_targets(x.targets, out, where);
          if constexpr (kFilter) {
            Schema elems;
            for (const auto& tg : x.targets) elems.scalars.insert(tg.alias);
            check_pred(x.pred, elems, "arrayFilter predicate");
          }
          for (const auto& tg : x.targets) {
            out.erase(tg.source);
            out.erase(tg.alias);
          }
          for (const auto& tg : x.targets) (kFilter ? out.arrays : out.scalars).insert(tg.alias);
          return out;
        } else if constexpr (std::is_same_v<T, Derive>) {
          Schema out = env.schema(x.input);
          check_fn(x.fn, x.inputs.size());
          const auto& info = FunctionRegistry::instance().get(x.fn.name);
          bool any_array = false;
          for (const auto& c : x.inputs) {
            require_column(out, c, "derive");
            any_array |= out.is_array(c);
            if (info.shape == FnShape::kArray && !out.is_array(c))
              throw SchemaError("function " + x.fn.name + " expects an array column, got '" + c + "'");
            if (info.shape == FnShape::kElement && !x.fn.map && out.is_array(c))
              throw SchemaError("function " + x.fn.name + " applied to array column '" + c + "' without arrayMap");
          }
          if (x.fn.map && !any_array) throw SchemaError("arrayMap(" + x.fn.name + ") over no array column");
          out.erase(x.output);
          (fn_returns_array(x.fn) ? out.arrays : out.scalars).insert(x.output);
          return out;
        } else {
          const Schema& in = env.schema(x.input);
          Schema out;
          for (const auto& g : x.group_by) {
            require_column(in, g, "group by");
            (in.is_array(g) ? out.arrays : out.scalars).insert(g);
          }
          for (const auto& a : x.aggs) {
            std::string name = agg_name(a.fn);
            if (a.inputs.size() > 1 || (a.inputs.empty() && a.fn != AggFn::kCount))
              throw SchemaError("aggregate " + name + " expects one input column");
            bool array_in = false;
            for (const auto& c : a.inputs) {
              require_column(in, c, "aggregate");
              array_in = in.is_array(c);
            }
            bool wants_array = a.for_each || a.fn == AggFn::kDistinctMerge;
            if (a.for_each && !supports_for_each(a.fn)) throw SchemaError(name + "ForEach is not supported");
            if (!a.inputs.empty() && array_in != wants_array)
              throw SchemaError("aggregate " + name + (a.for_each ? "ForEach" : "") + " over " +
                                (array_in ? "array" : "scalar") + " column '" + a.inputs[0] + "'");
            if (out.has(a.alias)) throw SchemaError("duplicate output column '" + a.alias + "' in aggregate");
            bool array_out = a.for_each || a.fn == AggFn::kDistinct || a.fn == AggFn::kDistinctMerge;
            (array_out ? out.arrays : out.scalars).insert(a.alias);
          }
          return out;
        }
      },
      t->node);
}

}  // namespace

const Schema& TypeEnv::schema(const TermPtr& t) {
  auto it = cache_.find(t.get());
  if (it != cache_.end()) return it->second.second;
  Schema s = compute(t, *this);
  return cache_.emplace(t.get(), std::make_pair(t, std::move(s))).first->second.second;
}

Schema output_schema(const TermPtr& t, const Catalog& catalog) {
  TypeEnv env(catalog);
  return env.schema(t);
}

}  // namespace a3d
