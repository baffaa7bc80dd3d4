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

#include "naive.hpp"

#include <algorithm>
#include <stdexcept>

#include "a3d/errors.hpp"

namespace a3d::testing {

namespace {

Value naive_expr(const ExprPtr& e, const Tuple& t) {
  if (auto c = std::get_if<ColRef>(&e->node)) {
    if (!t.count(c->name)) throw EvalError("unbound " + c->name);
    return t.at(c->name);
  }
  if (auto l = std::get_if<Literal>(&e->node)) return l->value;
  auto& a = std::get<Apply>(e->node);
  std::vector<Value> args;
  for (auto& x : a.args) args.push_back(naive_expr(x, t));
  return apply_fn(a.fn, args);
}

// -1, 0, 1 or nullopt for unknown.
std::optional<int> naive_cmp(const Scalar& a, const Scalar& b) {
  if (a.index() == 0 || b.index() == 0) return std::nullopt;
  bool an = a.index() == 2 || a.index() == 3;
  bool bn = b.index() == 2 || b.index() == 3;
  if (an && bn) {
    if (a.index() == 2 && b.index() == 2) {
      int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    double x = a.index() == 2 ? double(std::get<int64_t>(a)) : std::get<double>(a);
    double y = b.index() == 2 ? double(std::get<int64_t>(b)) : std::get<double>(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.index() != b.index()) throw SchemaError("incomparable");
  if (a.index() == 1) return int(std::get<bool>(a)) - int(std::get<bool>(b));
  int c = std::get<std::string>(a).compare(std::get<std::string>(b));
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int kleene_and(int a, int b) { return std::min(a, b); }  // 0 false, 1 unknown, 2 true
int kleene_or(int a, int b) { return std::max(a, b); }

int tri(const PredPtr& p, const Tuple& t) {
  if (auto c = std::get_if<ConstPred>(&p->node)) return c->value ? 2 : 0;
  if (auto n = std::get_if<NotPred>(&p->node)) return 2 - tri(n->inner, t);
  if (auto a = std::get_if<AndPred>(&p->node)) {
    int r = 2;
    for (auto& x : a->parts) r = kleene_and(r, tri(x, t));
    return r;
  }
  if (auto o = std::get_if<OrPred>(&p->node)) {
    int r = 0;
    for (auto& x : o->parts) r = kleene_or(r, tri(x, t));
    return r;
  }
  auto& c = std::get<Compare>(p->node);
  Value l = naive_expr(c.lhs, t), r = naive_expr(c.rhs, t);
  if (l.index() != 0 || r.index() != 0) throw EvalError("array comparison");
  auto k = naive_cmp(std::get<Scalar>(l), std::get<Scalar>(r));
  if (!k) return 1;
  bool v = false;
  switch (c.op) {
    case CmpOp::kEq: v = *k == 0; break;
    case CmpOp::kNe: v = *k != 0; break;
    case CmpOp::kLt: v = *k < 0; break;
    case CmpOp::kLe: v = *k <= 0; break;
    case CmpOp::kGt: v = *k > 0; break;
    case CmpOp::kGe: v = *k >= 0; break;
  }
  return v ? 2 : 0;
}

bool same_value(const Value& a, const Value& b) { return total_order(a, b) == 0; }

Scalar plain(AggFn fn, const std::vector<Scalar>& xs) {
  std::vector<Scalar> v;
  for (auto& x : xs)
    if (x.index() != 0) v.push_back(x);
  if (fn == AggFn::kCount) return int64_t(v.size());
  if (v.empty()) return Null{};
  if (fn == AggFn::kMin || fn == AggFn::kMax) {
    Scalar best = v[0];
    for (auto& x : v) {
      int c = *naive_cmp(x, best);
      if ((fn == AggFn::kMin && c < 0) || (fn == AggFn::kMax && c > 0)) best = x;
    }
    return best;
  }
  bool all_int = std::all_of(v.begin(), v.end(), [](const Scalar& x) { return x.index() == 2; });
  if (fn == AggFn::kSum && all_int) {
    uint64_t s = 0;
    for (auto& x : v) s += uint64_t(std::get<int64_t>(x));
    return int64_t(s);
  }
  double s = 0;
  for (auto& x : v) s += x.index() == 2 ? double(std::get<int64_t>(x)) : std::get<double>(x);
  if (fn == AggFn::kSum) return s;
  if (fn == AggFn::kAvg) {
    if (all_int) {
      uint64_t si = 0;
      for (auto& x : v) si += uint64_t(std::get<int64_t>(x));
      return double(int64_t(si)) / double(v.size());
    }
    return s / double(v.size());
  }
  throw std::logic_error("plain aggregate");
}

}  // namespace

std::optional<bool> naive_pred(const PredPtr& p, const Tuple& t) {
  int r = tri(p, t);
  if (r == 1) return std::nullopt;
  return r == 2;
}

Value naive_aggregate(AggFn fn, bool for_each, const std::vector<Value>& values) {
  if (for_each) {
    size_t n = 0;
    for (auto& v : values) n = std::max(n, std::get<Array>(v).size());
    Array out;
    for (size_t j = 0; j < n; ++j) {
      std::vector<Scalar> col;
      for (auto& v : values)
        if (j < std::get<Array>(v).size()) col.push_back(std::get<Array>(v)[j]);
      out.push_back(plain(fn, col));
    }
    return out;
  }
  if (fn == AggFn::kDistinct || fn == AggFn::kDistinctMerge) {
    Array all;
    for (auto& v : values) {
      if (fn == AggFn::kDistinct) {
        all.push_back(std::get<Scalar>(v));
      } else if (v.index() == 1) {
        for (auto& e : std::get<Array>(v)) all.push_back(e);
      }
    }
    Array out;
    for (auto& x : all) {
      if (x.index() == 0) continue;
      bool seen = false;
      for (auto& y : out) seen |= total_order(x, y) == 0;
      if (!seen) out.push_back(x);
    }
    std::sort(out.begin(), out.end(), [](const Scalar& a, const Scalar& b) { return total_order(a, b) < 0; });
    return out;
  }
  std::vector<Scalar> col;
  for (auto& v : values) col.push_back(std::get<Scalar>(v));
  return plain(fn, col);
}

Relation naive_eval(const TermPtr& t, const Database& db) {
  Relation out;
  out.schema = output_schema(t, catalog_of(db));
  if (auto r = t->as<RelVar>()) {
    out.rows = db.at(r->name).rows;
  } else if (auto j = t->as<Join>()) {
    Relation l = naive_eval(j->left, db), r = naive_eval(j->right, db);
    for (auto& a : l.rows)
      for (auto& b : r.rows) {
        bool ok = true;
        for (auto& [c, v] : a)
          if (b.count(c) && !same_value(v, b.at(c))) ok = false;
        if (!ok) continue;
        Tuple m = a;
        for (auto& [c, v] : b) m[c] = v;
        out.rows.push_back(m);
      }
  } else if (auto f = t->as<Filter>()) {
    for (auto& row : naive_eval(f->input, db).rows)
      if (naive_pred(f->pred, row) == std::optional<bool>(true)) out.rows.push_back(row);
  } else if (auto p = t->as<Project>()) {
    for (auto& row : naive_eval(p->input, db).rows) {
      Tuple m;
      for (auto& c : p->columns) m[c] = row.at(c);
      out.rows.push_back(m);
    }
  } else if (auto af = t->as<ArrayFilter>()) {
    for (auto& row : naive_eval(af->input, db).rows) {
      size_t n = std::get<Array>(row.at(af->targets[0].source)).size();
      for (auto& tg : af->targets)
        if (std::get<Array>(row.at(tg.source)).size() != n) throw EvalError("length mismatch");
      std::vector<Array> arrays;
      for (auto& tg : af->targets) arrays.push_back(std::get<Array>(row.at(tg.source)));
      std::vector<Array> kept(arrays.size());
      for (size_t i = 0; i < n; ++i) {
        Tuple e;
        for (size_t k = 0; k < arrays.size(); ++k) e[af->targets[k].alias] = arrays[k][i];
        if (naive_pred(af->pred, e) != std::optional<bool>(true)) continue;
        for (size_t k = 0; k < arrays.size(); ++k) kept[k].push_back(arrays[k][i]);
      }
      Tuple m;
      for (auto& [c, v] : row) {
        bool drop = false;
        for (auto& tg : af->targets) drop |= c == tg.source || c == tg.alias;
        if (!drop) m[c] = v;
      }
      for (size_t k = 0; k < arrays.size(); ++k) m[af->targets[k].alias] = kept[k];
      out.rows.push_back(m);
    }
  } else if (auto aj = t->as<ArrayJoin>()) {
    for (auto& row : naive_eval(aj->input, db).rows) {
      size_t n = std::get<Array>(row.at(aj->targets[0].source)).size();
      for (auto& tg : aj->targets)
        if (std::get<Array>(row.at(tg.source)).size() != n) throw EvalError("length mismatch");
      for (size_t i = 0; i < n; ++i) {
        Tuple m;
        for (auto& [c, v] : row) {
          bool drop = false;
          for (auto& tg : aj->targets) drop |= c == tg.source || c == tg.alias;
          if (!drop) m[c] = v;
        }
        for (auto& tg : aj->targets) m[tg.alias] = std::get<Array>(row.at(tg.source))[i];
        out.rows.push_back(m);
      }
    }
  } else if (auto d = t->as<Derive>()) {
    for (auto row : naive_eval(d->input, db).rows) {
      std::vector<Value> args;
      for (auto& c : d->inputs) args.push_back(row.at(c));
      row[d->output] = apply_fn(d->fn, args);
      out.rows.push_back(row);
    }
  } else {
    auto& g = *t->as<Aggregate>();
    Relation in = naive_eval(g.input, db);
    std::vector<Tuple> keys;
    std::vector<std::vector<const Tuple*>> members;
    for (auto& row : in.rows) {
      Tuple k;
      for (auto& c : g.group_by) k[c] = row.at(c);
      size_t i = 0;
      for (; i < keys.size(); ++i) {
        bool eq = true;
        for (auto& [c, v] : k) eq &= same_value(v, keys[i].at(c));
        if (eq) break;
      }
      if (i == keys.size()) {
        keys.push_back(k);
        members.emplace_back();
      }
      members[i].push_back(&row);
    }
    for (size_t i = 0; i < keys.size(); ++i) {
      Tuple m = keys[i];
      for (auto& a : g.aggs) {
        std::vector<Value> vals;
        for (auto* row : members[i]) vals.push_back(a.inputs.empty() ? Value{Scalar{int64_t{1}}} : row->at(a.inputs[0]));
        m[a.alias] = naive_aggregate(a.fn, a.for_each, vals);
      }
      out.rows.push_back(m);
    }
  }
  return out;
}

}  // namespace a3d::testing
