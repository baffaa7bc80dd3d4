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

#include "a3d/predicate.hpp"

#include <sstream>

#include "a3d/errors.hpp"

namespace a3d {

ExprPtr col(std::string name) { return std::make_shared<Expr>(Expr{ColRef{std::move(name)}}); }
ExprPtr lit(Scalar value) { return std::make_shared<Expr>(Expr{Literal{std::move(value)}}); }
ExprPtr apply(FnRef fn, std::vector<ExprPtr> args) {
  return std::make_shared<Expr>(Expr{Apply{std::move(fn), std::move(args)}});
}

std::string cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::kEq:
      return "=";
    case CmpOp::kNe:
      return "!=";
    case CmpOp::kLt:
      return "<";
    case CmpOp::kLe:
      return "<=";
    case CmpOp::kGt:
      return ">";
    case CmpOp::kGe:
      return ">=";
  }
  return "?";
}

CmpOp parse_cmp(const std::string& s) {
  if (s == "=" || s == "==") return CmpOp::kEq;
  if (s == "!=" || s == "<>") return CmpOp::kNe;
  if (s == "<") return CmpOp::kLt;
  if (s == "<=") return CmpOp::kLe;
  if (s == ">") return CmpOp::kGt;
  if (s == ">=") return CmpOp::kGe;
  throw ParseError("unknown comparison operator '" + s + "'");
}

CmpOp flip(CmpOp op) {
  switch (op) {
    case CmpOp::kLt:
      return CmpOp::kGt;
    case CmpOp::kLe:
      return CmpOp::kGe;
    case CmpOp::kGt:
      return CmpOp::kLt;
    case CmpOp::kGe:
      return CmpOp::kLe;
    default:
      return op;
  }
}

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::kEq:
      return CmpOp::kNe;
    case CmpOp::kNe:
      return CmpOp::kEq;
    case CmpOp::kLt:
      return CmpOp::kGe;
    case CmpOp::kLe:
      return CmpOp::kGt;
    case CmpOp::kGt:
      return CmpOp::kLe;
    case CmpOp::kGe:
      return CmpOp::kLt;
  }
  return op;
}

PredPtr p_const(bool value) { return std::make_shared<Predicate>(Predicate{ConstPred{value}}); }
PredPtr p_cmp(CmpOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<Predicate>(Predicate{Compare{op, std::move(lhs), std::move(rhs)}});
}
PredPtr p_cmp(CmpOp op, const std::string& column, Scalar value) { return p_cmp(op, col(column), lit(std::move(value))); }
PredPtr p_and(std::vector<PredPtr> parts) { return std::make_shared<Predicate>(Predicate{AndPred{std::move(parts)}}); }
PredPtr p_or(std::vector<PredPtr> parts) { return std::make_shared<Predicate>(Predicate{OrPred{std::move(parts)}}); }
PredPtr p_not(PredPtr inner) { return std::make_shared<Predicate>(Predicate{NotPred{std::move(inner)}}); }

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  if (const auto* c = std::get_if<ColRef>(&a->node)) return c->name == std::get<ColRef>(b->node).name;
  if (const auto* l = std::get_if<Literal>(&a->node)) return total_order(l->value, std::get<Literal>(b->node).value) == 0;
  const auto& x = std::get<Apply>(a->node);
  const auto& y = std::get<Apply>(b->node);
  if (!(x.fn == y.fn) || x.args.size() != y.args.size()) return false;
  for (size_t i = 0; i < x.args.size(); ++i)
    if (!same_expr(x.args[i], y.args[i])) return false;
  return true;
}

namespace {

bool same_parts(const std::vector<PredPtr>& a, const std::vector<PredPtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!same_pred(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool same_pred(const PredPtr& a, const PredPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, ConstPred>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return x.op == y.op && same_expr(x.lhs, y.lhs) && same_expr(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          return same_pred(x.inner, y.inner);
        } else {
          return same_parts(x.parts, y.parts);
        }
      },
      a->node);
}

Value eval_expr(const ExprPtr& e, const Tuple& t) {
  if (const auto* c = std::get_if<ColRef>(&e->node)) {
    auto it = t.find(c->name);
    if (it == t.end()) throw EvalError("unbound column '" + c->name + "'");
    return it->second;
  }
  if (const auto* l = std::get_if<Literal>(&e->node)) return l->value;
  const auto& a = std::get<Apply>(e->node);
  std::vector<Value> args;
  args.reserve(a.args.size());
  for (const auto& arg : a.args) args.push_back(eval_expr(arg, t));
  return apply_fn(a.fn, args);
}

namespace {

std::optional<bool> compare(CmpOp op, const Value& lhs, const Value& rhs) {
  if (is_array(lhs) || is_array(rhs)) throw EvalError("comparison over an array value");
  auto c = compare_sql(std::get<Scalar>(lhs), std::get<Scalar>(rhs));
  if (!c) return std::nullopt;
  switch (op) {
    case CmpOp::kEq:
      return *c == 0;
    case CmpOp::kNe:
      return *c != 0;
    case CmpOp::kLt:
      return *c < 0;
    case CmpOp::kLe:
      return *c <= 0;
    case CmpOp::kGt:
      return *c > 0;
    case CmpOp::kGe:
      return *c >= 0;
  }
  return std::nullopt;
}

}  // namespace

std::optional<bool> eval_pred3(const PredPtr& p, const Tuple& t) {
  return std::visit(
      [&](const auto& x) -> std::optional<bool> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstPred>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return compare(x.op, eval_expr(x.lhs, t), eval_expr(x.rhs, t));
        } else if constexpr (std::is_same_v<T, NotPred>) {
          auto v = eval_pred3(x.inner, t);
          if (!v) return std::nullopt;
          return !*v;
        } else if constexpr (std::is_same_v<T, AndPred>) {
          bool unknown = false;
          for (const auto& part : x.parts) {
            auto v = eval_pred3(part, t);
            if (!v)
              unknown = true;
            else if (!*v)
              return false;
          }
          if (unknown) return std::nullopt;
          return true;
        } else {
          bool unknown = false;
          for (const auto& part : x.parts) {
            auto v = eval_pred3(part, t);
            if (!v)
              unknown = true;
            else if (*v)
              return true;
          }
          if (unknown) return std::nullopt;
          return false;
        }
      },
      p->node);
}

bool eval_pred(const PredPtr& p, const Tuple& t) { return eval_pred3(p, t) == std::optional<bool>(true); }

namespace {

void collect(const ExprPtr& e, std::set<std::string>& out) {
  if (const auto* c = std::get_if<ColRef>(&e->node)) {
    out.insert(c->name);
  } else if (const auto* a = std::get_if<Apply>(&e->node)) {
    for (const auto& arg : a->args) collect(arg, out);
  }
}

void collect(const PredPtr& p, std::set<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Compare>) {
          collect(x.lhs, out);
          collect(x.rhs, out);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          collect(x.inner, out);
        } else if constexpr (std::is_same_v<T, AndPred> || std::is_same_v<T, OrPred>) {
          for (const auto& part : x.parts) collect(part, out);
        }
      },
      p->node);
}

void flatten(const PredPtr& p, std::vector<PredPtr>& out) {
  if (const auto* a = std::get_if<AndPred>(&p->node)) {
    for (const auto& part : a->parts) flatten(part, out);
  } else if (const auto* c = std::get_if<ConstPred>(&p->node); c && c->value) {
    // true contributes nothing
  } else {
    out.push_back(p);
  }
}

}  // namespace

std::set<std::string> columns_of(const ExprPtr& e) {
  std::set<std::string> out;
  collect(e, out);
  return out;
}

std::set<std::string> columns_of(const PredPtr& p) {
  std::set<std::string> out;
  collect(p, out);
  return out;
}

std::vector<PredPtr> split_conjuncts(const PredPtr& p) {
  std::vector<PredPtr> out;
  flatten(p, out);
  return out;
}

PredPtr conjoin(const std::vector<PredPtr>& parts) {
  if (parts.empty()) return p_const(true);
  if (parts.size() == 1) return parts[0];
  return p_and(parts);
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& subst) {
  if (const auto* c = std::get_if<ColRef>(&e->node)) {
    auto it = subst.find(c->name);
    return it == subst.end() ? e : it->second;
  }
  if (const auto* a = std::get_if<Apply>(&e->node)) {
    std::vector<ExprPtr> args;
    for (const auto& arg : a->args) args.push_back(substitute(arg, subst));
    return apply(a->fn, std::move(args));
  }
  return e;
}

PredPtr substitute(const PredPtr& p, const std::map<std::string, ExprPtr>& subst) {
  return std::visit(
      [&](const auto& x) -> PredPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstPred>) {
          return p;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return p_cmp(x.op, substitute(x.lhs, subst), substitute(x.rhs, subst));
        } else if constexpr (std::is_same_v<T, NotPred>) {
          return p_not(substitute(x.inner, subst));
        } else {
          std::vector<PredPtr> parts;
          for (const auto& part : x.parts) parts.push_back(substitute(part, subst));
          if constexpr (std::is_same_v<T, AndPred>)
            return p_and(std::move(parts));
          else
            return p_or(std::move(parts));
        }
      },
      p->node);
}

PredPtr rename_columns(const PredPtr& p, const std::map<std::string, std::string>& renames) {
  std::map<std::string, ExprPtr> subst;
  for (const auto& [from, to] : renames) subst[from] = col(to);
  return substitute(p, subst);
}

std::string to_string(const ExprPtr& e) {
  if (const auto* c = std::get_if<ColRef>(&e->node)) return c->name;
  if (const auto* l = std::get_if<Literal>(&e->node)) return to_string(l->value);
  const auto& a = std::get<Apply>(e->node);
  std::string out = a.fn.map ? "arrayMap(" + a.fn.name : a.fn.name;
  if (!a.fn.params.empty()) {
    out += "[";
    for (size_t i = 0; i < a.fn.params.size(); ++i) out += (i ? "," : "") + to_string(a.fn.params[i]);
    out += "]";
  }
  if (a.fn.map) out += ")";
  out += "(";
  for (size_t i = 0; i < a.args.size(); ++i) out += (i ? ", " : "") + to_string(a.args[i]);
  return out + ")";
}

std::string to_string(const PredPtr& p) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstPred>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Compare>) {
          return to_string(x.lhs) + " " + cmp_symbol(x.op) + " " + to_string(x.rhs);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          return "NOT (" + to_string(x.inner) + ")";
        } else {
          const char* sep = std::is_same_v<T, AndPred> ? " AND " : " OR ";
          std::string out = "(";
          for (size_t i = 0; i < x.parts.size(); ++i) out += (i ? sep : "") + to_string(x.parts[i]);
          return out + ")";
        }
      },
      p->node);
}

// ---------------------------------------------------------------------------
// Inversion

namespace {

bool is_int(const Scalar& s) { return std::holds_alternative<int64_t>(s); }

bool negative(const Scalar& s) { return *to_double(s) < 0; }

// (v - b) / a, exact in integers when possible.
Scalar solve(const Scalar& v, const AffineForm& f) {
  if (is_int(v) && is_int(f.scale) && is_int(f.offset)) {
    int64_t num = std::get<int64_t>(v) - std::get<int64_t>(f.offset);
    int64_t a = std::get<int64_t>(f.scale);
    if (num % a == 0) return num / a;
  }
  return (*to_double(v) - *to_double(f.offset)) / *to_double(f.scale);
}

}  // namespace

std::optional<InversionResult> invert(const PredPtr& p, const std::string& y, const FnRef& f,
                                      const std::string& x) {
  const auto* c = std::get_if<Compare>(&p->node);
  if (!c) return std::nullopt;
  auto form = affine_form(f);
  if (!form) return std::nullopt;
  CmpOp op = c->op;
  const Expr* column = c->lhs.get();
  const Expr* constant = c->rhs.get();
  if (!std::holds_alternative<ColRef>(column->node)) {
    std::swap(column, constant);
    op = flip(op);
  }
  const auto* ref = std::get_if<ColRef>(&column->node);
  const auto* value = std::get_if<Literal>(&constant->node);
  if (!ref || ref->name != y || !value || !is_numeric(value->value)) return std::nullopt;
  Scalar k = solve(value->value, *form);
  if (negative(form->scale)) op = flip(op);
  return InversionResult{p, p_cmp(op, col(x), lit(k)), k};
}

std::optional<PredPtr> invert_all(const PredPtr& p, const std::string& y, const FnRef& f, const std::string& x) {
  if (!columns_of(p).count(y)) return p;
  if (f.name == "id" && !f.map) return rename_columns(p, {{y, x}});
  if (std::holds_alternative<Compare>(p->node)) {
    auto r = invert(p, y, f, x);
    if (!r) return std::nullopt;
    return r->inverted;
  }
  if (const auto* n = std::get_if<NotPred>(&p->node)) {
    auto inner = invert_all(n->inner, y, f, x);
    if (!inner) return std::nullopt;
    return p_not(*inner);
  }
  const auto& parts = std::holds_alternative<AndPred>(p->node) ? std::get<AndPred>(p->node).parts
                                                                : std::get<OrPred>(p->node).parts;
  std::vector<PredPtr> out;
  for (const auto& part : parts) {
    auto r = invert_all(part, y, f, x);
    if (!r) return std::nullopt;
    out.push_back(*r);
  }
  if (std::holds_alternative<AndPred>(p->node)) return p_and(std::move(out));
  return p_or(std::move(out));
}

}  // namespace a3d
