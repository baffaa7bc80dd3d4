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
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "a3d/functions.hpp"
#include "a3d/value.hpp"

namespace a3d {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ColRef {
  std::string name;
};
struct Literal {
  Scalar value;
};
struct Apply {
  FnRef fn;
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<ColRef, Literal, Apply> node;
};

ExprPtr col(std::string name);
ExprPtr lit(Scalar value);
ExprPtr apply(FnRef fn, std::vector<ExprPtr> args);

enum class CmpOp { kEq, kNe, kLt, kLe, kGt, kGe };

std::string cmp_symbol(CmpOp op);
CmpOp parse_cmp(const std::string& symbol);
/// a op b  <=>  b flip(op) a
CmpOp flip(CmpOp op);
CmpOp negate(CmpOp op);

struct Predicate;
using PredPtr = std::shared_ptr<const Predicate>;

struct ConstPred {
  bool value;
};
struct Compare {
  CmpOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct AndPred {
  std::vector<PredPtr> parts;
};
struct OrPred {
  std::vector<PredPtr> parts;
};
struct NotPred {
  PredPtr inner;
};

struct Predicate {
  std::variant<ConstPred, Compare, AndPred, OrPred, NotPred> node;
};

PredPtr p_const(bool value);
PredPtr p_cmp(CmpOp op, ExprPtr lhs, ExprPtr rhs);
PredPtr p_and(std::vector<PredPtr> parts);
PredPtr p_or(std::vector<PredPtr> parts);
PredPtr p_not(PredPtr inner);

/// Shorthand for `column op literal`.
PredPtr p_cmp(CmpOp op, const std::string& column, Scalar value);

bool same_expr(const ExprPtr& a, const ExprPtr& b);
bool same_pred(const PredPtr& a, const PredPtr& b);

Value eval_expr(const ExprPtr& e, const Tuple& t);

/// Three-valued evaluation; nullopt is unknown.
std::optional<bool> eval_pred3(const PredPtr& p, const Tuple& t);

/// True iff the predicate evaluates to true (unknown counts as false).
bool eval_pred(const PredPtr& p, const Tuple& t);

std::set<std::string> columns_of(const ExprPtr& e);
std::set<std::string> columns_of(const PredPtr& p);

/// Flattens top-level conjunctions. A constant true yields no conjuncts.
std::vector<PredPtr> split_conjuncts(const PredPtr& p);

/// Inverse of split_conjuncts; an empty list is `true`.
PredPtr conjoin(const std::vector<PredPtr>& parts);

/// Replaces column references by expressions.
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& subst);
PredPtr substitute(const PredPtr& p, const std::map<std::string, ExprPtr>& subst);
PredPtr rename_columns(const PredPtr& p, const std::map<std::string, std::string>& renames);

std::string to_string(const ExprPtr& e);
std::string to_string(const PredPtr& p);

struct InversionResult {
  PredPtr original;
  PredPtr inverted;
  Scalar constant;  // f'(v) of the first rewritten comparison
};

/// Rewrites `p`, a comparison `y op v` with v constant, given y = f(x),
/// into an equivalent comparison on x. Returns nullopt when f is not in the
/// invertible catalog or p does not have that shape.
std::optional<InversionResult> invert(const PredPtr& p, const std::string& y, const FnRef& f,
                                      const std::string& x);

/// Like invert, but accepts any boolean combination of such comparisons
/// (and parts that do not mention y at all).
std::optional<PredPtr> invert_all(const PredPtr& p, const std::string& y, const FnRef& f, const std::string& x);

}  // namespace a3d
