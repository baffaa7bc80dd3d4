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
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "a3d/value.hpp"

namespace a3d {

/// Reference to a scalar function, possibly with bound constant parameters
/// (e.g. affine(-1, 3) is x -> 3 - x). With `map` set the function is
/// lifted element-wise over array arguments (arrayMap).
struct FnRef {
  std::string name;
  std::vector<Scalar> params;
  bool map = false;

  friend bool operator==(const FnRef&, const FnRef&) = default;
};

enum class FnShape {
  kElement,  // scalars in, scalar out; liftable with arrayMap
  kArray,    // consumes arrays natively (length, arrayEnumerate, arraySum...)
};

struct ScalarFnInfo {
  std::string name;
  FnShape shape = FnShape::kElement;
  int arity = 1;
  int num_params = 0;
  bool returns_array = false;
  std::function<Value(std::span<const Value> args, std::span<const Scalar> params)> eval;
};

/// Name-keyed catalog of scalar functions. The built-in catalog covers
/// arithmetic, affine maps, casts, string length/concat, and the array
/// helpers the rewrite rules introduce. Additional functions can be
/// registered at startup.
class FunctionRegistry {
 public:
  static FunctionRegistry& instance();

  void add(ScalarFnInfo info);
  const ScalarFnInfo* find(const std::string& name) const;
  const ScalarFnInfo& get(const std::string& name) const;

 private:
  FunctionRegistry();
  mutable std::mutex mu_;
  std::map<std::string, ScalarFnInfo> fns_;
};

/// Applies `fn` to `args`, handling the arrayMap lifting.
Value apply_fn(const FnRef& fn, std::span<const Value> args);

/// True if applying `fn` yields an array.
bool fn_returns_array(const FnRef& fn);

/// Checks arity/parameter count; throws SchemaError.
void check_fn(const FnRef& fn, size_t num_args);

/// For unary functions of the invertible catalog, returns (a, b) such that
/// f(x) = a*x + b with a != 0. Monotone casts report (1, 0).
struct AffineForm {
  Scalar scale;
  Scalar offset;
};
std::optional<AffineForm> affine_form(const FnRef& fn);

// ---------------------------------------------------------------------------
// Aggregate functions

enum class AggFn { kMin, kMax, kCount, kSum, kAvg, kDistinct, kDistinctMerge };

std::string agg_name(AggFn fn);
AggFn parse_agg(const std::string& name);

/// Initial / final decomposition of a distributive aggregate. avg produces
/// two initial columns (sum, count) finalized by (sum, sum) and a division.
struct AggDecomposition {
  std::vector<AggFn> initial;
  std::vector<AggFn> final;
};
AggDecomposition decompose(AggFn fn);

/// Aggregates a group. Nulls are skipped; `count` over an empty input is 0,
/// every other function yields null. `values` holds the input column of each
/// row of the group (for count(*) callers pass one non-null per row).
Value aggregate(AggFn fn, std::span<const Value> values);

/// Position-wise aggregate over arrays (the ForEach combinator). Arrays of
/// unequal length are allowed; position j aggregates the arrays that have
/// a j-th element. Only min/max/count/sum are supported.
Value aggregate_for_each(AggFn fn, std::span<const Value> arrays);

bool supports_for_each(AggFn fn);

/// Function name that folds an array produced by aggForEach into the final
/// scalar (arraySum for sum/count, arrayMin, arrayMax).
std::string array_fold_fn(AggFn fn);

}  // namespace a3d
