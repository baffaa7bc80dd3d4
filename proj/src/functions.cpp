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

#include "a3d/functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "a3d/errors.hpp"

namespace a3d {

namespace {

[[noreturn]] void type_error(const std::string& fn, const Scalar& v) {
  throw EvalError("function " + fn + " cannot take argument " + to_string(v));
}

Scalar arith(const std::string& fn, const Scalar& a, const Scalar& b, char op) {
  if (is_null(a) || is_null(b)) return Null{};
  if (!is_numeric(a)) type_error(fn, a);
  if (!is_numeric(b)) type_error(fn, b);
  if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b)) {
    auto x = static_cast<uint64_t>(std::get<int64_t>(a));
    auto y = static_cast<uint64_t>(std::get<int64_t>(b));
    switch (op) {
      case '+':
        return static_cast<int64_t>(x + y);
      case '-':
        return static_cast<int64_t>(x - y);
      default:
        return static_cast<int64_t>(x * y);
    }
  }
  double x = *to_double(a), y = *to_double(b);
  switch (op) {
    case '+':
      return x + y;
    case '-':
      return x - y;
    default:
      return x * y;
  }
}

const Scalar& scalar_arg(std::span<const Value> args, size_t i) { return as_scalar(args[i]); }

ScalarFnInfo element(std::string name, int arity, int num_params,
                     std::function<Scalar(std::span<const Scalar>, std::span<const Scalar>)> f) {
  ScalarFnInfo info;
  info.name = name;
  info.arity = arity;
  info.num_params = num_params;
  info.eval = [f = std::move(f)](std::span<const Value> args, std::span<const Scalar> params) -> Value {
    std::vector<Scalar> scalars;
    scalars.reserve(args.size());
    for (size_t i = 0; i < args.size(); ++i) scalars.push_back(scalar_arg(args, i));
    return f(scalars, params);
  };
  return info;
}

ScalarFnInfo array_fn(std::string name, bool returns_array, std::function<Value(const Array&)> f) {
  ScalarFnInfo info;
  info.name = name;
  info.shape = FnShape::kArray;
  info.arity = 1;
  info.returns_array = returns_array;
  info.eval = [f = std::move(f)](std::span<const Value> args, std::span<const Scalar>) -> Value {
    return f(as_array(args[0]));
  };
  return info;
}

Value fold(AggFn fn, const Array& arr) {
  std::vector<Value> values(arr.begin(), arr.end());
  return aggregate(fn, values);
}

}  // namespace

FunctionRegistry& FunctionRegistry::instance() {
  static FunctionRegistry registry;
  return registry;
}

FunctionRegistry::FunctionRegistry() {
  auto put = [this](ScalarFnInfo info) { fns_[info.name] = std::move(info); };
  put(element("id", 1, 0, [](auto a, auto) { return a[0]; }));
  put(element("neg", 1, 0, [](auto a, auto) { return arith("neg", Scalar{int64_t{0}}, a[0], '-'); }));
  put(element("double", 1, 0, [](auto a, auto) { return arith("double", Scalar{int64_t{2}}, a[0], '*'); }));
  put(element("affine", 1, 2, [](auto a, auto p) {
    return arith("affine", arith("affine", p[0], a[0], '*'), p[1], '+');
  }));
  put(element("abs", 1, 0, [](auto a, auto) -> Scalar {
    if (is_null(a[0])) return Null{};
    if (const auto* i = std::get_if<int64_t>(&a[0])) return *i < 0 ? -*i : *i;
    if (const auto* d = std::get_if<double>(&a[0])) return std::fabs(*d);
    type_error("abs", a[0]);
  }));
  put(element("add", 2, 0, [](auto a, auto) { return arith("add", a[0], a[1], '+'); }));
  put(element("sub", 2, 0, [](auto a, auto) { return arith("sub", a[0], a[1], '-'); }));
  put(element("mul", 2, 0, [](auto a, auto) { return arith("mul", a[0], a[1], '*'); }));
  put(element("div", 2, 0, [](auto a, auto) -> Scalar {
    if (is_null(a[0]) || is_null(a[1])) return Null{};
    auto x = to_double(a[0]), y = to_double(a[1]);
    if (!x) type_error("div", a[0]);
    if (!y) type_error("div", a[1]);
    if (*y == 0.0) return Null{};
    return *x / *y;
  }));
  put(element("cast_float", 1, 0, [](auto a, auto) -> Scalar {
    if (is_null(a[0])) return Null{};
    auto x = to_double(a[0]);
    if (!x) type_error("cast_float", a[0]);
    return *x;
  }));
  put(element("strlen", 1, 0, [](auto a, auto) -> Scalar {
    if (is_null(a[0])) return Null{};
    const auto* s = std::get_if<std::string>(&a[0]);
    if (!s) type_error("strlen", a[0]);
    int64_t n = 0;
    for (unsigned char c : *s)
      if ((c & 0xC0) != 0x80) ++n;
    return n;
  }));
  put(element("concat", 2, 0, [](auto a, auto) -> Scalar {
    if (is_null(a[0]) || is_null(a[1])) return Null{};
    const auto* x = std::get_if<std::string>(&a[0]);
    const auto* y = std::get_if<std::string>(&a[1]);
    if (!x) type_error("concat", a[0]);
    if (!y) type_error("concat", a[1]);
    return *x + *y;
  }));
  put(array_fn("length", false, [](const Array& a) -> Value { return Scalar{static_cast<int64_t>(a.size())}; }));
  put(array_fn("arrayEnumerate", true, [](const Array& a) -> Value {
    Array out;
    for (size_t i = 0; i < a.size(); ++i) out.emplace_back(static_cast<int64_t>(i + 1));
    return out;
  }));
  put(array_fn("arraySum", false, [](const Array& a) { return fold(AggFn::kSum, a); }));
  put(array_fn("arrayMin", false, [](const Array& a) { return fold(AggFn::kMin, a); }));
  put(array_fn("arrayMax", false, [](const Array& a) { return fold(AggFn::kMax, a); }));
}

void FunctionRegistry::add(ScalarFnInfo info) {
  std::lock_guard lock(mu_);
  fns_[info.name] = std::move(info);
}

const ScalarFnInfo* FunctionRegistry::find(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = fns_.find(name);
  return it == fns_.end() ? nullptr : &it->second;
}

const ScalarFnInfo& FunctionRegistry::get(const std::string& name) const {
  const auto* info = find(name);
  if (!info) throw SchemaError("unknown function '" + name + "'");
  return *info;
}

void check_fn(const FnRef& fn, size_t num_args) {
  const auto& info = FunctionRegistry::instance().get(fn.name);
  if (info.arity != static_cast<int>(num_args))
    throw SchemaError("function " + fn.name + " expects " + std::to_string(info.arity) + " argument(s), got " +
                      std::to_string(num_args));
  if (info.num_params != static_cast<int>(fn.params.size()))
    throw SchemaError("function " + fn.name + " expects " + std::to_string(info.num_params) + " parameter(s)");
  if (fn.map && info.shape != FnShape::kElement)
    throw SchemaError("function " + fn.name + " cannot be lifted with arrayMap");
}

bool fn_returns_array(const FnRef& fn) {
  return fn.map || FunctionRegistry::instance().get(fn.name).returns_array;
}

Value apply_fn(const FnRef& fn, std::span<const Value> args) {
  const auto& info = FunctionRegistry::instance().get(fn.name);
  if (!fn.map) {
    if (info.shape == FnShape::kElement)
      for (const auto& a : args)
        if (is_array(a)) throw EvalError("function " + fn.name + " applied to an array; use arrayMap");
    return info.eval(args, fn.params);
  }
  std::optional<size_t> len;
  for (const auto& a : args) {
    if (!is_array(a)) continue;
    size_t n = std::get<Array>(a).size();
    if (len && *len != n) throw EvalError("arrayMap(" + fn.name + ") over arrays of unequal length");
    len = n;
  }
  if (!len) throw EvalError("arrayMap(" + fn.name + ") needs at least one array argument");
  Array out;
  out.reserve(*len);
  std::vector<Value> elems(args.size());
  for (size_t j = 0; j < *len; ++j) {
    for (size_t i = 0; i < args.size(); ++i)
      elems[i] = is_array(args[i]) ? Value{std::get<Array>(args[i])[j]} : args[i];
    out.push_back(as_scalar(info.eval(elems, fn.params)));
  }
  return out;
}

std::optional<AffineForm> affine_form(const FnRef& fn) {
  if (fn.map) return std::nullopt;
  if (fn.name == "id") return AffineForm{int64_t{1}, int64_t{0}};
  if (fn.name == "neg") return AffineForm{int64_t{-1}, int64_t{0}};
  if (fn.name == "double") return AffineForm{int64_t{2}, int64_t{0}};
  if (fn.name == "cast_float") return AffineForm{1.0, 0.0};
  if (fn.name == "affine" && fn.params.size() == 2) {
    auto a = to_double(fn.params[0]);
    if (!a || *a == 0.0 || !to_double(fn.params[1])) return std::nullopt;
    return AffineForm{fn.params[0], fn.params[1]};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::string agg_name(AggFn fn) {
  switch (fn) {
    case AggFn::kMin:
      return "min";
    case AggFn::kMax:
      return "max";
    case AggFn::kCount:
      return "count";
    case AggFn::kSum:
      return "sum";
    case AggFn::kAvg:
      return "avg";
    case AggFn::kDistinct:
      return "distinct";
    case AggFn::kDistinctMerge:
      return "distinctMerge";
  }
  return "?";
}

AggFn parse_agg(const std::string& name) {
  for (auto fn : {AggFn::kMin, AggFn::kMax, AggFn::kCount, AggFn::kSum, AggFn::kAvg, AggFn::kDistinct,
                  AggFn::kDistinctMerge})
    if (agg_name(fn) == name) return fn;
  throw SchemaError("unknown aggregate function '" + name + "'");
}

AggDecomposition decompose(AggFn fn) {
  switch (fn) {
    case AggFn::kMin:
      return {{AggFn::kMin}, {AggFn::kMin}};
    case AggFn::kMax:
      return {{AggFn::kMax}, {AggFn::kMax}};
    case AggFn::kCount:
      return {{AggFn::kCount}, {AggFn::kSum}};
    case AggFn::kSum:
      return {{AggFn::kSum}, {AggFn::kSum}};
    case AggFn::kAvg:
      return {{AggFn::kSum, AggFn::kCount}, {AggFn::kSum, AggFn::kSum}};
    case AggFn::kDistinct:
    case AggFn::kDistinctMerge:
      return {{fn}, {AggFn::kDistinctMerge}};
  }
  return {};
}

namespace {

Array sorted_unique(Array items) {
  std::sort(items.begin(), items.end(), [](const Scalar& a, const Scalar& b) { return total_order(a, b) < 0; });
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

bool numeric_less(const Scalar& a, const Scalar& b) {
  auto c = compare_sql(a, b);
  return c && *c < 0;
}

}  // namespace

Value aggregate(AggFn fn, std::span<const Value> values) {
  switch (fn) {
    case AggFn::kCount: {
      int64_t n = 0;
      for (const auto& v : values)
        if (is_array(v) || !is_null(std::get<Scalar>(v))) ++n;
      return Scalar{n};
    }
    case AggFn::kSum:
    case AggFn::kAvg: {
      bool any = false, floating = false;
      int64_t isum = 0;
      double dsum = 0;
      int64_t n = 0;
      for (const auto& v : values) {
        const auto& s = as_scalar(v);
        if (is_null(s)) continue;
        if (!is_numeric(s)) throw EvalError(agg_name(fn) + " over non-numeric value " + to_string(s));
        any = true;
        ++n;
        if (const auto* i = std::get_if<int64_t>(&s)) {
          isum = static_cast<int64_t>(static_cast<uint64_t>(isum) + static_cast<uint64_t>(*i));
          dsum += static_cast<double>(*i);
        } else {
          floating = true;
          dsum += std::get<double>(s);
        }
      }
      if (!any) return Scalar{Null{}};
      if (fn == AggFn::kAvg) return Scalar{(floating ? dsum : static_cast<double>(isum)) / static_cast<double>(n)};
      if (floating) return Scalar{dsum};
      return Scalar{isum};
    }
    case AggFn::kMin:
    case AggFn::kMax: {
      std::optional<Scalar> best;
      for (const auto& v : values) {
        const auto& s = as_scalar(v);
        if (is_null(s)) continue;
        if (!best || (fn == AggFn::kMin ? numeric_less(s, *best) : numeric_less(*best, s))) best = s;
      }
      return best ? Value{*best} : Value{Scalar{Null{}}};
    }
    case AggFn::kDistinct: {
      Array items;
      for (const auto& v : values) {
        const auto& s = as_scalar(v);
        if (!is_null(s)) items.push_back(s);
      }
      return sorted_unique(std::move(items));
    }
    case AggFn::kDistinctMerge: {
      Array items;
      for (const auto& v : values) {
        if (!is_array(v)) {
          if (is_null(std::get<Scalar>(v))) continue;
          throw EvalError("distinctMerge expects arrays");
        }
        for (const auto& e : std::get<Array>(v))
          if (!is_null(e)) items.push_back(e);
      }
      return sorted_unique(std::move(items));
    }
  }
  return Scalar{Null{}};
}

bool supports_for_each(AggFn fn) {
  return fn == AggFn::kMin || fn == AggFn::kMax || fn == AggFn::kCount || fn == AggFn::kSum;
}

Value aggregate_for_each(AggFn fn, std::span<const Value> arrays) {
  if (!supports_for_each(fn)) throw EvalError(agg_name(fn) + "ForEach is not supported");
  size_t len = 0;
  for (const auto& a : arrays) len = std::max(len, as_array(a).size());
  Array out;
  out.reserve(len);
  std::vector<Value> column;
  for (size_t j = 0; j < len; ++j) {
    column.clear();
    for (const auto& a : arrays) {
      const auto& arr = std::get<Array>(a);
      if (j < arr.size()) column.emplace_back(arr[j]);
    }
    out.push_back(as_scalar(aggregate(fn, column)));
  }
  return out;
}

std::string array_fold_fn(AggFn fn) {
  switch (fn) {
    case AggFn::kMin:
      return "arrayMin";
    case AggFn::kMax:
      return "arrayMax";
    case AggFn::kCount:
    case AggFn::kSum:
      return "arraySum";
    default:
      throw SchemaError("no array fold for " + agg_name(fn));
  }
}

}  // namespace a3d
