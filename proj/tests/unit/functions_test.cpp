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

#include <gtest/gtest.h>

#include "a3d/errors.hpp"
#include "a3d/functions.hpp"
#include "a3d/testkit.hpp"
#include "naive.hpp"

namespace a3d {
namespace {

Value call(const FnRef& f, std::vector<Value> args) { return apply_fn(f, args); }

TEST(Functions, ScalarBuiltins) {
  EXPECT_EQ(call({"affine", {int64_t{-1}, int64_t{3}}, false}, {Scalar{int64_t{5}}}), Value{Scalar{int64_t{-2}}});
  EXPECT_EQ(call({"div", {}, false}, {Scalar{int64_t{1}}, Scalar{int64_t{0}}}), Value{Scalar{Null{}}});
  EXPECT_EQ(call({"strlen", {}, false}, {Scalar{"héllo"}}), Value{Scalar{int64_t{5}}});
  EXPECT_EQ(call({"neg", {}, false}, {Scalar{Null{}}}), Value{Scalar{Null{}}});
}

TEST(Functions, ArrayMapKeepsLength) {
  Value out = call({"double", {}, true}, {Array{1, 2, 3}});
  EXPECT_EQ(out, Value{(Array{2, 4, 6})});
  EXPECT_EQ(call({"add", {}, true}, {Array{1, 2}, Scalar{int64_t{10}}}), Value{(Array{11, 12})});
  EXPECT_THROW(call({"add", {}, true}, {Array{1, 2}, Array{1}}), EvalError);
  EXPECT_EQ(call({"arrayEnumerate", {}, false}, {Array{7, 7, 7}}), Value{(Array{1, 2, 3})});
}

TEST(Functions, RegistryIsExtensible) {
  ScalarFnInfo info;
  info.name = "triple_test";
  info.eval = [](std::span<const Value> args, std::span<const Scalar>) -> Value {
    return Scalar{std::get<int64_t>(as_scalar(args[0])) * 3};
  };
  FunctionRegistry::instance().add(info);
  EXPECT_EQ(call({"triple_test", {}, true}, {Array{1, 2}}), Value{(Array{3, 6})});
  EXPECT_THROW(FunctionRegistry::instance().get("nope"), SchemaError);
}

TEST(Aggregates, DecompositionTable) {
  EXPECT_EQ(decompose(AggFn::kCount).final, std::vector<AggFn>{AggFn::kSum});
  EXPECT_EQ(decompose(AggFn::kAvg).initial, (std::vector<AggFn>{AggFn::kSum, AggFn::kCount}));
  EXPECT_EQ(decompose(AggFn::kMin).final, std::vector<AggFn>{AggFn::kMin});
}

TEST(Aggregates, ForEachIsPositionWise) {
  std::vector<Value> in{Array{1, 2, 3}, Array{10, 20}, Array{}};
  EXPECT_EQ(aggregate_for_each(AggFn::kSum, in), Value{(Array{11, 22, 3})});
  EXPECT_EQ(aggregate_for_each(AggFn::kCount, in), Value{(Array{2, 2, 1})});
  EXPECT_EQ(aggregate_for_each(AggFn::kMax, in), Value{(Array{10, 20, 3})});
}

TEST(Aggregates, AgreeWithNaive) {
  SplitMix64 rng(1);
  for (int i = 0; i < 300; ++i) {
    std::vector<Value> xs;
    size_t n = rng.below(6);
    for (size_t j = 0; j < n; ++j)
      xs.push_back(rng.chance(0.2) ? Scalar{Null{}} : Scalar{rng.range(-5, 5)});
    for (auto fn : {AggFn::kMin, AggFn::kMax, AggFn::kCount, AggFn::kSum, AggFn::kAvg, AggFn::kDistinct})
      ASSERT_TRUE(total_order(aggregate(fn, xs), testing::naive_aggregate(fn, false, xs)) == 0) << agg_name(fn);
  }
}

TEST(SplitMix, ReferenceVector) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
}

}  // namespace
}  // namespace a3d
