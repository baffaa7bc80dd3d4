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
#include "a3d/eval.hpp"
#include "naive.hpp"
#include "random_terms.hpp"

namespace a3d {
namespace {

Relation make(Schema schema, std::vector<Tuple> rows) { return Relation{std::move(schema), std::move(rows)}; }

TEST(Eval, ArrayJoinCreatesOneRowPerElement) {
  Database db{{"R", make(Schema{{"id"}, {"vals"}}, {{{"id", int64_t{1}}, {"vals", Array{10, 20, 30}}},
                                                      {{"id", int64_t{2}}, {"vals", Array{5, 15}}}})}};
  Relation got = eval(array_join(rel("R"), "vals"), db);
  Relation want = make(Schema{{"id", "vals"}, {}}, {{{"id", int64_t{1}}, {"vals", int64_t{10}}},
                                                    {{"id", int64_t{1}}, {"vals", int64_t{20}}},
                                                    {{"id", int64_t{1}}, {"vals", int64_t{30}}},
                                                    {{"id", int64_t{2}}, {"vals", int64_t{5}}},
                                                    {{"id", int64_t{2}}, {"vals", int64_t{15}}}});
  EXPECT_TRUE(relations_equal(got, want));
}

TEST(Eval, TrueFilterIsIdentity) {
  SplitMix64 rng(7);
  Database db = testing::random_database(rng);
  EXPECT_TRUE(relations_equal(eval(filter(rel("R"), p_const(true)), db), db.at("R")));
}

TEST(Eval, AggregateSums) {
  Database db{{"R", make(Schema{{"g", "x"}, {}}, {{{"g", int64_t{1}}, {"x", int64_t{2}}},
                                                  {{"g", int64_t{1}}, {"x", int64_t{3}}},
                                                  {{"g", int64_t{2}}, {"x", int64_t{5}}}})}};
  Relation got = eval(aggregate(rel("R"), {"g"}, {{AggFn::kSum, {"x"}, "s"}}), db);
  Relation want = make(Schema{{"g", "s"}, {}}, {{{"g", int64_t{1}}, {"s", int64_t{5}}},
                                                {{"g", int64_t{2}}, {"s", int64_t{5}}}});
  EXPECT_TRUE(relations_equal(got, want));
}

TEST(Eval, DeriveDoublesElements) {
  Database db{{"R", make(Schema{{}, {"a"}}, {{{"a", Array{1, 2}}}})}};
  Relation got = eval(derive(rel("R"), "y", {"double", {}, true}, {"a"}), db);
  Relation want = make(Schema{{}, {"a", "y"}}, {{{"a", Array{1, 2}}, {"y", Array{2, 4}}}});
  EXPECT_TRUE(relations_equal(got, want));
}

TEST(Eval, ArrayFilterIsCoordinatedAndKeepsRows) {
  Database db{{"R", make(Schema{{}, {"a", "b"}}, {{{"a", Array{1, 5, 2}}, {"b", Array{10, 50, 20}}},
                                                  {{"a", Array{}}, {"b", Array{}}}})}};
  auto t = array_filter(rel("R"), {{"a", "a"}, {"b", "n"}}, p_cmp(CmpOp::kGt, "n", int64_t{15}));
  Relation got = eval(t, db);
  Relation want = make(Schema{{}, {"a", "n"}}, {{{"a", Array{5, 2}}, {"n", Array{50, 20}}},
                                                {{"a", Array{}}, {"n", Array{}}}});
  EXPECT_TRUE(relations_equal(got, want));
}

TEST(Eval, UnequalMultiTargetLengthsAreAnError) {
  Database db{{"R", make(Schema{{}, {"a", "b"}}, {{{"a", Array{1, 2}}, {"b", Array{1}}}})}};
  EXPECT_THROW(eval(array_join(rel("R"), {{"a", "a"}, {"b", "b"}}), db), EvalError);
  EXPECT_THROW(eval(array_filter(rel("R"), {{"a", "a"}, {"b", "b"}}, p_const(true)), db), EvalError);
}

TEST(Eval, UnboundRelationIsAnError) {
  Database db{{"R", make(Schema{{"x"}, {}}, {})}};
  Catalog cat{{"T", {Schema{{"x"}, {}}, {}}}};
  EXPECT_THROW(eval(rel("T"), db), Error);
}

TEST(Eval, EmptyInputAggregateHasNoGroups) {
  Database db{{"R", make(Schema{{"x"}, {}}, {})}};
  EXPECT_TRUE(eval(aggregate(rel("R"), {}, {{AggFn::kCount, {}, "n"}}), db).rows.empty());
}

TEST(Eval, NullJoinKeysMatch) {
  Database db{{"R", make(Schema{{"k", "x"}, {}}, {{{"k", Null{}}, {"x", int64_t{1}}}})},
              {"S", make(Schema{{"k", "y"}, {}}, {{{"k", Null{}}, {"y", int64_t{2}}}})}};
  EXPECT_EQ(eval(join(rel("R"), rel("S")), db).rows.size(), 1u);
}

TEST(Eval, ArrayJoinCardinalityIsTotalLength) {
  SplitMix64 rng(11);
  for (int i = 0; i < 20; ++i) {
    Database db = testing::random_database(rng, 12);
    size_t total = 0;
    for (const auto& row : db.at("R").rows) total += std::get<Array>(row.at("a")).size();
    EXPECT_EQ(eval(array_join(rel("R"), "a", "n"), db).rows.size(), total);
    EXPECT_EQ(eval(array_filter(rel("R"), "a", "n", p_cmp(CmpOp::kGt, "n", int64_t{0})), db).rows.size(),
              db.at("R").rows.size());
  }
}

TEST(Eval, NestedProjectionCollapses) {
  SplitMix64 rng(3);
  Database db = testing::random_database(rng);
  auto inner = project(rel("R"), {"id", "x", "a"});
  EXPECT_TRUE(relations_equal(eval(project(inner, {"id", "a"}), db), eval(project(rel("R"), {"id", "a"}), db)));
}

TEST(Eval, MatchesNaiveEvaluatorOnRandomTerms) {
  SplitMix64 rng(2026);
  int compared = 0;
  for (int i = 0; i < 500; ++i) {
    TermPtr t = testing::random_term(rng, 5);
    Database db = testing::random_database(rng);
    Relation a, b;
    bool fa = false, fb = false;
    try {
      a = eval(t, db);
    } catch (const EvalError&) {
      fa = true;
    }
    try {
      b = testing::naive_eval(t, db);
    } catch (const EvalError&) {
      fb = true;
    }
    ASSERT_EQ(fa, fb) << to_string(t);
    if (fa) continue;
    ASSERT_TRUE(relations_equal(a, b)) << to_string(t) << "\n" << to_string(a) << to_string(b);
    ASSERT_TRUE(relations_equal(a, eval(t, db), Semantics::kSet));
    ++compared;
  }
  EXPECT_GT(compared, 400);
}

TEST(RelationsEqual, SetModeCollapsesDuplicates) {
  Tuple r1{{"x", int64_t{1}}};
  Relation two = make(Schema{{"x"}, {}}, {r1, r1});
  Relation one = make(Schema{{"x"}, {}}, {r1});
  EXPECT_TRUE(relations_equal(two, one, Semantics::kSet));
  EXPECT_FALSE(relations_equal(two, one, Semantics::kBag));
  EXPECT_THROW(relations_equal(two, make(Schema{{"y"}, {}}, {}), Semantics::kBag), SchemaError);
}

TEST(Schema, OutputSchemas) {
  Catalog cat{{"R", {Schema{{"id", "g", "x", "b", "c"}, {"vals"}}, {}}}};
  EXPECT_EQ(output_schema(array_join(rel("R"), "vals", "n"), cat), (Schema{{"id", "g", "x", "b", "c", "n"}, {}}));
  EXPECT_EQ(output_schema(project(rel("R"), {"b"}), cat), (Schema{{"b"}, {}}));
  EXPECT_EQ(output_schema(aggregate(rel("R"), {"g"}, {{AggFn::kAvg, {"x"}, "m"}}), cat), (Schema{{"g", "m"}, {}}));
  EXPECT_EQ(output_schema(array_filter(rel("R"), "vals", "f", p_const(true)), cat),
            (Schema{{"id", "g", "x", "b", "c"}, {"f"}}));
  EXPECT_THROW(output_schema(project(rel("R"), {"nope"}), cat), SchemaError);
  EXPECT_THROW(output_schema(filter(rel("R"), p_cmp(CmpOp::kGt, "nope", int64_t{1})), cat), SchemaError);
  EXPECT_THROW(output_schema(aggregate(rel("R"), {"g"}, {{AggFn::kSum, {"x"}, "g"}}), cat), SchemaError);
  EXPECT_THROW(output_schema(rel("T"), cat), SchemaError);
}

}  // namespace
}  // namespace a3d
