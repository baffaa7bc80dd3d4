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

#include <algorithm>
#include <numeric>

#include "a3d/eval.hpp"
#include "a3d/stats.hpp"
#include "a3d/testkit.hpp"
#include "naive.hpp"
#include "random_terms.hpp"

namespace a3d {
namespace {

using namespace testing;

std::vector<Scalar> column(const Relation& r, const std::string& c) {
  std::vector<Scalar> out;
  for (const auto& row : r.rows) out.push_back(std::get<Scalar>(row.at(c)));
  return out;
}

Relation one_column(Distribution d, size_t rows, uint64_t seed, ValueType type = ValueType::kInt) {
  ColumnSpec c;
  c.name = "x";
  c.type = type;
  c.values = d;
  return generate(GenSpec{rows, seed, {c}});
}

Props props_of(const ColumnStats& s) {
  Props p;
  p.card = static_cast<double>(s.row_count);
  p.cols["x"] = ColProps{&s, 0, 0, static_cast<double>(s.ndv)};
  return p;
}

// Fraction of rows satisfying p by a full scan.
double scan(const Relation& r, const PredPtr& p) {
  size_t hit = 0;
  for (const auto& row : r.rows) hit += testing::naive_pred(p, row).value_or(false);
  return static_cast<double>(hit) / static_cast<double>(r.rows.size());
}

TEST(Stats, ExactEqualityIsStoredFrequency) {
  ColumnStats s = build_column_stats({int64_t{1}, int64_t{2}, int64_t{2}, int64_t{2}});
  ASSERT_EQ(s.kind, StatsKind::kExact);
  EXPECT_DOUBLE_EQ(s.freq.at(int64_t{2}), 0.75);
  EXPECT_DOUBLE_EQ(estimate_selectivity(p_cmp(CmpOp::kEq, "x", int64_t{2}), props_of(s)), 0.75);
}

TEST(Stats, UniformEqualityIsInverseNdv) {
  std::vector<Scalar> values;
  for (int64_t v = 0; v < 100; ++v) values.insert(values.end(), 3, v);
  ColumnStats s = build_column_stats(values);
  ASSERT_EQ(s.kind, StatsKind::kUniform);
  EXPECT_DOUBLE_EQ(estimate_selectivity(p_cmp(CmpOp::kEq, "x", int64_t{42}), props_of(s)), 0.01);
  EXPECT_DOUBLE_EQ(estimate_selectivity(p_cmp(CmpOp::kEq, "x", int64_t{420}), props_of(s)), 0.0);
}

TEST(Stats, UniformTenThousandDistinct) {
  std::vector<Scalar> values;
  for (int64_t v = 0; v < 10000; ++v) values.push_back(v);
  ColumnStats s = build_column_stats(values);
  ASSERT_EQ(s.kind, StatsKind::kUniform);
  EXPECT_DOUBLE_EQ(s.avg_freq, 1e-4);
}

TEST(Stats, ExactRangeMatchesScan) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Distribution d;
    d.kind = seed % 2 ? Distribution::Kind::kUniform : Distribution::Kind::kZipf;
    d.ndv = 40;
    Relation r = one_column(d, 5000, seed);
    ColumnStats s = build_column_stats(column(r, "x"));
    ASSERT_EQ(s.kind, StatsKind::kExact);
    for (int64_t k = -1; k <= 41; k += 3) {
      for (CmpOp op : {CmpOp::kLt, CmpOp::kLe, CmpOp::kGt, CmpOp::kGe, CmpOp::kNe}) {
        auto p = p_cmp(op, "x", k);
        EXPECT_NEAR(estimate_selectivity(p, props_of(s)), scan(r, p), 0.02) << to_string(p);
      }
    }
  }
}

TEST(Stats, UniformRangeMatchesScan) {
  Distribution d;
  d.ndv = 1000;
  Relation r = one_column(d, 200000, 3);
  ColumnStats s = build_column_stats(column(r, "x"));
  ASSERT_EQ(s.kind, StatsKind::kUniform);
  for (int64_t k : {0, 1, 250, 500, 999, 1000}) {
    auto p = p_cmp(CmpOp::kLt, "x", k);
    EXPECT_NEAR(estimate_selectivity(p, props_of(s)), scan(r, p), 0.02) << k;
  }
}

TEST(Stats, ZipfIsClusteredAndTopValueIsAccurate) {
  Distribution d;
  d.kind = Distribution::Kind::kZipf;
  d.ndv = 1000;
  d.skew = 1.2;
  Relation r = one_column(d, 50000, 11);
  ColumnStats s = build_column_stats(column(r, "x"));
  ASSERT_EQ(s.kind, StatsKind::kClustered);
  std::map<Scalar, size_t, ScalarOrder> counts;
  for (const auto& v : column(r, "x")) ++counts[v];
  auto top = std::max_element(counts.begin(), counts.end(),
                              [](const auto& a, const auto& b) { return a.second < b.second; });
  auto p = p_cmp(CmpOp::kEq, "x", top->first);
  EXPECT_NEAR(estimate_selectivity(p, props_of(s)), scan(r, p), 0.05);
  double mass = 0;
  for (const auto& c : s.clusters) mass += c.centroid * static_cast<double>(c.members);
  EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(Stats, ClusteredRangeStaysClose) {
  Distribution d;
  d.kind = Distribution::Kind::kZipf;
  d.ndv = 500;
  Relation r = one_column(d, 50000, 12);
  ColumnStats s = build_column_stats(column(r, "x"));
  for (int64_t k : {1, 5, 50, 250, 499}) {
    auto p = p_cmp(CmpOp::kLt, "x", k);
    EXPECT_NEAR(estimate_selectivity(p, props_of(s)), scan(r, p), 0.05) << k;
  }
}

TEST(Stats, UnknownColumnsUseDefaults) {
  Props none;
  EXPECT_DOUBLE_EQ(estimate_selectivity(p_cmp(CmpOp::kEq, "q", int64_t{1}), none), 0.1);
  EXPECT_DOUBLE_EQ(estimate_selectivity(p_cmp(CmpOp::kLt, "q", int64_t{1}), none), 1.0 / 3.0);
}

TEST(Stats, SelectivityBoundsAndConjunctionOnRandomPredicates) {
  SplitMix64 rng(21);
  Database db = random_database(rng, 64);
  StatsCatalog stats = build_stats(db);
  CostModel model(random_catalog(), &stats);
  const Props& props = model.props(rel("R"));
  std::vector<std::string> cols{"id", "x", "z", "s"};
  for (int i = 0; i < 500; ++i) {
    auto a = random_pred(rng, cols, 2);
    auto b = random_pred(rng, cols, 2);
    double sa = estimate_selectivity(a, props), sb = estimate_selectivity(b, props);
    double sab = estimate_selectivity(p_and({a, b}), props);
    EXPECT_GE(sa, 0.0);
    EXPECT_LE(sa, 1.0);
    EXPECT_LE(sab, std::min(sa, sb) + 1e-12);
    double sor = estimate_selectivity(p_or({a, b}), props);
    EXPECT_GE(sor, std::max(sa, sb) - 1e-12);
    EXPECT_LE(sor, 1.0);
  }
}

TEST(Rank, SpecExamples) {
  EXPECT_DOUBLE_EQ((OpCostProfile{OpKind::kFilter, 0.2, 1, 1, 1}).rank(), 0.8);
  EXPECT_DOUBLE_EQ((OpCostProfile{OpKind::kArrayJoin, 1, 1, 8, 8}).rank(), -0.875);
  EXPECT_DOUBLE_EQ((OpCostProfile{OpKind::kArrayFilter, 1, 0.5, 1, 8}).rank(), 0.0625);
  EXPECT_DOUBLE_EQ((OpCostProfile{OpKind::kDerive, 1, 1, 1, 3}).rank(), 0.0);
}

TEST(Rank, OrderIsScaleFree) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<OpCostProfile> ops;
    for (int i = 0; i < 6; ++i) {
      OpCostProfile p;
      p.kind = static_cast<OpKind>(rng.below(4));
      p.s = p.kind == OpKind::kFilter ? rng.uniform() : 1;
      p.s_a = p.kind == OpKind::kArrayFilter ? rng.uniform() : 1;
      p.len = p.kind == OpKind::kArrayJoin ? 0.5 + 5 * rng.uniform() : 1;
      p.c = 0.1 + 10 * rng.uniform();
      ops.push_back(p);
    }
    double k = 0.01 + 100 * rng.uniform();
    auto scaled = ops;
    for (auto& p : scaled) p.c *= k;
    std::vector<int> a(ops.size()), b(ops.size());
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 0);
    std::stable_sort(a.begin(), a.end(), [&](int i, int j) { return rank_before(ops[i], ops[j]); });
    std::stable_sort(b.begin(), b.end(), [&](int i, int j) { return rank_before(scaled[i], scaled[j]); });
    EXPECT_EQ(a, b);
  }
}

Catalog array_catalog() { return {{"T", RelationInfo{Schema{{"k"}, {"a", "b"}}, {}}}}; }

StatsCatalog array_stats(int64_t rows, double len_a, double len_b) {
  StatsCatalog sc;
  TableStats t;
  t.row_count = rows;
  std::vector<Scalar> keys;
  for (int64_t i = 0; i < rows; ++i) keys.push_back(i % 10);
  t.columns["k"] = build_column_stats(keys);
  for (auto [name, len] : {std::pair<std::string, double>{"a", len_a}, {"b", len_b}}) {
    ColumnStats s;
    s.is_array = true;
    s.row_count = rows;
    s.avg_array_len = len;
    s.row_stats = std::make_shared<ColumnStats>(build_column_stats({int64_t{1}, int64_t{2}}));
    t.columns[name] = s;
  }
  sc.tables["T"] = t;
  return sc;
}

TEST(PerTupleCost, SpecExamples) {
  StatsCatalog sc = array_stats(1000, 8, 6);
  CostModel model(array_catalog(), &sc);
  EXPECT_DOUBLE_EQ(model.per_tuple_cost(array_filter(rel("T"), "a", "e", p_cmp(CmpOp::kGt, "e", int64_t{1}))), 8);
  EXPECT_DOUBLE_EQ(model.per_tuple_cost(filter(rel("T"), p_cmp(CmpOp::kEq, "k", int64_t{3}))), 1);

  StatsCatalog sc2 = array_stats(1000, 4, 6);
  CostModel model2(array_catalog(), &sc2);
  auto add = derive(rel("T"), "c", FnRef{"add", {}, true}, {"a", "b"});
  EXPECT_DOUBLE_EQ(model2.per_tuple_cost(add), 10);
}

TEST(PerTupleCost, OverrideIsHonored) {
  StatsCatalog sc = array_stats(1000, 4, 6);
  sc.cost_overrides["add"] = 3;
  CostModel model(array_catalog(), &sc);
  EXPECT_DOUBLE_EQ(model.per_tuple_cost(derive(rel("T"), "c", FnRef{"add", {}, true}, {"a", "b"})), 30);
}

TEST(Cardinality, SpecExamples) {
  StatsCatalog sc = array_stats(1000, 3, 3);
  CostModel model(array_catalog(), &sc);
  EXPECT_DOUBLE_EQ(model.cardinality(filter(rel("T"), p_cmp(CmpOp::kEq, "k", int64_t{3}))), 100);
  EXPECT_DOUBLE_EQ(model.cardinality(array_join(rel("T"), "a")), 3000);
  auto g = aggregate(rel("T"), {"k"}, {AggSpec{AggFn::kCount, {}, "n", false}});
  EXPECT_DOUBLE_EQ(model.cardinality(g), 10);
}

TEST(Cardinality, JoinWithinFactorTwo) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    ColumnSpec id{"id"};
    id.values.ndv = 50 * static_cast<int64_t>(seed);
    ColumnSpec v{"v"};
    Database db{{"L", generate(GenSpec{400, seed, {id, v}})}, {"R", generate(GenSpec{300, seed + 100, {id}})}};
    Catalog cat = catalog_of(db);
    StatsCatalog sc = build_stats(db);
    CostModel model(cat, &sc);
    auto j = join(rel("L"), rel("R"));
    double truth = static_cast<double>(eval(j, db).rows.size());
    double est = model.cardinality(j);
    EXPECT_LE(est, 2 * truth) << seed;
    EXPECT_GE(est, truth / 2) << seed;
  }
}

TEST(Cardinality, AffineDeriveUsesSourceStats) {
  ColumnSpec x{"x"};
  x.values.ndv = 16;
  Database db{{"R", generate(GenSpec{2000, 9, {x}})}};
  StatsCatalog sc = build_stats(db);
  CostModel model(catalog_of(db), &sc);
  // 2x + 1 > 10 holds exactly when x > 4.5; -x >= -3 when x <= 3.
  auto y = derive(rel("R"), "y", FnRef{"affine", {int64_t{2}, int64_t{1}}, false}, {"x"});
  auto direct = filter(rel("R"), p_cmp(CmpOp::kGt, "x", 4.5));
  EXPECT_DOUBLE_EQ(model.cardinality(filter(y, p_cmp(CmpOp::kGt, "y", int64_t{10}))), model.cardinality(direct));
  auto neg = derive(rel("R"), "y", FnRef{"neg", {}, false}, {"x"});
  auto le = filter(rel("R"), p_cmp(CmpOp::kLe, "x", int64_t{3}));
  EXPECT_DOUBLE_EQ(model.cardinality(filter(neg, p_cmp(CmpOp::kGe, "y", int64_t{-3}))), model.cardinality(le));
  double truth = static_cast<double>(eval(filter(y, p_cmp(CmpOp::kGt, "y", int64_t{10})), db).rows.size());
  EXPECT_NEAR(model.cardinality(filter(y, p_cmp(CmpOp::kGt, "y", int64_t{10}))), truth, 1e-6);
}

TEST(Cost, MonotoneInInputCardinality) {
  SplitMix64 rng(8);
  for (int i = 0; i < 200; ++i) {
    TermPtr t = random_term(rng, 3);
    Database db = random_database(rng, 16);
    StatsCatalog small = build_stats(db);
    StatsCatalog big = small;
    for (auto& [name, ts] : big.tables) ts.row_count *= 3;
    CostModel a(random_catalog(), &small), b(random_catalog(), &big);
    double ca = a.cost(t), cb = b.cost(t);
    EXPECT_GE(ca, 0);
    EXPECT_GE(cb + 1e-9, ca) << to_string(t);
  }
}

}  // namespace
}  // namespace a3d
