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

#include "random_terms.hpp"

#include <algorithm>

namespace a3d::testing {

namespace {

Scalar small(SplitMix64& rng, double null_prob = 0.1) {
  if (rng.chance(null_prob)) return Null{};
  return rng.range(-3, 6);
}

Array small_array(SplitMix64& rng, size_t len) {
  Array a;
  for (size_t i = 0; i < len; ++i) {
    if (i > 0 && rng.chance(0.25))
      a.push_back(a.back());
    else
      a.push_back(rng.range(-3, 6));
  }
  return a;
}

size_t random_len(SplitMix64& rng) { return rng.chance(0.25) ? 0 : static_cast<size_t>(rng.range(1, 4)); }

const char* kTexts[] = {"p", "q", "r"};

}  // namespace

Catalog random_catalog() {
  Catalog c;
  c["R"].schema = Schema{{"id", "x", "z", "s"}, {"a", "b"}};
  c["R"].correspondences = {{"a", "b"}};
  c["S"].schema = Schema{{"id", "y"}, {"c"}};
  return c;
}

Database random_database(SplitMix64& rng, size_t rows) {
  Database db;
  auto cat = random_catalog();
  db["R"].schema = cat["R"].schema;
  db["S"].schema = cat["S"].schema;
  for (size_t i = 0; i < rows; ++i) {
    size_t len = random_len(rng);
    db["R"].rows.push_back(Tuple{{"id", rng.range(0, 4)},
                                 {"x", small(rng)},
                                 {"z", small(rng)},
                                 {"s", rng.chance(0.1) ? Scalar{Null{}} : Scalar{kTexts[rng.below(3)]}},
                                 {"a", small_array(rng, len)},
                                 {"b", small_array(rng, len)}});
    db["S"].rows.push_back(Tuple{{"id", rng.range(0, 4)}, {"y", small(rng)}, {"c", small_array(rng, random_len(rng))}});
  }
  return db;
}

PredPtr random_pred(SplitMix64& rng, const std::vector<std::string>& columns, int depth) {
  if (depth <= 0 || rng.chance(0.4)) {
    if (rng.chance(0.05)) return p_const(rng.chance(0.5));
    auto op = static_cast<CmpOp>(rng.below(6));
    ExprPtr lhs = col(columns[rng.below(columns.size())]);
    ExprPtr rhs = rng.chance(0.2) && columns.size() > 1 ? col(columns[rng.below(columns.size())])
                                                        : lit(rng.range(-3, 6));
    if (rng.chance(0.5)) std::swap(lhs, rhs);
    return p_cmp(op, lhs, rhs);
  }
  switch (rng.below(3)) {
    case 0:
      return p_and({random_pred(rng, columns, depth - 1), random_pred(rng, columns, depth - 1)});
    case 1:
      return p_or({random_pred(rng, columns, depth - 1), random_pred(rng, columns, depth - 1)});
    default:
      return p_not(random_pred(rng, columns, depth - 1));
  }
}

Tuple random_tuple(SplitMix64& rng, const std::vector<std::string>& columns) {
  Tuple t;
  for (const auto& c : columns) t[c] = small(rng, 0.15);
  return t;
}

namespace {

struct Gen {
  SplitMix64& rng;
  Catalog catalog = random_catalog();
  int fresh = 0;

  std::string name(const char* prefix) { return prefix + std::to_string(++fresh); }

  template <class C>
  std::string pick(const C& items) {
    auto it = items.begin();
    std::advance(it, rng.below(items.size()));
    return *it;
  }

  std::vector<std::string> numeric_scalars(const Schema& s) {
    std::vector<std::string> out;
    for (const auto& c : s.scalars)
      if (c != "s") out.push_back(c);
    return out;
  }

  TermPtr base() {
    if (rng.chance(0.2)) return rel("S");
    TermPtr r = rel("R");
    // Multi-target operators only directly over R, where a ≈ b holds.
    if (rng.chance(0.25)) {
      std::string n = name("e"), m = name("e");
      if (rng.chance(0.5)) return array_join(r, {{"a", n}, {"b", m}});
      return array_filter(r, {{"a", n}, {"b", m}}, random_pred(rng, {n, m}, 1));
    }
    return r;
  }

  TermPtr gen(int depth) {
    if (depth <= 0) return base();
    TermPtr in = gen(depth - 1);
    Schema s = output_schema(in, catalog);
    auto nums = numeric_scalars(s);
    for (int attempt = 0; attempt < 8; ++attempt) {
      switch (rng.below(8)) {
        case 0:
          if (nums.empty()) break;
          if (s.has("s") && rng.chance(0.2))
            return filter(in, p_cmp(rng.chance(0.5) ? CmpOp::kEq : CmpOp::kNe, "s", Scalar{kTexts[rng.below(3)]}));
          if (!s.arrays.empty() && rng.chance(0.2))
            return filter(in, p_cmp(CmpOp::kGe, apply({"length", {}, false}, {col(pick(s.arrays))}),
                                    lit(rng.range(0, 3))));
          return filter(in, random_pred(rng, nums, 2));
        case 1: {
          auto cols = s.columns();
          std::set<std::string> keep;
          for (const auto& c : cols)
            if (rng.chance(0.6)) keep.insert(c);
          if (keep.empty()) keep.insert(pick(cols));
          return project(in, keep);
        }
        case 2: {
          if (s.arrays.empty()) break;
          std::string a = pick(s.arrays);
          std::string n = rng.chance(0.3) ? a : name("e");
          return array_filter(in, a, n, random_pred(rng, {n}, 1));
        }
        case 3: {
          if (s.arrays.empty()) break;
          std::string a = pick(s.arrays);
          return array_join(in, a, rng.chance(0.3) ? a : name("e"));
        }
        case 4: {
          std::string y = name("d");
          if (!s.arrays.empty() && rng.chance(0.5)) {
            std::string a = pick(s.arrays);
            switch (rng.below(4)) {
              case 0:
                return derive(in, y, {"length", {}, false}, {a});
              case 1:
                return derive(in, y, {"arraySum", {}, false}, {a});
              case 2:
                return derive(in, y, {"double", {}, true}, {a});
              default:
                return derive(in, y, {"affine", {int64_t{-1}, int64_t{2}}, true}, {a});
            }
          }
          if (nums.empty()) break;
          switch (rng.below(3)) {
            case 0:
              return derive(in, y, {"affine", {rng.range(-2, 2) | 1, rng.range(-3, 3)}, false}, {pick(nums)});
            case 1:
              return derive(in, y, {"add", {}, false}, {pick(nums), pick(nums)});
            default:
              return derive(in, y, {"abs", {}, false}, {pick(nums)});
          }
        }
        case 5: {
          std::set<std::string> g;
          for (const auto& c : s.scalars)
            if (rng.chance(0.3)) g.insert(c);
          std::vector<AggSpec> aggs;
          aggs.push_back({AggFn::kCount, {}, name("g"), false});
          if (!nums.empty()) {
            static const AggFn fns[] = {AggFn::kSum, AggFn::kMin, AggFn::kMax, AggFn::kAvg, AggFn::kDistinct,
                                        AggFn::kCount};
            aggs.push_back({fns[rng.below(6)], {pick(nums)}, name("g"), false});
          }
          if (!s.arrays.empty() && rng.chance(0.5)) {
            static const AggFn fns[] = {AggFn::kSum, AggFn::kMin, AggFn::kMax, AggFn::kCount};
            aggs.push_back({fns[rng.below(4)], {pick(s.arrays)}, name("g"), true});
          }
          return aggregate(in, g, aggs);
        }
        case 6: {
          if (!s.has("id") || s.is_array("id")) break;
          auto other = relation_names(in).count("S") ? rel("R") : rel("S");
          Schema os = output_schema(other, catalog);
          bool clash = false;
          for (const auto& c : os.columns())
            if (c != "id" && s.has(c)) clash = true;
          if (clash) break;
          return rng.chance(0.5) ? join(in, other) : join(other, in);
        }
        default:
          return in;
      }
    }
    return in;
  }
};

}  // namespace

TermPtr random_term(SplitMix64& rng, int depth) {
  Gen g{rng};
  return g.gen(static_cast<int>(rng.range(1, depth)));
}

}  // namespace a3d::testing
