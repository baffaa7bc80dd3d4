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

#include "rule_instances.hpp"

#include <stdexcept>

#include "a3d/errors.hpp"
#include "a3d/rewrite.hpp"
#include "random_terms.hpp"

namespace a3d::testing {

namespace {

using Names = std::vector<std::string>;

const std::string& pick(SplitMix64& rng, const Names& xs) { return xs[rng.below(xs.size())]; }

Scalar maybe_null(SplitMix64& rng, Scalar v, double p) { return rng.chance(p) ? Scalar{Null{}} : v; }

Array elements(SplitMix64& rng, size_t len) {
  Array out;
  for (size_t i = 0; i < len; ++i) {
    if (i > 0 && rng.chance(0.3))
      out.push_back(out.back());
    else
      out.push_back(maybe_null(rng, rng.range(-2, 6), 0.05));
  }
  return out;
}

FnRef fn(const std::string& name, std::vector<Scalar> params = {}, bool map = false) {
  return FnRef{name, std::move(params), map};
}

FnRef affine_fn(SplitMix64& rng) {
  switch (rng.below(4)) {
    case 0:
      return fn("neg");
    case 1:
      return fn("double");
    case 2:
      return fn("affine", {int64_t{2}, int64_t{1}});
    default:
      return fn("affine", {int64_t{-1}, int64_t{3}});
  }
}

FnRef unary_fn(SplitMix64& rng) { return rng.chance(0.25) ? fn("abs") : affine_fn(rng); }

TermPtr base(SplitMix64& rng) {
  if (rng.chance(0.3)) return filter(rel("R"), random_pred(rng, {"id", "x", "s"}, 1));
  return rel("R");
}

std::string alias_for(SplitMix64& rng, const std::string& src, const std::string& fresh) {
  return rng.chance(0.3) ? src : fresh;
}

std::vector<AggSpec> random_aggs(SplitMix64& rng, const std::string& input, bool foreach_able) {
  std::vector<AggSpec> out;
  size_t n = 1 + rng.below(2);
  for (size_t i = 0; i < n; ++i) {
    std::string alias = "m" + std::to_string(i + 1);
    if (foreach_able) {
      static const AggFn fns[] = {AggFn::kSum, AggFn::kMin, AggFn::kMax, AggFn::kCount};
      out.push_back({fns[rng.below(4)], {input}, alias, false});
      continue;
    }
    static const AggFn fns[] = {AggFn::kSum, AggFn::kMin, AggFn::kMax, AggFn::kCount, AggFn::kAvg, AggFn::kDistinct};
    if (rng.chance(0.15))
      out.push_back({AggFn::kCount, {}, alias, false});
    else
      out.push_back({fns[rng.below(6)], {input}, alias, false});
  }
  return out;
}

std::set<std::string> random_subset(SplitMix64& rng, const Names& xs, size_t min_size = 0) {
  std::set<std::string> out;
  for (const auto& x : xs)
    if (rng.chance(0.5)) out.insert(x);
  while (out.size() < min_size) out.insert(pick(rng, xs));
  return out;
}

TermPtr rhs_side(SplitMix64& rng) {
  if (rng.chance(0.3)) return filter(rel("S"), random_pred(rng, {"g", "y"}, 1));
  return rel("S");
}

TermPtr candidate(const std::string& id, SplitMix64& rng) {
  if (id == "R1") {
    std::string n = alias_for(rng, "a", "n"), m = alias_for(rng, "b", "m");
    return array_join(array_join(base(rng), "a", n), "b", m);
  }
  if (id == "R2.1" || id == "R2.2") {
    if (rng.chance(0.3)) {
      TermPtr mu = array_join(base(rng), {{"a", "n"}, {"b", "m"}});
      return filter(mu, p_and({random_pred(rng, {"n", "m"}, 1), random_pred(rng, {"x", "s"}, 1)}));
    }
    std::string n = alias_for(rng, "a", "n");
    auto parts = std::vector<PredPtr>{random_pred(rng, {n}, 1), random_pred(rng, {"x", "s", "g"}, 1)};
    if (rng.chance(0.3)) parts.pop_back();
    return filter(array_join(base(rng), "a", n), p_and(parts));
  }
  if (id == "R2.3") {
    if (rng.chance(0.3)) return array_join(base(rng), {{"a", "n"}, {"b", "m"}});
    return array_join(base(rng), "a", alias_for(rng, "a", "n"));
  }
  if (id == "R3") {
    std::string n = alias_for(rng, "a", "n");
    auto cols = random_subset(rng, {"id", "g", "x", "s", "b"});
    cols.insert(n);
    return project(array_join(base(rng), "a", n), cols);
  }
  if (id == "R4.1") {
    TermPtr s = project(rhs_side(rng), {"g", "y"});
    switch (rng.below(3)) {
      case 0:
        return join(array_join(base(rng), "a", "n"), s);
      case 1:
        return join(s, array_join(base(rng), "b", "m"));
      default:
        return array_join(join(base(rng), s), "a", alias_for(rng, "a", "n"));
    }
  }
  if (id == "R4.2") {
    std::vector<Target> ts{{"a", "n"}, {"c", "k"}};
    if (rng.chance(0.4)) ts.push_back({"b", "m"});
    return array_join(join(base(rng), rhs_side(rng)), ts);
  }
  if (id == "R5.1") {
    return derive(array_join(base(rng), "a", "n"), "y2", fn("add"), {"x", pick(rng, {"s", "g", "id"})});
  }
  if (id == "R5.2") {
    std::string n = alias_for(rng, "a", "n");
    if (rng.chance(0.3)) return derive(array_join(base(rng), "a", n), "y2", fn("add"), {n, "x"});
    return derive(array_join(base(rng), "a", n), "y2", unary_fn(rng), {n});
  }
  if (id == "R6") {
    std::string e = alias_for(rng, "b", "e");
    return array_filter(array_join(base(rng), "a", "n"), "b", e, random_pred(rng, {e}, 1));
  }
  if (id == "R7") {
    if (rng.chance(0.25))
      return array_filter(array_filter(base(rng), "a", "a", random_pred(rng, {"a"}, 1)), "a", "a",
                          random_pred(rng, {"a"}, 1));
    std::string e = alias_for(rng, "a", "e"), f = alias_for(rng, "b", "f");
    return array_filter(array_filter(base(rng), "a", e, random_pred(rng, {e}, 1)), "b", f,
                        random_pred(rng, {f}, 1));
  }
  if (id == "R8") {
    std::string e = alias_for(rng, "a", "e");
    return filter(array_filter(base(rng), "a", e, random_pred(rng, {e}, 1)), random_pred(rng, {"x", "s", "g"}, 2));
  }
  if (id == "R9") {
    std::string e = alias_for(rng, "a", "e");
    auto cols = random_subset(rng, {"id", "g", "x", "s", "b"});
    cols.insert(e);
    return project(array_filter(base(rng), "a", e, random_pred(rng, {e}, 1)), cols);
  }
  if (id == "R10.1") {
    bool left = rng.chance(0.5);
    std::string src = left ? "a" : "c", e = alias_for(rng, src, "e");
    return array_filter(join(base(rng), rhs_side(rng)), src, e, random_pred(rng, {e}, 1));
  }
  if (id == "R10.2") {
    return array_filter(join(base(rng), rhs_side(rng)), {{"a", "a"}, {"b", "f"}}, random_pred(rng, {"a", "f"}, 1));
  }
  if (id == "R10.3") {
    std::string e = alias_for(rng, "b", "e"), f = alias_for(rng, "c", "f");
    TermPtr inner = array_filter(join(base(rng), rhs_side(rng)), "b", e, random_pred(rng, {e}, 1));
    return array_filter(inner, "c", f, random_pred(rng, {f}, 1));
  }
  if (id == "R11.1") {
    std::string e = alias_for(rng, "a", "e");
    TermPtr d = derive(base(rng), "y2", fn("add"), {"x", "s"});
    return array_filter(d, "a", e, random_pred(rng, {e}, 1));
  }
  if (id == "R11.2") {
    FnRef f = affine_fn(rng);
    f.map = true;
    TermPtr d = derive(base(rng), "a", f, {"a"});
    return array_filter(d, "a", "a", random_pred(rng, {"a"}, 1));
  }
  if (id == "R12") {
    TermPtr d = derive(base(rng), "y1", unary_fn(rng), {"x"});
    return derive(d, "y2", unary_fn(rng), {pick(rng, {"s", "g", "id"})});
  }
  if (id == "R13.1") {
    TermPtr d = derive(base(rng), "y", unary_fn(rng), {"x"});
    return filter(d, p_and({random_pred(rng, {"s", "g", "x"}, 1), random_pred(rng, {"y"}, 1)}));
  }
  if (id == "R13.2") {
    std::string out = rng.chance(0.2) ? "x" : "y";
    TermPtr d = derive(base(rng), out, affine_fn(rng), {"x"});
    return filter(d, random_pred(rng, {out}, 2));
  }
  if (id == "R14") {
    auto cols = random_subset(rng, {"id", "g", "s", "a"});
    cols.insert("y");
    return project(derive(base(rng), "y", fn("add"), {"x", "s"}), cols);
  }
  if (id == "R15") {
    if (rng.chance(0.5)) return derive(join(base(rng), rhs_side(rng)), "y2", unary_fn(rng), {"x"});
    return derive(join(base(rng), rhs_side(rng)), "y2", fn("add"), {"y", "g"});
  }
  if (id == "R16") {
    auto g = random_subset(rng, {"g", "s"}, 1);
    Names gs(g.begin(), g.end());
    return filter(aggregate(base(rng), g, random_aggs(rng, "x", false)), random_pred(rng, gs, 2));
  }
  if (id == "R17.1") {
    return aggregate(array_join(base(rng), "a", "n"), random_subset(rng, {"g", "s", "id"}),
                     random_aggs(rng, "n", true));
  }
  if (id == "R17.2") {
    std::string n = alias_for(rng, "a", "n");
    auto g = random_subset(rng, {"g", "s"});
    g.insert(n);
    return aggregate(array_join(base(rng), "a", n), g, random_aggs(rng, "x", false));
  }
  if (id == "R17.3") {
    auto g = random_subset(rng, {"g"});
    g.insert("n");
    return aggregate(array_join(base(rng), {{"a", "n"}, {"b", "m"}}), g, random_aggs(rng, "m", true));
  }
  if (id == "R18") {
    return aggregate(filter(rel("R"), random_pred(rng, {"s", "id", "g"}, 2)), random_subset(rng, {"g", "s"}),
                     random_aggs(rng, "x", false));
  }
  if (id == "R19") {
    auto g = random_subset(rng, {"g", "y"});
    return aggregate(derive(base(rng), "y", unary_fn(rng), {"s"}), g, random_aggs(rng, "x", false));
  }
  if (id == "R20") {
    std::string e = alias_for(rng, "a", "e");
    auto g = random_subset(rng, {"g", e});
    return aggregate(array_filter(base(rng), "a", e, random_pred(rng, {e}, 1)), g, random_aggs(rng, "x", false));
  }
  if (id == "R21") {
    auto g = random_subset(rng, {"g", "y", "s"});
    return aggregate(join(base(rng), rhs_side(rng)), g, random_aggs(rng, "x", false));
  }
  throw std::invalid_argument("no instance generator for " + id);
}

}  // namespace

Catalog rule_catalog_schema() {
  Catalog c;
  c["R"].schema = Schema{{"id", "g", "x", "s"}, {"a", "b"}};
  c["R"].correspondences = {{"a", "b"}, {"a", "c"}};
  c["S"].schema = Schema{{"g", "y"}, {"c"}};
  return c;
}

Database rule_database(SplitMix64& rng) {
  Catalog cat = rule_catalog_schema();
  Database db;
  db["R"].schema = cat["R"].schema;
  db["S"].schema = cat["S"].schema;
  size_t lens[4];
  for (auto& l : lens) l = rng.chance(0.3) ? 0 : static_cast<size_t>(rng.range(1, 4));
  size_t r_rows = static_cast<size_t>(rng.range(6, 12)), s_rows = static_cast<size_t>(rng.range(3, 8));
  for (size_t i = 0; i < r_rows; ++i) {
    int64_t g = rng.range(0, 3);
    db["R"].rows.push_back(Tuple{{"id", static_cast<int64_t>(i % 5)},
                                 {"g", g},
                                 {"x", maybe_null(rng, rng.range(-3, 8), 0.1)},
                                 {"s", rng.range(0, 3)},
                                 {"a", elements(rng, lens[g])},
                                 {"b", elements(rng, lens[g])}});
  }
  for (size_t i = 0; i < s_rows; ++i) {
    int64_t g = rng.range(0, 3);
    db["S"].rows.push_back(
        Tuple{{"g", g}, {"y", maybe_null(rng, rng.range(-3, 8), 0.1)}, {"c", elements(rng, lens[g])}});
  }
  return db;
}

TermPtr rule_instance(const std::string& rule_id, SplitMix64& rng) {
  const Rule& rule = find_rule(rule_id);
  RewriteEnv env(rule_catalog_schema());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    TermPtr t = candidate(rule_id, rng);
    try {
      output_schema(t, env.catalog());
    } catch (const SchemaError&) {
      continue;
    }
    if (rule.rewrite(t, env)) return t;
  }
  throw std::runtime_error("could not generate a matching instance for " + rule_id);
}

}  // namespace a3d::testing
