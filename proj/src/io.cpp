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


#include "a3d/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "a3d/errors.hpp"

namespace a3d {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object with field '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

std::set<std::string> string_set(const Json& j) { return j.get<std::set<std::string>>(); }

std::vector<Target> targets_from(const Json& j) {
  std::vector<Target> out;
  for (const auto& t : j) {
    if (t.is_string()) {
      out.push_back({t.get<std::string>(), t.get<std::string>()});
    } else {
      if (!t.is_array() || t.size() != 2) throw ParseError("a target is \"a\" or [\"source\", \"alias\"]");
      out.push_back({t[0].get<std::string>(), t[1].get<std::string>()});
    }
  }
  return out;
}

Json targets_to(const std::vector<Target>& ts) {
  Json out = Json::array();
  for (const auto& t : ts) out.push_back({t.source, t.alias});
  return out;
}

Json fn_to(const FnRef& fn) {
  Json j = {{"name", fn.name}};
  if (!fn.params.empty()) {
    j["params"] = Json::array();
    for (const auto& p : fn.params) j["params"].push_back(to_json(p));
  }
  if (fn.map) j["map"] = true;
  return j;
}

FnRef fn_from(const Json& j) {
  if (j.is_string()) return FnRef{j.get<std::string>(), {}, false};
  FnRef fn{field(j, "name").get<std::string>(), {}, get_or(j, "map", false)};
  if (j.contains("params"))
    for (const auto& p : j["params"]) fn.params.push_back(scalar_from_json(p));
  return fn;
}

// Converts library exceptions (type mismatches, missing keys) to ParseError.
template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed ") + what + ": " + e.what());
  }
}

Json stats_to(const ColumnStats& s) {
  Json j = {{"kind", kind_name(s.kind)},
            {"row_count", s.row_count},
            {"ndv", s.ndv},
            {"null_fraction", s.null_fraction}};
  if (s.kind == StatsKind::kExact) {
    j["freq"] = Json::array();
    for (const auto& [v, f] : s.freq) j["freq"].push_back({to_json(v), f});
  }
  if (s.kind == StatsKind::kUniform) j["avg_freq"] = s.avg_freq;
  j["min"] = to_json(s.min);
  j["max"] = to_json(s.max);
  if (s.kind == StatsKind::kClustered) {
    j["clusters"] = Json::array();
    for (const auto& c : s.clusters) {
      Json runs = Json::array();
      for (const auto& r : c.runs) runs.push_back({to_json(r.lo), to_json(r.hi), r.count});
      j["clusters"].push_back(
          {{"centroid", c.centroid}, {"members", c.members}, {"dispersion", c.dispersion}, {"runs", runs}});
    }
  }
  if (s.is_array) {
    j["is_array"] = true;
    j["avg_array_len"] = s.avg_array_len;
    j["empty_fraction"] = s.empty_fraction;
    j["array_ndv"] = s.array_ndv;
    if (s.row_stats) j["elements"] = stats_to(*s.row_stats);
  }
  return j;
}

StatsKind kind_from(const std::string& s) {
  for (auto k : {StatsKind::kExact, StatsKind::kUniform, StatsKind::kClustered})
    if (kind_name(k) == s) return k;
  throw ParseError("unknown stats kind '" + s + "'");
}

ColumnStats stats_from(const Json& j) {
  ColumnStats s;
  s.kind = kind_from(field(j, "kind").get<std::string>());
  s.row_count = get_or<int64_t>(j, "row_count", 0);
  s.ndv = get_or<int64_t>(j, "ndv", 0);
  s.null_fraction = get_or(j, "null_fraction", 0.0);
  if (j.contains("freq"))
    for (const auto& e : j["freq"]) s.freq[scalar_from_json(e.at(0))] = e.at(1).get<double>();
  s.avg_freq = get_or(j, "avg_freq", 0.0);
  if (j.contains("min")) s.min = scalar_from_json(j["min"]);
  if (j.contains("max")) s.max = scalar_from_json(j["max"]);
  if (j.contains("clusters")) {
    for (const auto& c : j["clusters"]) {
      Cluster cl;
      cl.centroid = field(c, "centroid").get<double>();
      cl.members = get_or<int64_t>(c, "members", 0);
      cl.dispersion = get_or(c, "dispersion", 0.0);
      if (c.contains("runs"))
        for (const auto& r : c["runs"])
          cl.runs.push_back({scalar_from_json(r.at(0)), scalar_from_json(r.at(1)), r.at(2).get<int64_t>()});
      s.clusters.push_back(std::move(cl));
    }
  }
  s.is_array = get_or(j, "is_array", false);
  s.avg_array_len = get_or(j, "avg_array_len", 0.0);
  s.empty_fraction = get_or(j, "empty_fraction", 0.0);
  s.array_ndv = get_or<int64_t>(j, "array_ndv", 0);
  if (j.contains("elements")) s.row_stats = std::make_shared<ColumnStats>(stats_from(j["elements"]));
  return s;
}

Json options_to(const PlannerOptions& o) {
  return {{"mode", mode_name(o.mode)},
          {"preagg_alpha", o.preagg_alpha},
          {"preaggregate", o.preaggregate},
          {"allow_cross_products", o.allow_cross_products},
          {"oracle_max_relations", o.oracle_max_relations},
          {"oracle_max_ops", o.oracle_max_ops}};
}

PlannerOptions options_from(const Json& j) {
  PlannerOptions o;
  if (j.contains("mode")) o.mode = parse_mode(j["mode"].get<std::string>());
  o.preagg_alpha = get_or(j, "preagg_alpha", o.preagg_alpha);
  o.preaggregate = get_or(j, "preaggregate", o.preaggregate);
  o.allow_cross_products = get_or(j, "allow_cross_products", o.allow_cross_products);
  o.oracle_max_relations = get_or(j, "oracle_max_relations", o.oracle_max_relations);
  o.oracle_max_ops = get_or(j, "oracle_max_ops", o.oracle_max_ops);
  return o;
}

}  // namespace

Json to_json(const Scalar& v) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (std::isfinite(x)) return x;
          return {{"float", std::isnan(x) ? "nan" : x > 0 ? "inf" : "-inf"}};
        } else {
          return x;
        }
      },
      v);
}

Json to_json(const Value& v) {
  if (const auto* s = std::get_if<Scalar>(&v)) return to_json(*s);
  Json out = Json::array();
  for (const auto& e : std::get<Array>(v)) out.push_back(to_json(e));
  return out;
}

Scalar scalar_from_json(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return Null{};
    case Json::value_t::boolean:
      return j.get<bool>();
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
      return j.get<int64_t>();
    case Json::value_t::number_float:
      return j.get<double>();
    case Json::value_t::string:
      return j.get<std::string>();
    case Json::value_t::object:
      if (j.size() == 1 && j.contains("float")) {
        auto s = j["float"].get<std::string>();
        if (s == "nan") return std::nan("");
        if (s == "inf") return HUGE_VAL;
        if (s == "-inf") return -HUGE_VAL;
      }
      [[fallthrough]];
    default:
      throw ParseError("not a scalar: " + j.dump());
  }
}

Value value_from_json(const Json& j) {
  if (!j.is_array()) return scalar_from_json(j);
  Array a;
  for (const auto& e : j) a.push_back(scalar_from_json(e));
  return a;
}

Json to_json(const ExprPtr& e) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ColRef>) {
          return {{"col", x.name}};
        } else if constexpr (std::is_same_v<T, Literal>) {
          return {{"lit", to_json(x.value)}};
        } else {
          Json args = Json::array();
          for (const auto& a : x.args) args.push_back(to_json(a));
          return {{"fn", fn_to(x.fn)}, {"args", args}};
        }
      },
      e->node);
}

ExprPtr expr_from_json(const Json& j) {
  return guarded("expression", [&]() -> ExprPtr {
    if (j.is_string()) return col(j.get<std::string>());
    if (!j.is_object()) return lit(scalar_from_json(j));
    if (j.contains("col")) return col(j["col"].get<std::string>());
    if (j.contains("lit")) return lit(scalar_from_json(j["lit"]));
    std::vector<ExprPtr> args;
    for (const auto& a : field(j, "args")) args.push_back(expr_from_json(a));
    return apply(fn_from(field(j, "fn")), std::move(args));
  });
}

Json to_json(const PredPtr& p) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstPred>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return {{"cmp", cmp_symbol(x.op)}, {"lhs", to_json(x.lhs)}, {"rhs", to_json(x.rhs)}};
        } else if constexpr (std::is_same_v<T, NotPred>) {
          return {{"not", to_json(x.inner)}};
        } else {
          Json parts = Json::array();
          for (const auto& q : x.parts) parts.push_back(to_json(q));
          return {{std::is_same_v<T, AndPred> ? "and" : "or", parts}};
        }
      },
      p->node);
}

PredPtr pred_from_json(const Json& j) {
  return guarded("predicate", [&]() -> PredPtr {
    if (j.is_boolean()) return p_const(j.get<bool>());
    if (j.contains("cmp"))
      return p_cmp(parse_cmp(j["cmp"].get<std::string>()), expr_from_json(field(j, "lhs")),
                   expr_from_json(field(j, "rhs")));
    if (j.contains("not")) return p_not(pred_from_json(j["not"]));
    for (const char* key : {"and", "or"}) {
      if (!j.contains(key)) continue;
      std::vector<PredPtr> parts;
      for (const auto& q : j[key]) parts.push_back(pred_from_json(q));
      return key[0] == 'a' ? p_and(std::move(parts)) : p_or(std::move(parts));
    }
    throw ParseError("not a predicate: " + j.dump());
  });
}

Json to_json(const TermPtr& t) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RelVar>) {
          return {{"op", "rel"}, {"name", x.name}};
        } else if constexpr (std::is_same_v<T, Join>) {
          return {{"op", "join"}, {"left", to_json(x.left)}, {"right", to_json(x.right)}};
        } else if constexpr (std::is_same_v<T, Filter>) {
          return {{"op", "filter"}, {"pred", to_json(x.pred)}, {"input", to_json(x.input)}};
        } else if constexpr (std::is_same_v<T, Project>) {
          return {{"op", "project"}, {"columns", x.columns}, {"input", to_json(x.input)}};
        } else if constexpr (std::is_same_v<T, ArrayFilter>) {
          return {{"op", "arrayFilter"},
                  {"targets", targets_to(x.targets)},
                  {"pred", to_json(x.pred)},
                  {"input", to_json(x.input)}};
        } else if constexpr (std::is_same_v<T, ArrayJoin>) {
          return {{"op", "arrayJoin"}, {"targets", targets_to(x.targets)}, {"input", to_json(x.input)}};
        } else if constexpr (std::is_same_v<T, Derive>) {
          return {{"op", "derive"},
                  {"output", x.output},
                  {"fn", fn_to(x.fn)},
                  {"inputs", x.inputs},
                  {"input", to_json(x.input)}};
        } else {
          Json aggs = Json::array();
          for (const auto& a : x.aggs) {
            Json spec = {{"fn", agg_name(a.fn)}, {"inputs", a.inputs}, {"alias", a.alias}};
            if (a.for_each) spec["for_each"] = true;
            aggs.push_back(spec);
          }
          return {{"op", "aggregate"}, {"group_by", x.group_by}, {"aggs", aggs}, {"input", to_json(x.input)}};
        }
      },
      t->node);
}

TermPtr term_from_json(const Json& j) {
  return guarded("term", [&]() -> TermPtr {
    auto op = field(j, "op").get<std::string>();
    if (op == "rel") return rel(field(j, "name").get<std::string>());
    if (op == "join") return join(term_from_json(field(j, "left")), term_from_json(field(j, "right")));
    auto input = term_from_json(field(j, "input"));
    if (op == "filter") return filter(input, pred_from_json(field(j, "pred")));
    if (op == "project") return project(input, string_set(field(j, "columns")));
    if (op == "arrayFilter")
      return array_filter(input, targets_from(field(j, "targets")), pred_from_json(field(j, "pred")));
    if (op == "arrayJoin") return array_join(input, targets_from(field(j, "targets")));
    if (op == "derive")
      return derive(input, field(j, "output").get<std::string>(), fn_from(field(j, "fn")),
                    field(j, "inputs").get<std::vector<std::string>>());
    if (op == "aggregate") {
      std::vector<AggSpec> aggs;
      for (const auto& a : field(j, "aggs")) {
        AggFn fn;
        try {
          fn = parse_agg(field(a, "fn").get<std::string>());
        } catch (const SchemaError& e) {
          throw ParseError(e.what());
        }
        aggs.push_back(AggSpec{fn, get_or(a, "inputs", std::vector<std::string>{}),
                               field(a, "alias").get<std::string>(), get_or(a, "for_each", false)});
      }
      return aggregate(input, string_set(get_or(j, "group_by", Json::array())), std::move(aggs));
    }
    throw ParseError("unknown operator '" + op + "'");
  });
}

Json to_json(const Catalog& c) {
  Json out = Json::object();
  for (const auto& [name, info] : c) {
    Json r = {{"scalars", info.schema.scalars}, {"arrays", info.schema.arrays}};
    if (!info.correspondences.empty()) {
      r["correspondences"] = Json::array();
      auto qualify = [&](const std::string& col) {
        if (info.schema.is_array(col)) return col;
        for (const auto& [other, o] : c)
          if (o.schema.is_array(col)) return other + "." + col;
        return col;
      };
      for (const auto& [a, b] : info.correspondences) r["correspondences"].push_back({qualify(a), qualify(b)});
    }
    out[name] = r;
  }
  return out;
}

Catalog catalog_from_json(const Json& j) {
  return guarded("catalog", [&] {
    if (!j.is_object()) throw ParseError("catalog must be an object of relations");
    Catalog c;
    for (const auto& [name, r] : j.items()) {
      RelationInfo info;
      info.schema.scalars = string_set(get_or(r, "scalars", Json::array()));
      info.schema.arrays = string_set(get_or(r, "arrays", Json::array()));
      for (const auto& s : info.schema.scalars)
        if (info.schema.arrays.count(s)) throw ParseError("column '" + s + "' of " + name + " is scalar and array");
      c[name] = std::move(info);
    }
    // Correspondences name array columns of the relation; "S.c" names an
    // array column of another relation (arrays aligned across a join).
    for (const auto& [name, r] : j.items()) {
      for (const auto& p : get_or(r, "correspondences", Json::array())) {
        std::vector<std::string> cols;
        for (const auto& side : {p.at(0), p.at(1)}) {
          auto col = side.get<std::string>();
          std::string owner = name;
          if (auto dot = col.find('.'); dot != std::string::npos && c.count(col.substr(0, dot))) {
            owner = col.substr(0, dot);
            col = col.substr(dot + 1);
          }
          if (!c.at(owner).schema.is_array(col))
            throw ParseError("correspondence of " + name + " names " + owner + "." + col + ", which is not an array column");
          cols.push_back(col);
        }
        c[name].correspondences.emplace_back(cols[0], cols[1]);
      }
    }
    return c;
  });
}

Json to_json(const ColumnStats& s) { return stats_to(s); }

ColumnStats column_stats_from_json(const Json& j) { return guarded("column stats", [&] { return stats_from(j); }); }

Json to_json(const StatsCatalog& s) {
  Json tables = Json::object();
  for (const auto& [name, t] : s.tables) {
    Json cols = Json::object();
    for (const auto& [c, cs] : t.columns) cols[c] = stats_to(cs);
    tables[name] = {{"row_count", t.row_count}, {"columns", cols}};
  }
  Json out = {{"a3d_stats", 1}, {"tables", tables}};
  if (!s.cost_overrides.empty()) out["cost_overrides"] = s.cost_overrides;
  return out;
}

StatsCatalog stats_from_json(const Json& j) {
  return guarded("stats", [&] {
    // A data document is summarised on load.
    if (j.contains("a3d_data")) return build_stats(database_from_json(j));
    if (get_or(j, "a3d_stats", 0) != 1) throw ParseError("stats document needs \"a3d_stats\": 1");
    StatsCatalog s;
    for (const auto& [name, t] : field(j, "tables").items()) {
      TableStats ts;
      ts.row_count = field(t, "row_count").get<int64_t>();
      const Json cols = get_or(t, "columns", Json::object());
      for (const auto& [c, cs] : cols.items()) ts.columns[c] = stats_from(cs);
      s.tables[name] = std::move(ts);
    }
    s.cost_overrides = get_or(j, "cost_overrides", std::map<std::string, double>{});
    return s;
  });
}

Json to_json(const Database& db) {
  Json rels = Json::object();
  for (const auto& [name, r] : db) {
    Json rows = Json::array();
    for (const auto& t : r.rows) {
      Json row = Json::object();
      for (const auto& [c, v] : t) row[c] = to_json(v);
      rows.push_back(row);
    }
    rels[name] = {{"scalars", r.schema.scalars}, {"arrays", r.schema.arrays}, {"rows", rows}};
  }
  return {{"a3d_data", 1}, {"relations", rels}};
}

Database database_from_json(const Json& j) {
  return guarded("data", [&] {
    if (get_or(j, "a3d_data", 0) != 1) throw ParseError("data document needs \"a3d_data\": 1");
    Database db;
    for (const auto& [name, r] : field(j, "relations").items()) {
      Relation rel;
      rel.schema.scalars = string_set(get_or(r, "scalars", Json::array()));
      rel.schema.arrays = string_set(get_or(r, "arrays", Json::array()));
      for (const auto& row : get_or(r, "rows", Json::array())) {
        Tuple t;
        for (const auto& [c, v] : row.items()) t[c] = value_from_json(v);
        rel.rows.push_back(std::move(t));
      }
      try {
        validate(rel);
      } catch (const SchemaError& e) {
        throw ParseError(std::string("relation ") + name + ": " + e.what());
      }
      db[name] = std::move(rel);
    }
    return db;
  });
}

GenSpec genspec_from_json(const Json& j) {
  return guarded("generator spec", [&] {
    GenSpec g;
    g.rows = field(j, "rows").get<size_t>();
    g.seed = get_or<uint64_t>(j, "seed", 0);
    for (const auto& c : field(j, "columns")) {
      ColumnSpec col;
      col.name = field(c, "name").get<std::string>();
      auto type = get_or<std::string>(c, "type", "int");
      if (type == "int") col.type = ValueType::kInt;
      else if (type == "double") col.type = ValueType::kDouble;
      else if (type == "text") col.type = ValueType::kText;
      else throw ParseError("unknown column type '" + type + "'");
      const Json values = get_or(c, "values", Json::object());
      auto kind = get_or<std::string>(values, "kind", "uniform");
      if (kind == "uniform") col.values.kind = Distribution::Kind::kUniform;
      else if (kind == "zipf") col.values.kind = Distribution::Kind::kZipf;
      else if (kind == "normal") col.values.kind = Distribution::Kind::kNormal;
      else throw ParseError("unknown distribution '" + kind + "'");
      col.values.ndv = get_or(values, "ndv", col.values.ndv);
      col.values.skew = get_or(values, "skew", col.values.skew);
      col.values.mean = get_or(values, "mean", col.values.mean);
      col.values.stddev = get_or(values, "stddev", col.values.stddev);
      col.values.offset = get_or(values, "offset", col.values.offset);
      col.null_prob = get_or(c, "null_prob", 0.0);
      col.array = get_or(c, "array", false);
      col.min_len = get_or(c, "min_len", col.min_len);
      col.max_len = get_or(c, "max_len", col.max_len);
      col.empty_prob = get_or(c, "empty_prob", 0.0);
      col.dup_prob = get_or(c, "dup_prob", 0.0);
      col.same_length_as = get_or<std::string>(c, "same_length_as", "");
      g.columns.push_back(std::move(col));
    }
    return g;
  });
}

Json to_json(const PlanDocument& doc) {
  return {{"a3d_plan", 1}, {"catalog", to_json(doc.catalog)}, {"term", to_json(doc.term)},
          {"options", options_to(doc.options)}};
}

PlanDocument plan_from_json(const Json& j) {
  return guarded("plan", [&] {
    if (!j.is_object() || get_or(j, "a3d_plan", 0) != 1) throw ParseError("plan document needs \"a3d_plan\": 1");
    PlanDocument doc;
    doc.catalog = catalog_from_json(field(j, "catalog"));
    doc.term = term_from_json(field(j, "term"));
    doc.options = options_from(get_or(j, "options", Json::object()));
    return doc;
  });
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace a3d
