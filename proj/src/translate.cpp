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


#include "a3d/translate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "a3d/errors.hpp"

namespace a3d {

namespace {

SqlDialect make_clickhouse() {
  SqlDialect d;
  d.name = "clickhouse";
  d.arrays = SqlDialect::Arrays::kClickHouse;
  d.quote = '`';
  d.functions = {
      {"id", "{0}"},
      {"neg", "(-{0})"},
      {"double", "(2 * {0})"},
      {"affine", "({p0} * {0} + {p1})"},
      {"abs", "abs({0})"},
      {"add", "({0} + {1})"},
      {"sub", "({0} - {1})"},
      {"mul", "({0} * {1})"},
      {"div", "if({1} = 0, NULL, {0} / {1})"},
      {"cast_float", "toFloat64({0})"},
      {"strlen", "lengthUTF8({0})"},
      {"concat", "concat({0}, {1})"},
      {"length", "length({0})"},
      {"arrayEnumerate", "arrayEnumerate({0})"},
      {"arraySum", "arraySum({0})"},
      {"arrayMin", "arrayMin({0})"},
      {"arrayMax", "arrayMax({0})"},
  };
  d.aggregates = {
      {"min", "min({0})"},
      {"max", "max({0})"},
      {"count", "count({0})"},
      {"count*", "count()"},
      {"sum", "sum({0})"},
      {"avg", "avg({0})"},
      {"distinct", "groupUniqArray({0})"},
      {"distinctMerge", "groupUniqArrayArray({0})"},
  };
  d.for_each = {
      {"min", "minForEach({0})"},
      {"max", "maxForEach({0})"},
      {"count", "countForEach({0})"},
      {"sum", "sumForEach({0})"},
  };
  return d;
}

SqlDialect make_generic() {
  SqlDialect d;
  d.name = "generic";
  d.arrays = SqlDialect::Arrays::kStandard;
  d.quote = '"';
  d.not_equal = "<>";
  d.functions = {
      {"id", "{0}"},
      {"neg", "(-{0})"},
      {"double", "(2 * {0})"},
      {"affine", "({p0} * {0} + {p1})"},
      {"abs", "ABS({0})"},
      {"add", "({0} + {1})"},
      {"sub", "({0} - {1})"},
      {"mul", "({0} * {1})"},
      {"div", "(CASE WHEN {1} = 0 THEN NULL ELSE CAST({0} AS DOUBLE PRECISION) / {1} END)"},
      {"cast_float", "CAST({0} AS DOUBLE PRECISION)"},
      {"strlen", "CHAR_LENGTH({0})"},
      {"concat", "({0} || {1})"},
      {"length", "CARDINALITY({0})"},
      {"arrayEnumerate", "ARRAY(SELECT _o FROM UNNEST({0}) WITH ORDINALITY AS _e(_v, _o) ORDER BY _o)"},
      {"arraySum", "(SELECT SUM(_v) FROM UNNEST({0}) AS _e(_v))"},
      {"arrayMin", "(SELECT MIN(_v) FROM UNNEST({0}) AS _e(_v))"},
      {"arrayMax", "(SELECT MAX(_v) FROM UNNEST({0}) AS _e(_v))"},
  };
  d.aggregates = {
      {"min", "MIN({0})"},
      {"max", "MAX({0})"},
      {"count", "COUNT({0})"},
      {"count*", "COUNT(*)"},
      {"sum", "SUM({0})"},
      {"avg", "AVG({0})"},
      {"distinct", "ARRAY_AGG(DISTINCT {0})"},
  };
  return d;
}

const std::set<std::string> kReserved = {
    "all",   "and",  "array", "as",    "by",    "case",  "cross", "distinct", "else",  "end",
    "false", "from", "full",  "group", "having", "in",   "inner", "is",       "join",  "left",
    "limit", "not",  "null",  "on",    "or",    "order", "right", "select",   "table", "then",
    "true",  "union", "using", "values", "when", "where", "with"};

bool plain(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return !kReserved.count(lower);
}

std::string join_list(const std::vector<std::string>& items, const std::string& sep = ", ") {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string fill(const std::string& tmpl, const std::vector<std::string>& args, const std::vector<std::string>& params) {
  std::string out;
  for (size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '{') {
      out += tmpl[i];
      continue;
    }
    size_t close = tmpl.find('}', i);
    std::string key = tmpl.substr(i + 1, close - i - 1);
    bool param = key[0] == 'p';
    size_t k = std::stoul(param ? key.substr(1) : key);
    const auto& src = param ? params : args;
    if (k >= src.size()) throw DialectError("template '" + tmpl + "' needs more arguments");
    out += src[k];
    i = close;
  }
  return out;
}

class Writer {
 public:
  Writer(const Catalog& catalog, const SqlDialect& d, SqlOptions o) : types_(catalog), d_(d), o_(o) {}

  std::string run(const TermPtr& t) {
    std::string body = select(t);
    if (!o_.cte || ctes_.empty()) return body;
    std::string out = "WITH ";
    for (size_t i = 0; i < ctes_.size(); ++i) out += (i ? ",\n     " : "") + ctes_[i].first + " AS (" + ctes_[i].second + ")";
    return out + "\n" + body;
  }

 private:
  struct Source {
    std::string from;
    std::string qualifier;
  };

  bool clickhouse() const { return d_.arrays == SqlDialect::Arrays::kClickHouse; }

  std::string ident(const std::string& s) const {
    if (plain(s)) return s;
    std::string out(1, d_.quote);
    for (char c : s) {
      if (c == d_.quote) out += c;
      out += c;
    }
    return out + d_.quote;
  }

  std::string literal(const Scalar& v) const {
    return std::visit(
        [&](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Null>) {
            return "NULL";
          } else if constexpr (std::is_same_v<T, bool>) {
            return x ? "true" : "false";
          } else if constexpr (std::is_same_v<T, int64_t>) {
            return std::to_string(x);
          } else if constexpr (std::is_same_v<T, double>) {
            if (!std::isfinite(x)) {
              std::string word = std::isnan(x) ? "nan" : x > 0 ? "inf" : "-inf";
              return clickhouse() ? word : "CAST('" + word + "' AS DOUBLE PRECISION)";
            }
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, x);
            std::string s(buf, res.ptr);
            if (s.find_first_of(".e") == std::string::npos) s += ".0";
            return s;
          } else {
            std::string out = "'";
            for (char c : x) {
              if (c == '\'') out += '\'';
              if (c == '\\' && clickhouse()) out += '\\';
              out += c;
            }
            return out + "'";
          }
        },
        v);
  }

  std::string function(const FnRef& fn, const std::vector<std::string>& args) const {
    auto it = d_.functions.find(fn.name);
    if (it == d_.functions.end()) throw DialectError("dialect " + d_.name + " has no function '" + fn.name + "'");
    std::vector<std::string> params;
    for (const auto& p : fn.params) params.push_back(literal(p));
    return fill(it->second, args, params);
  }

  // f lifted over the array arguments (flags mark which ones are arrays).
  std::string mapped(const FnRef& fn, const std::vector<std::string>& args, const std::vector<bool>& is_array) {
    FnRef scalar = fn;
    scalar.map = false;
    std::vector<std::string> vars, arrays, inner;
    for (size_t i = 0; i < args.size(); ++i) {
      if (is_array[i]) {
        std::string v = "_x" + std::to_string(vars.size());
        vars.push_back(v);
        arrays.push_back(args[i]);
        inner.push_back(clickhouse() ? v : "_m." + v);
      } else {
        inner.push_back(args[i]);
      }
    }
    std::string body = function(scalar, inner);
    if (clickhouse()) {
      std::string lambda = vars.size() == 1 ? vars[0] : "(" + join_list(vars) + ")";
      return d_.map_fn + "(" + lambda + " -> " + body + ", " + join_list(arrays) + ")";
    }
    vars.push_back("_o");
    return "ARRAY(SELECT " + body + " FROM UNNEST(" + join_list(arrays) + ") WITH ORDINALITY AS _m(" +
           join_list(vars) + ") ORDER BY _m._o)";
  }

  std::string expr(const ExprPtr& e) {
    return std::visit(
        [&](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ColRef>) {
            return ident(x.name);
          } else if constexpr (std::is_same_v<T, Literal>) {
            return literal(x.value);
          } else {
            std::vector<std::string> args;
            for (const auto& a : x.args) args.push_back(expr(a));
            if (x.fn.map) return mapped(x.fn, args, std::vector<bool>(args.size(), true));
            return function(x.fn, args);
          }
        },
        e->node);
  }

  std::string pred(const PredPtr& p) {
    return std::visit(
        [&](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ConstPred>) {
            return x.value ? "true" : "false";
          } else if constexpr (std::is_same_v<T, Compare>) {
            std::string op = x.op == CmpOp::kNe ? d_.not_equal : cmp_symbol(x.op);
            return expr(x.lhs) + " " + op + " " + expr(x.rhs);
          } else if constexpr (std::is_same_v<T, NotPred>) {
            return "(NOT " + pred(x.inner) + ")";
          } else {
            std::vector<std::string> parts;
            for (const auto& q : x.parts) parts.push_back(pred(q));
            std::string sep = std::is_same_v<T, AndPred> ? " AND " : " OR ";
            return "(" + join_list(parts, sep) + ")";
          }
        },
        p->node);
  }

  Source source(const TermPtr& t) {
    if (const auto* r = t->as<RelVar>()) return {ident(r->name), ident(r->name)};
    return wrap(select(t));
  }

  Source wrap(const std::string& sub) {
    std::string alias = "t" + std::to_string(next_++);
    if (o_.cte) {
      ctes_.emplace_back(alias, sub);
      return {alias, alias};
    }
    return {"(" + sub + ") AS " + alias, alias};
  }

  std::vector<std::string> columns(const TermPtr& t) {
    const auto cols = types_.schema(t).columns();
    return {cols.begin(), cols.end()};
  }

  std::vector<std::string> idents(const std::vector<std::string>& cols) const {
    std::vector<std::string> out;
    for (const auto& c : cols) out.push_back(ident(c));
    return out;
  }

  std::string select(const TermPtr& t) {
    return std::visit([&](const auto& x) { return render(t, x); }, t->node);
  }

  std::string render(const TermPtr& t, const RelVar& r) {
    return "SELECT " + join_list(idents(columns(t))) + " FROM " + ident(r.name);
  }

  std::string render(const TermPtr& t, const Filter& f) {
    Source s = source(f.input);
    return "SELECT " + join_list(idents(columns(t))) + " FROM " + s.from + " WHERE " + pred(f.pred);
  }

  std::string render(const TermPtr& t, const Project& p) {
    Source s = source(p.input);
    return "SELECT " + join_list(idents(columns(t))) + " FROM " + s.from;
  }

  std::string render(const TermPtr& t, const Join& j) {
    Source l = source(j.left);
    Source r = source(j.right);
    const auto& ls = types_.schema(j.left);
    std::vector<std::string> shared;
    for (const auto& c : types_.schema(j.right).columns())
      if (ls.has(c)) shared.push_back(ident(c));
    std::string out = "SELECT " + join_list(idents(columns(t))) + " FROM " + l.from;
    if (shared.empty()) return out + " CROSS JOIN " + r.from;
    return out + " INNER JOIN " + r.from + " USING (" + join_list(shared) + ")";
  }

  // One SELECT over `from` producing `cols`, where `computed` maps some
  // columns to expressions. ClickHouse resolves SELECT aliases inside the
  // same SELECT and lets them shadow source columns, so when a computed name
  // is also an input column it is produced as a synthetic _vK first and
  // renamed one level up.
  std::string assign(const std::vector<std::string>& cols, const std::map<std::string, std::string>& computed,
                     Source from, const std::set<std::string>& inputs, const std::string& tail = "") {
    bool shadow = clickhouse() && std::any_of(computed.begin(), computed.end(),
                                              [&](const auto& kv) { return inputs.count(kv.first) > 0; });
    if (!shadow) {
      std::vector<std::string> items;
      for (const auto& c : cols) {
        auto it = computed.find(c);
        items.push_back(it == computed.end() ? ident(c) : it->second + " AS " + ident(c));
      }
      return "SELECT " + join_list(items) + " FROM " + from.from + tail;
    }
    std::map<std::string, std::string> synthetic;
    std::vector<std::string> inner;
    for (const auto& c : cols) {
      auto it = computed.find(c);
      if (it == computed.end()) {
        inner.push_back(ident(c));
      } else {
        synthetic[c] = "_v" + std::to_string(next_value_++);
        inner.push_back(it->second + " AS " + synthetic[c]);
      }
    }
    Source mid = wrap("SELECT " + join_list(inner) + " FROM " + from.from + tail);
    std::vector<std::string> outer;
    for (const auto& c : cols) outer.push_back(synthetic.count(c) ? synthetic[c] + " AS " + ident(c) : ident(c));
    return "SELECT " + join_list(outer) + " FROM " + mid.from;
  }

  std::string render(const TermPtr& t, const Derive& d) {
    Source s = source(d.input);
    const auto& in = types_.schema(d.input);
    std::vector<std::string> args;
    std::vector<bool> arrays;
    for (const auto& c : d.inputs) {
      args.push_back(ident(c));
      arrays.push_back(in.is_array(c));
    }
    std::string value = d.fn.map ? mapped(d.fn, args, arrays) : function(d.fn, args);
    return assign(columns(t), {{d.output, value}}, s, in.columns());
  }

  std::string render(const TermPtr& t, const ArrayJoin& m) {
    Source s = source(m.input);
    std::map<std::string, std::string> alias_of;
    for (const auto& tg : m.targets) alias_of[tg.alias] = tg.source;
    if (clickhouse()) {
      std::vector<std::string> clause;
      for (const auto& tg : m.targets)
        clause.push_back(tg.alias == tg.source ? ident(tg.source) : ident(tg.source) + " AS " + ident(tg.alias));
      return "SELECT " + join_list(idents(columns(t))) + " FROM " + s.from + " ARRAY JOIN " + join_list(clause);
    }
    std::string u = "_u" + std::to_string(next_unnest_++);
    std::vector<std::string> items, arrays, names;
    for (const auto& c : columns(t)) items.push_back((alias_of.count(c) ? u : s.qualifier) + "." + ident(c));
    for (const auto& tg : m.targets) {
      arrays.push_back(s.qualifier + "." + ident(tg.source));
      names.push_back(ident(tg.alias));
    }
    return "SELECT " + join_list(items) + " FROM " + s.from + " CROSS JOIN UNNEST(" + join_list(arrays) + ") AS " +
           u + "(" + join_list(names) + ")";
  }

  std::string render(const TermPtr& t, const ArrayFilter& f) {
    Source s = source(f.input);
    std::map<std::string, std::string> computed;
    std::vector<std::string> arrays;
    for (const auto& tg : f.targets) arrays.push_back(ident(tg.source));
    if (clickhouse()) {
      // Lambda parameters get synthetic names so they cannot meet a column.
      std::map<std::string, std::string> params;
      std::vector<std::string> names;
      for (size_t k = 0; k < f.targets.size(); ++k) {
        params[f.targets[k].alias] = "_e" + std::to_string(k);
        names.push_back(params[f.targets[k].alias]);
      }
      std::string cond = pred(rename_columns(f.pred, params));
      for (const auto& tg : f.targets) {
        if (f.targets.size() == 1) {
          computed[tg.alias] = d_.filter_fn + "(" + names[0] + " -> " + cond + ", " + arrays[0] + ")";
        } else {
          std::vector<std::string> lambda = names, args = arrays;
          lambda.insert(lambda.begin(), "_k");
          args.insert(args.begin(), ident(tg.source));
          computed[tg.alias] = d_.filter_fn + "((" + join_list(lambda) + ") -> " + cond + ", " + join_list(args) + ")";
        }
      }
    } else {
      std::string cond = pred(f.pred);
      std::vector<std::string> names;
      for (const auto& tg : f.targets) names.push_back(ident(tg.alias));
      names.push_back("_o");
      for (const auto& tg : f.targets)
        computed[tg.alias] = "ARRAY(SELECT _f." + ident(tg.alias) + " FROM UNNEST(" + join_list(arrays) +
                             ") WITH ORDINALITY AS _f(" + join_list(names) + ") WHERE " + cond + " ORDER BY _f._o)";
    }
    return assign(columns(t), computed, s, types_.schema(f.input).columns());
  }

  std::string render(const TermPtr&, const Aggregate& g) {
    Source s = source(g.input);
    std::vector<std::string> keys = idents({g.group_by.begin(), g.group_by.end()});
    std::vector<std::string> cols(g.group_by.begin(), g.group_by.end());
    std::map<std::string, std::string> computed;
    for (const auto& a : g.aggs) {
      std::string name = agg_name(a.fn);
      const auto& table = a.for_each ? d_.for_each : d_.aggregates;
      std::string key = a.inputs.empty() ? name + "*" : name;
      auto it = table.find(key);
      if (it == table.end())
        throw DialectError("dialect " + d_.name + " has no " + (a.for_each ? "element-wise " : "") + "aggregate '" +
                           name + "'");
      cols.push_back(a.alias);
      computed[a.alias] = fill(it->second, idents(a.inputs), {});
    }
    // An aggregate over no rows yields no rows.
    std::string tail = keys.empty() ? " HAVING " + d_.aggregates.at("count*") + " > 0" : " GROUP BY " + join_list(keys);
    return assign(cols, computed, s, types_.schema(g.input).columns(), tail);
  }

  TypeEnv types_;
  const SqlDialect& d_;
  SqlOptions o_;
  int next_ = 0;
  int next_unnest_ = 0;
  int next_value_ = 0;
  std::vector<std::pair<std::string, std::string>> ctes_;
};

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

const SqlDialect& clickhouse_dialect() {
  static const SqlDialect d = make_clickhouse();
  return d;
}

const SqlDialect& generic_dialect() {
  static const SqlDialect d = make_generic();
  return d;
}

const SqlDialect& dialect_by_name(const std::string& name) {
  if (name == "clickhouse") return clickhouse_dialect();
  if (name == "generic") return generic_dialect();
  throw DialectError("unknown SQL dialect '" + name + "'");
}

std::string to_sql(const TermPtr& t, const Catalog& catalog, const SqlDialect& dialect, SqlOptions options) {
  output_schema(t, catalog);
  return Writer(catalog, dialect, options).run(t);
}

std::string to_dot(const TermPtr& t, CostModel* model) {
  std::ostringstream out;
  out << "digraph plan {\n  node [shape=box, fontname=\"monospace\"];\n";
  int next = 0;
  std::function<int(const TermPtr&)> walk = [&](const TermPtr& n) {
    int id = next++;
    std::string label = op_symbol(n);
    std::string params = op_params(n);
    if (!params.empty()) label += "\\n" + dot_escape(params);
    if (model) {
      std::ostringstream ann;
      ann << "rows=" << model->cardinality(n) << " cost=" << model->cost(n);
      label += "\\n" + ann.str();
    }
    out << "  n" << id << " [label=\"" << label << "\"];\n";
    for (const auto& k : children(n)) {
      int child = walk(k);
      out << "  n" << child << " -> n" << id << ";\n";
    }
    return id;
  };
  walk(t);
  out << "}\n";
  return out.str();
}

}  // namespace a3d
