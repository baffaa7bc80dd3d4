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

#include "a3d/eval.hpp"

#include <map>

#include "a3d/errors.hpp"

namespace a3d {

namespace {

struct KeyLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
      auto c = total_order(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return a.size() < b.size();
  }
};

using KeyMap = std::map<std::vector<Value>, std::vector<size_t>, KeyLess>;

std::vector<Value> key_of(const Tuple& t, const std::vector<std::string>& cols) {
  std::vector<Value> key;
  key.reserve(cols.size());
  for (const auto& c : cols) key.push_back(t.at(c));
  return key;
}

size_t common_length(const Tuple& t, const std::vector<Target>& targets, const char* op) {
  size_t len = std::get<Array>(t.at(targets[0].source)).size();
  for (const auto& tg : targets)
    if (std::get<Array>(t.at(tg.source)).size() != len)
      throw EvalError(std::string(op) + " over arrays of unequal length (" + targets[0].source + ", " + tg.source +
                      ")");
  return len;
}

class Evaluator {
 public:
  Evaluator(const Database& db, Semantics mode) : db_(db), env_(catalog_), mode_(mode) {
    for (const auto& [name, r] : db) catalog_[name].schema = r.schema;
  }

  Relation run(const TermPtr& t) {
    Relation out = step(t);
    if (mode_ == Semantics::kSet) dedup(out);
    return out;
  }

 private:
  Relation step(const TermPtr& t) {
    Relation out;
    out.schema = env_.schema(t);
    std::visit([&](const auto& x) { apply(x, out); }, t->node);
    return out;
  }

  void apply(const RelVar& x, Relation& out) {
    auto it = db_.find(x.name);
    if (it == db_.end()) throw EvalError("unbound relation variable '" + x.name + "'");
    out.rows = it->second.rows;
  }

  void apply(const Join& x, Relation& out) {
    Relation l = run(x.left), r = run(x.right);
    std::vector<std::string> shared;
    for (const auto& c : l.schema.columns())
      if (r.schema.has(c)) shared.push_back(c);
    KeyMap index;
    for (size_t i = 0; i < r.rows.size(); ++i) index[key_of(r.rows[i], shared)].push_back(i);
    for (const auto& lt : l.rows) {
      auto it = index.find(key_of(lt, shared));
      if (it == index.end()) continue;
      for (size_t i : it->second) {
        Tuple t = lt;
        for (const auto& [c, v] : r.rows[i]) t.emplace(c, v);
        out.rows.push_back(std::move(t));
      }
    }
  }

  void apply(const Filter& x, Relation& out) {
    Relation in = run(x.input);
    for (auto& t : in.rows)
      if (eval_pred(x.pred, t)) out.rows.push_back(std::move(t));
  }

  void apply(const Project& x, Relation& out) {
    Relation in = run(x.input);
    out.rows.reserve(in.rows.size());
    for (const auto& t : in.rows) {
      Tuple p;
      for (const auto& c : x.columns) p.emplace(c, t.at(c));
      out.rows.push_back(std::move(p));
    }
  }

  static Tuple strip(const Tuple& t, const std::vector<Target>& targets) {
    Tuple base = t;
    for (const auto& tg : targets) {
      base.erase(tg.source);
      base.erase(tg.alias);
    }
    return base;
  }

  void apply(const ArrayFilter& x, Relation& out) {
    Relation in = run(x.input);
    for (const auto& t : in.rows) {
      size_t len = common_length(t, x.targets, "arrayFilter");
      std::vector<Array> kept(x.targets.size());
      Tuple elem;
      for (size_t j = 0; j < len; ++j) {
        for (const auto& tg : x.targets) elem[tg.alias] = std::get<Array>(t.at(tg.source))[j];
        if (!eval_pred(x.pred, elem)) continue;
        for (size_t i = 0; i < x.targets.size(); ++i)
          kept[i].push_back(std::get<Array>(t.at(x.targets[i].source))[j]);
      }
      Tuple r = strip(t, x.targets);
      for (size_t i = 0; i < x.targets.size(); ++i) r[x.targets[i].alias] = std::move(kept[i]);
      out.rows.push_back(std::move(r));
    }
  }

  void apply(const ArrayJoin& x, Relation& out) {
    Relation in = run(x.input);
    for (const auto& t : in.rows) {
      size_t len = common_length(t, x.targets, "arrayJoin");
      Tuple base = strip(t, x.targets);
      for (size_t j = 0; j < len; ++j) {
        Tuple r = base;
        for (const auto& tg : x.targets) r[tg.alias] = std::get<Array>(t.at(tg.source))[j];
        out.rows.push_back(std::move(r));
      }
    }
  }

  void apply(const Derive& x, Relation& out) {
    Relation in = run(x.input);
    std::vector<Value> args(x.inputs.size());
    for (auto& t : in.rows) {
      for (size_t i = 0; i < x.inputs.size(); ++i) args[i] = t.at(x.inputs[i]);
      t[x.output] = apply_fn(x.fn, args);
      out.rows.push_back(std::move(t));
    }
  }

  void apply(const Aggregate& x, Relation& out) {
    Relation in = run(x.input);
    std::vector<std::string> keys(x.group_by.begin(), x.group_by.end());
    KeyMap groups;
    for (size_t i = 0; i < in.rows.size(); ++i) groups[key_of(in.rows[i], keys)].push_back(i);
    std::vector<Value> column;
    for (const auto& [key, members] : groups) {
      Tuple r;
      for (size_t k = 0; k < keys.size(); ++k) r[keys[k]] = key[k];
      for (const auto& a : x.aggs) {
        column.clear();
        for (size_t i : members)
          column.push_back(a.inputs.empty() ? Value{Scalar{true}} : in.rows[i].at(a.inputs[0]));
        r[a.alias] = a.for_each ? aggregate_for_each(a.fn, column) : aggregate(a.fn, column);
      }
      out.rows.push_back(std::move(r));
    }
  }

  const Database& db_;
  Catalog catalog_;
  TypeEnv env_;
  Semantics mode_;
};

}  // namespace

Relation eval(const TermPtr& term, const Database& db, Semantics mode) { return Evaluator(db, mode).run(term); }

}  // namespace a3d
