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

#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "a3d/functions.hpp"
#include "a3d/predicate.hpp"

namespace a3d {

/// Scalar and array columns of a relation; the two sets are disjoint.
struct Schema {
  std::set<std::string> scalars;
  std::set<std::string> arrays;

  bool has(const std::string& c) const { return scalars.count(c) || arrays.count(c); }
  bool is_array(const std::string& c) const { return arrays.count(c) > 0; }
  std::set<std::string> columns() const;
  void erase(const std::string& c) {
    scalars.erase(c);
    arrays.erase(c);
  }

  friend bool operator==(const Schema&, const Schema&) = default;
};

std::string to_string(const Schema& s);

struct RelationInfo {
  Schema schema;
  /// Pairs of array columns declared positionally corresponding.
  std::vector<std::pair<std::string, std::string>> correspondences;
};

using Catalog = std::map<std::string, RelationInfo>;

bool corresponds(const Catalog& catalog, const std::string& a, const std::string& b);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Target {
  std::string source;
  std::string alias;
  friend bool operator==(const Target&, const Target&) = default;
};

struct AggSpec {
  AggFn fn;
  std::vector<std::string> inputs;  // empty for count(*)
  std::string alias;
  bool for_each = false;
  friend bool operator==(const AggSpec&, const AggSpec&) = default;
};

struct RelVar {
  std::string name;
};
struct Join {
  TermPtr left;
  TermPtr right;
};
struct Filter {
  TermPtr input;
  PredPtr pred;
};
struct Project {
  TermPtr input;
  std::set<std::string> columns;
};
struct ArrayFilter {
  TermPtr input;
  std::vector<Target> targets;
  PredPtr pred;  // over target aliases, bound to elements
};
struct ArrayJoin {
  TermPtr input;
  std::vector<Target> targets;
};
struct Derive {
  TermPtr input;
  std::string output;
  FnRef fn;
  std::vector<std::string> inputs;
};
struct Aggregate {
  TermPtr input;
  std::set<std::string> group_by;
  std::vector<AggSpec> aggs;
};

struct Term {
  std::variant<RelVar, Join, Filter, Project, ArrayFilter, ArrayJoin, Derive, Aggregate> node;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

TermPtr rel(std::string name);
TermPtr join(TermPtr left, TermPtr right);
TermPtr filter(TermPtr input, PredPtr pred);
TermPtr project(TermPtr input, std::set<std::string> columns);
TermPtr array_filter(TermPtr input, std::vector<Target> targets, PredPtr pred);
TermPtr array_join(TermPtr input, std::vector<Target> targets);
TermPtr derive(TermPtr input, std::string output, FnRef fn, std::vector<std::string> inputs);
TermPtr aggregate(TermPtr input, std::set<std::string> group_by, std::vector<AggSpec> aggs);

/// Single-target shorthands (alias defaults to the source name).
TermPtr array_join(TermPtr input, const std::string& source, const std::string& alias = "");
TermPtr array_filter(TermPtr input, const std::string& source, const std::string& alias, PredPtr pred);

std::vector<TermPtr> children(const TermPtr& t);
TermPtr with_children(const TermPtr& t, const std::vector<TermPtr>& kids);
TermPtr with_input(const TermPtr& t, TermPtr input);

/// Structural equality.
bool same_term(const TermPtr& a, const TermPtr& b);

size_t operator_count(const TermPtr& t);
std::set<std::string> relation_names(const TermPtr& t);

/// Operator symbol for display: R, ⋈, σ, Π, φ, μ, δ, Γ.
std::string op_symbol(const TermPtr& t);
/// Operator parameters for display, e.g. "a:n" or "x > 3".
std::string op_params(const TermPtr& t);
std::string to_string(const TermPtr& t);

/// Computes the output schema, throwing SchemaError on any ill-typed node.
Schema output_schema(const TermPtr& t, const Catalog& catalog);

/// Memoizing schema oracle for repeated lookups over shared subterms.
class TypeEnv {
 public:
  explicit TypeEnv(const Catalog& catalog) : catalog_(catalog) {}
  const Schema& schema(const TermPtr& t);
  const Catalog& catalog() const { return catalog_; }

 private:
  const Catalog& catalog_;
  std::unordered_map<const Term*, std::pair<TermPtr, Schema>> cache_;
};

/// Columns read by the root operator (not its descendants).
std::set<std::string> columns_read(const TermPtr& t);

}  // namespace a3d
