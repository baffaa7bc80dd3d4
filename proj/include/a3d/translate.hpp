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
#include <string>

#include "a3d/stats.hpp"
#include "a3d/term.hpp"

namespace a3d {

/// Surface syntax of a SQL engine. Function and aggregate templates use
/// {0}, {1}, ... for arguments and {p0}, {p1}, ... for bound parameters; a
/// missing entry means the dialect cannot express that function.
struct SqlDialect {
  enum class Arrays { kClickHouse, kStandard };

  std::string name;
  Arrays arrays = Arrays::kClickHouse;
  char quote = '"';
  std::string not_equal = "!=";
  std::map<std::string, std::string> functions;
  std::map<std::string, std::string> aggregates;  // "count*" for count(*)
  std::map<std::string, std::string> for_each;    // element-wise array aggregates
  // Higher-order array functions taking a lambda (ClickHouse only).
  std::string filter_fn = "arrayFilter";
  std::string map_fn = "arrayMap";
};

const SqlDialect& clickhouse_dialect();
const SqlDialect& generic_dialect();
/// "clickhouse" or "generic"; throws DialectError otherwise.
const SqlDialect& dialect_by_name(const std::string& name);

struct SqlOptions {
  bool cte = false;  // WITH t0 AS (...) instead of nested subqueries
};

/// Deterministic SQL text for a schema-checked term. Throws DialectError
/// for constructs the dialect lacks.
std::string to_sql(const TermPtr& t, const Catalog& catalog, const SqlDialect& dialect, SqlOptions options = {});

/// Graphviz rendering, one node per operator, edges child -> parent. With a
/// model, labels carry estimated rows and cost.
std::string to_dot(const TermPtr& t, CostModel* model = nullptr);

}  // namespace a3d
