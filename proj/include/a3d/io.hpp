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

#include <string>

#include "a3d/planner.hpp"
#include "a3d/relation.hpp"
#include "a3d/stats.hpp"
#include "a3d/term.hpp"
#include "a3d/testkit.hpp"
#include "json.hpp"

namespace a3d {

using Json = nlohmann::json;

// JSON encodings. Readers throw ParseError on malformed input.
Json to_json(const Scalar& v);
Json to_json(const Value& v);
Json to_json(const ExprPtr& e);
Json to_json(const PredPtr& p);
Json to_json(const TermPtr& t);
Json to_json(const Catalog& c);
Json to_json(const ColumnStats& s);
Json to_json(const StatsCatalog& s);
Json to_json(const Database& db);

Scalar scalar_from_json(const Json& j);
Value value_from_json(const Json& j);
ExprPtr expr_from_json(const Json& j);
PredPtr pred_from_json(const Json& j);
TermPtr term_from_json(const Json& j);
Catalog catalog_from_json(const Json& j);
ColumnStats column_stats_from_json(const Json& j);
StatsCatalog stats_from_json(const Json& j);
Database database_from_json(const Json& j);

/// {"rows": N, "seed": s, "columns": [{"name": "x", "type": "int",
/// "values": {"kind": "zipf", "ndv": 100, "skew": 1.2}, "array": true, ...}]}
GenSpec genspec_from_json(const Json& j);

/// {"a3d_plan": 1, "catalog": ..., "term": ..., "options": {...}}
struct PlanDocument {
  Catalog catalog;
  TermPtr term;
  PlannerOptions options;
};

Json to_json(const PlanDocument& doc);
PlanDocument plan_from_json(const Json& j);

/// Parses text; syntax errors become ParseError.
Json parse_json(const std::string& text);
std::string read_file(const std::string& path);

}  // namespace a3d
