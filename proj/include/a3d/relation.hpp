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
#include <vector>

#include "a3d/term.hpp"
#include "a3d/value.hpp"

namespace a3d {

/// A relation is a schema plus a multiset of tuples (kept as a vector).
struct Relation {
  Schema schema;
  std::vector<Tuple> rows;
};

using Database = std::map<std::string, Relation>;

enum class Semantics { kBag, kSet };

/// Throws SchemaError if some row does not match the schema.
void validate(const Relation& r);

/// Sorts rows by the total value order.
void sort_rows(std::vector<Tuple>& rows);

/// Removes duplicate rows (the result is sorted).
void dedup(Relation& r);

/// Compares two relations under bag or set semantics. Schemas must agree.
bool relations_equal(const Relation& a, const Relation& b, Semantics mode = Semantics::kBag);

std::string to_string(const Tuple& t);
std::string to_string(const Relation& r);

/// Schema catalog of a database.
Catalog catalog_of(const Database& db);

}  // namespace a3d
