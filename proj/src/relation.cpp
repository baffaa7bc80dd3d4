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

#include "a3d/relation.hpp"

#include <algorithm>

#include "a3d/errors.hpp"

namespace a3d {

void validate(const Relation& r) {
  for (const auto& row : r.rows) {
    if (row.size() != r.schema.scalars.size() + r.schema.arrays.size())
      throw SchemaError("row " + to_string(row) + " does not match schema " + to_string(r.schema));
    for (const auto& [c, v] : row) {
      if (!r.schema.has(c)) throw SchemaError("row has unknown column '" + c + "'");
      if (r.schema.is_array(c) != is_array(v))
        throw SchemaError("column '" + c + "' holds " + (is_array(v) ? "an array" : "a scalar") + " value");
    }
  }
}

namespace {

bool row_less(const Tuple& a, const Tuple& b) {
  auto i = a.begin();
  auto j = b.begin();
  for (; i != a.end() && j != b.end(); ++i, ++j) {
    if (i->first != j->first) return i->first < j->first;
    auto c = total_order(i->second, j->second);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

bool row_equal(const Tuple& a, const Tuple& b) { return !row_less(a, b) && !row_less(b, a); }

}  // namespace

void sort_rows(std::vector<Tuple>& rows) { std::sort(rows.begin(), rows.end(), row_less); }

void dedup(Relation& r) {
  sort_rows(r.rows);
  r.rows.erase(std::unique(r.rows.begin(), r.rows.end(), row_equal), r.rows.end());
}

bool relations_equal(const Relation& a, const Relation& b, Semantics mode) {
  if (!(a.schema == b.schema))
    throw SchemaError("comparing relations with schemas " + to_string(a.schema) + " and " + to_string(b.schema));
  Relation x = a, y = b;
  if (mode == Semantics::kSet) {
    dedup(x);
    dedup(y);
  } else {
    sort_rows(x.rows);
    sort_rows(y.rows);
  }
  return std::equal(x.rows.begin(), x.rows.end(), y.rows.begin(), y.rows.end(), row_equal);
}

std::string to_string(const Tuple& t) {
  std::string out = "{";
  bool first = true;
  for (const auto& [c, v] : t) {
    out += (first ? "" : ", ") + c + ": " + to_string(v);
    first = false;
  }
  return out + "}";
}

std::string to_string(const Relation& r) {
  std::string out = to_string(r.schema) + " [" + std::to_string(r.rows.size()) + " rows]\n";
  for (const auto& row : r.rows) out += "  " + to_string(row) + "\n";
  return out;
}

Catalog catalog_of(const Database& db) {
  Catalog out;
  for (const auto& [name, r] : db) out[name].schema = r.schema;
  return out;
}

}  // namespace a3d
