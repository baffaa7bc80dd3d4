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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace a3d {

struct Null {
  friend bool operator==(Null, Null) { return true; }
  friend auto operator<=>(Null, Null) { return std::strong_ordering::equal; }
};

/// A scalar is null, a boolean, a 64-bit integer, a double or UTF-8 text.
using Scalar = std::variant<Null, bool, int64_t, double, std::string>;

/// Arrays hold scalars only; element order is significant.
using Array = std::vector<Scalar>;

using Value = std::variant<Scalar, Array>;

/// A tuple maps column names to values.
using Tuple = std::map<std::string, Value>;

inline Scalar null_scalar() { return Null{}; }

inline bool is_null(const Scalar& s) { return std::holds_alternative<Null>(s); }
inline bool is_array(const Value& v) { return std::holds_alternative<Array>(v); }
inline bool is_numeric(const Scalar& s) {
  return std::holds_alternative<int64_t>(s) || std::holds_alternative<double>(s);
}

const Scalar& as_scalar(const Value& v);
const Array& as_array(const Value& v);

/// Numeric view of an int or double scalar.
std::optional<double> to_double(const Scalar& s);

/// Total order used for sorting rows and grouping. Different kinds are
/// ordered by kind; ints and doubles are distinct kinds here, so 2 and 2.0
/// are different keys.
std::strong_ordering total_order(const Scalar& a, const Scalar& b);
std::strong_ordering total_order(const Value& a, const Value& b);

/// SQL-style comparison used by predicates: ints and doubles compare
/// numerically, null compares as unknown (nullopt). Comparing text with a
/// number is a type error.
std::optional<std::partial_ordering> compare_sql(const Scalar& a, const Scalar& b);

std::string to_string(const Scalar& s);
std::string to_string(const Value& v);

size_t hash_value(const Value& v);

}  // namespace a3d
