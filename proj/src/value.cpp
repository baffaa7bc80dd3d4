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

#include "a3d/value.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "a3d/errors.hpp"

namespace a3d {

const Scalar& as_scalar(const Value& v) {
  if (const auto* s = std::get_if<Scalar>(&v)) return *s;
  throw SchemaError("expected a scalar value, got an array");
}

const Array& as_array(const Value& v) {
  if (const auto* a = std::get_if<Array>(&v)) return *a;
  throw SchemaError("expected an array value, got a scalar");
}

std::optional<double> to_double(const Scalar& s) {
  if (const auto* i = std::get_if<int64_t>(&s)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&s)) return *d;
  return std::nullopt;
}

namespace {

std::strong_ordering order_double(double a, double b) {
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

std::strong_ordering total_order(const Scalar& a, const Scalar& b) {
  if (a.index() != b.index()) return a.index() <=> b.index();
  switch (a.index()) {
    case 0:
      return std::strong_ordering::equal;
    case 1:
      return std::get<bool>(a) <=> std::get<bool>(b);
    case 2:
      return std::get<int64_t>(a) <=> std::get<int64_t>(b);
    case 3:
      return order_double(std::get<double>(a), std::get<double>(b));
    default:
      return std::get<std::string>(a).compare(std::get<std::string>(b)) <=> 0;
  }
}

std::strong_ordering total_order(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() <=> b.index();
  if (a.index() == 0) return total_order(std::get<Scalar>(a), std::get<Scalar>(b));
  const auto& x = std::get<Array>(a);
  const auto& y = std::get<Array>(b);
  for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
    auto c = total_order(x[i], y[i]);
    if (c != 0) return c;
  }
  return x.size() <=> y.size();
}

std::optional<std::partial_ordering> compare_sql(const Scalar& a, const Scalar& b) {
  if (is_null(a) || is_null(b)) return std::nullopt;
  if (is_numeric(a) && is_numeric(b)) {
    if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b))
      return std::get<int64_t>(a) <=> std::get<int64_t>(b);
    return *to_double(a) <=> *to_double(b);
  }
  if (a.index() != b.index())
    throw SchemaError("cannot compare " + to_string(a) + " with " + to_string(b));
  if (std::holds_alternative<bool>(a)) return std::get<bool>(a) <=> std::get<bool>(b);
  return std::get<std::string>(a).compare(std::get<std::string>(b)) <=> 0;
}

std::string to_string(const Scalar& s) {
  struct Visitor {
    std::string operator()(Null) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      std::ostringstream os;
      os.precision(17);
      os << d;
      auto out = os.str();
      if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
      return out;
    }
    std::string operator()(const std::string& t) const { return "'" + t + "'"; }
  };
  return std::visit(Visitor{}, s);
}

std::string to_string(const Value& v) {
  if (const auto* s = std::get_if<Scalar>(&v)) return to_string(*s);
  std::string out = "[";
  const auto& arr = std::get<Array>(v);
  for (size_t i = 0; i < arr.size(); ++i) {
    if (i) out += ", ";
    out += to_string(arr[i]);
  }
  return out + "]";
}

namespace {

size_t hash_scalar(const Scalar& s) {
  size_t h = s.index() * 0x9e3779b97f4a7c15ULL;
  switch (s.index()) {
    case 1:
      h ^= std::hash<bool>{}(std::get<bool>(s));
      break;
    case 2:
      h ^= std::hash<int64_t>{}(std::get<int64_t>(s));
      break;
    case 3:
      h ^= std::hash<double>{}(std::get<double>(s));
      break;
    case 4:
      h ^= std::hash<std::string>{}(std::get<std::string>(s));
      break;
    default:
      break;
  }
  return h;
}

}  // namespace

size_t hash_value(const Value& v) {
  if (const auto* s = std::get_if<Scalar>(&v)) return hash_scalar(*s);
  size_t h = 0xa3d;
  for (const auto& e : std::get<Array>(v)) h = h * 31 + hash_scalar(e);
  return h;
}

}  // namespace a3d
