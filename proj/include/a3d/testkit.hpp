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

#include <cstdint>
#include <string>
#include <vector>

#include "a3d/relation.hpp"
#include "a3d/term.hpp"

namespace a3d {

/// SplitMix64 (Steele, Lea and Flood). From seed 0 the first outputs are
/// 0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4, 0x06c45d188009454f.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed = 0) : state_(seed) {}
  uint64_t next();
  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform();
  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n);
  /// Uniform integer in [lo, hi].
  int64_t range(int64_t lo, int64_t hi);
  bool chance(double p) { return uniform() < p; }

 private:
  uint64_t state_;
};

struct Distribution {
  enum class Kind { kUniform, kZipf, kNormal };
  Kind kind = Kind::kUniform;
  int64_t ndv = 10;     // uniform and zipf draw from offset + [0, ndv)
  double skew = 1.0;    // zipf exponent
  double mean = 0.0;    // normal
  double stddev = 1.0;  // normal; rounded to integers and clamped to 4 stddev
  int64_t offset = 0;
};

enum class ValueType { kInt, kDouble, kText };

struct ColumnSpec {
  std::string name;
  ValueType type = ValueType::kInt;
  Distribution values;
  double null_prob = 0.0;  // scalars only
  bool array = false;
  int min_len = 0;
  int max_len = 4;
  double empty_prob = 0.0;
  double dup_prob = 0.0;  // chance an element repeats the previous one
  /// Reuse the per-row length of an earlier array column.
  std::string same_length_as;
};

struct GenSpec {
  size_t rows = 0;
  uint64_t seed = 0;
  std::vector<ColumnSpec> columns;
};

/// Deterministic for a fixed spec; throws std::invalid_argument on bad
/// parameters.
Relation generate(const GenSpec& spec);

struct PatternQuery {
  Catalog catalog;
  TermPtr term;
};

enum class PatternKind { kA, kB };

/// Scaling workloads. A stacks n blocks σ(y_k > 10) ∘ δ(y_k = 2·n_k + 1) ∘
/// μ(a_k:n_k) over R; B is one σ with n conjuncts over a μ unnesting n
/// corresponding arrays of R.
PatternQuery make_pattern(PatternKind kind, int n);

/// Data matching make_pattern's catalog.
Relation pattern_data(PatternKind kind, int n, size_t rows, uint64_t seed);

}  // namespace a3d
