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

#include "a3d/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace a3d {

uint64_t SplitMix64::next() {
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

uint64_t SplitMix64::below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  // Rejection sampling keeps the draw unbiased.
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

int64_t SplitMix64::range(int64_t lo, int64_t hi) {
  return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
}

namespace {

class Sampler {
 public:
  explicit Sampler(const Distribution& d) : d_(d) {
    if (d.kind != Distribution::Kind::kNormal && d.ndv <= 0) throw std::invalid_argument("ndv must be positive");
    if (d.kind == Distribution::Kind::kZipf) {
      if (d.skew <= 0) throw std::invalid_argument("zipf exponent must be positive");
      double total = 0;
      for (int64_t k = 1; k <= d.ndv; ++k) {
        total += 1.0 / std::pow(static_cast<double>(k), d.skew);
        cdf_.push_back(total);
      }
      for (auto& c : cdf_) c /= total;
    }
    if (d.kind == Distribution::Kind::kNormal && d.stddev <= 0)
      throw std::invalid_argument("normal stddev must be positive");
  }

  int64_t draw(SplitMix64& rng) const {
    switch (d_.kind) {
      case Distribution::Kind::kUniform:
        return d_.offset + static_cast<int64_t>(rng.below(static_cast<uint64_t>(d_.ndv)));
      case Distribution::Kind::kZipf: {
        double u = rng.uniform();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        auto k = std::min<int64_t>(it - cdf_.begin(), d_.ndv - 1);
        return d_.offset + k;
      }
      case Distribution::Kind::kNormal: {
        double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
        z = std::clamp(z, -4.0, 4.0);
        return d_.offset + static_cast<int64_t>(std::llround(d_.mean + d_.stddev * z));
      }
    }
    return 0;
  }

 private:
  Distribution d_;
  std::vector<double> cdf_;
};

Scalar render(int64_t v, ValueType type) {
  switch (type) {
    case ValueType::kInt:
      return v;
    case ValueType::kDouble:
      return static_cast<double>(v) + 0.5;
    case ValueType::kText:
      return "v" + std::to_string(v);
  }
  return v;
}

}  // namespace

Relation generate(const GenSpec& spec) {
  Relation out;
  std::vector<Sampler> samplers;
  for (const auto& c : spec.columns) {
    if (c.name.empty()) throw std::invalid_argument("column without a name");
    if (out.schema.has(c.name)) throw std::invalid_argument("duplicate column " + c.name);
    if (c.array && (c.min_len < 0 || c.max_len < c.min_len))
      throw std::invalid_argument("bad array length range for " + c.name);
    for (double p : {c.null_prob, c.empty_prob, c.dup_prob})
      if (p < 0 || p > 1) throw std::invalid_argument("probability out of range for " + c.name);
    if (!c.same_length_as.empty() && !out.schema.is_array(c.same_length_as))
      throw std::invalid_argument(c.name + " follows unknown array column " + c.same_length_as);
    (c.array ? out.schema.arrays : out.schema.scalars).insert(c.name);
    samplers.emplace_back(c.values);
  }
  SplitMix64 rng(spec.seed);
  out.rows.reserve(spec.rows);
  for (size_t r = 0; r < spec.rows; ++r) {
    Tuple t;
    std::map<std::string, size_t> lengths;
    for (size_t i = 0; i < spec.columns.size(); ++i) {
      const auto& c = spec.columns[i];
      if (!c.array) {
        t[c.name] = c.null_prob > 0 && rng.chance(c.null_prob) ? Scalar{Null{}}
                                                                : render(samplers[i].draw(rng), c.type);
        continue;
      }
      size_t len;
      if (!c.same_length_as.empty()) {
        len = lengths.at(c.same_length_as);
      } else if (c.empty_prob > 0 && rng.chance(c.empty_prob)) {
        len = 0;
      } else {
        len = static_cast<size_t>(rng.range(std::max(c.min_len, c.empty_prob > 0 ? 1 : 0), c.max_len));
      }
      lengths[c.name] = len;
      Array a;
      a.reserve(len);
      for (size_t j = 0; j < len; ++j) {
        if (j > 0 && c.dup_prob > 0 && rng.chance(c.dup_prob))
          a.push_back(a.back());
        else
          a.push_back(render(samplers[i].draw(rng), c.type));
      }
      t[c.name] = std::move(a);
    }
    out.rows.push_back(std::move(t));
  }
  return out;
}

namespace {

std::string idx(const char* prefix, int k) { return prefix + std::to_string(k); }

}  // namespace

PatternQuery make_pattern(PatternKind kind, int n) {
  if (n < 1) throw std::invalid_argument("pattern size must be at least 1");
  PatternQuery q;
  auto& info = q.catalog["R"];
  info.schema.scalars.insert("id");
  for (int k = 1; k <= n; ++k) info.schema.arrays.insert(idx("a", k));
  TermPtr t = rel("R");
  if (kind == PatternKind::kA) {
    for (int k = 1; k <= n; ++k) {
      t = array_join(t, idx("a", k), idx("n", k));
      t = derive(t, idx("y", k), FnRef{"affine", {int64_t{2}, int64_t{1}}, false}, {idx("n", k)});
      t = filter(t, p_cmp(CmpOp::kGt, idx("y", k), int64_t{10}));
    }
  } else {
    std::vector<Target> targets;
    std::vector<PredPtr> conjuncts;
    for (int k = 1; k <= n; ++k) {
      targets.push_back({idx("a", k), idx("n", k)});
      conjuncts.push_back(p_cmp(CmpOp::kGt, idx("n", k), int64_t{k % 7}));
      if (k > 1) info.correspondences.emplace_back(idx("a", 1), idx("a", k));
    }
    t = filter(array_join(t, targets), conjoin(conjuncts));
  }
  q.term = t;
  return q;
}

Relation pattern_data(PatternKind kind, int n, size_t rows, uint64_t seed) {
  GenSpec spec;
  spec.rows = rows;
  spec.seed = seed;
  ColumnSpec id;
  id.name = "id";
  id.values.ndv = static_cast<int64_t>(std::max<size_t>(rows, 1));
  spec.columns.push_back(id);
  for (int k = 1; k <= n; ++k) {
    ColumnSpec c;
    c.name = idx("a", k);
    c.values.ndv = 16;
    c.array = true;
    c.empty_prob = 0.2;
    if (kind == PatternKind::kB && k > 1) c.same_length_as = "a1";
    spec.columns.push_back(c);
  }
  return generate(spec);
}

}  // namespace a3d
