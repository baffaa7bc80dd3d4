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

#include "a3d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "a3d/errors.hpp"

namespace a3d {

std::string kind_name(StatsKind k) {
  switch (k) {
    case StatsKind::kExact:
      return "exact";
    case StatsKind::kUniform:
      return "uniform";
    case StatsKind::kClustered:
      return "clustered";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Building

namespace {

// 1-D k-means over the given points; returns the cluster index of each.
std::vector<int> kmeans_1d(const std::vector<double>& points, int k) {
  std::vector<size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return points[a] < points[b]; });
  std::vector<double> centroids(k);
  for (int i = 0; i < k; ++i)
    centroids[i] = points[order[std::min(points.size() - 1, (2 * i + 1) * points.size() / (2 * k))]];
  std::vector<int> assign(points.size(), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (size_t p = 0; p < points.size(); ++p) {
      int best = 0;
      for (int c = 1; c < k; ++c)
        if (std::fabs(points[p] - centroids[c]) < std::fabs(points[p] - centroids[best])) best = c;
      if (assign[p] != best) {
        assign[p] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<double> sum(k, 0);
    std::vector<size_t> n(k, 0);
    for (size_t p = 0; p < points.size(); ++p) {
      sum[assign[p]] += points[p];
      ++n[assign[p]];
    }
    for (int c = 0; c < k; ++c)
      if (n[c]) centroids[c] = sum[c] / static_cast<double>(n[c]);
  }
  return assign;
}

}  // namespace

ColumnStats build_column_stats(const std::vector<Scalar>& values, const StatsConfig& config) {
  ColumnStats s;
  s.row_count = static_cast<int64_t>(values.size());
  std::map<Scalar, int64_t, ScalarOrder> counts;
  int64_t nulls = 0;
  for (const auto& v : values) {
    if (is_null(v))
      ++nulls;
    else
      ++counts[v];
  }
  int64_t nonnull = s.row_count - nulls;
  s.null_fraction = s.row_count ? static_cast<double>(nulls) / static_cast<double>(s.row_count) : 0;
  s.ndv = static_cast<int64_t>(counts.size());
  if (counts.empty()) {
    s.kind = StatsKind::kExact;
    return s;
  }
  s.min = counts.begin()->first;
  s.max = counts.rbegin()->first;
  double total = static_cast<double>(nonnull);
  if (s.ndv <= config.exact_max_ndv) {
    s.kind = StatsKind::kExact;
    for (const auto& [v, c] : counts) s.freq[v] = static_cast<double>(c) / total;
    return s;
  }
  std::vector<Scalar> keys;
  std::vector<double> freqs;
  for (const auto& [v, c] : counts) {
    keys.push_back(v);
    freqs.push_back(static_cast<double>(c) / total);
  }
  double mean = 1.0 / static_cast<double>(s.ndv);
  double var = 0;
  for (double f : freqs) var += (f - mean) * (f - mean);
  double cv = std::sqrt(var / static_cast<double>(freqs.size())) / mean;
  if (cv < config.uniform_max_cv) {
    s.kind = StatsKind::kUniform;
    s.avg_freq = mean;
    return s;
  }
  s.kind = StatsKind::kClustered;
  int k = static_cast<int>(std::min<int64_t>(config.max_clusters, s.ndv));
  auto assign = kmeans_1d(freqs, k);
  std::vector<Cluster> clusters(k);
  std::vector<double> sum(k, 0), sq(k, 0);
  for (size_t i = 0; i < keys.size(); ++i) {
    auto& c = clusters[assign[i]];
    ++c.members;
    sum[assign[i]] += freqs[i];
    sq[assign[i]] += freqs[i] * freqs[i];
    if (i > 0 && assign[i - 1] == assign[i] && !c.runs.empty() && total_order(c.runs.back().hi, keys[i - 1]) == 0) {
      c.runs.back().hi = keys[i];
      ++c.runs.back().count;
    } else {
      c.runs.push_back({keys[i], keys[i], 1});
    }
  }
  for (int c = 0; c < k; ++c) {
    if (!clusters[c].members) continue;
    double m = static_cast<double>(clusters[c].members);
    clusters[c].centroid = sum[c] / m;
    clusters[c].dispersion = std::sqrt(std::max(0.0, sq[c] / m - clusters[c].centroid * clusters[c].centroid));
    s.clusters.push_back(std::move(clusters[c]));
  }
  std::sort(s.clusters.begin(), s.clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.centroid > b.centroid; });
  return s;
}

TableStats build_stats(const Relation& rel, const StatsConfig& config) {
  TableStats t;
  t.row_count = static_cast<int64_t>(rel.rows.size());
  for (const auto& c : rel.schema.scalars) {
    std::vector<Scalar> values;
    values.reserve(rel.rows.size());
    for (const auto& row : rel.rows) values.push_back(std::get<Scalar>(row.at(c)));
    t.columns[c] = build_column_stats(values, config);
  }
  for (const auto& c : rel.schema.arrays) {
    std::vector<Scalar> elems;
    std::set<Array, decltype([](const Array& a, const Array& b) { return total_order(Value{a}, Value{b}) < 0; })>
        distinct;
    size_t total = 0, empty = 0;
    for (const auto& row : rel.rows) {
      const auto& a = std::get<Array>(row.at(c));
      total += a.size();
      if (a.empty()) ++empty;
      elems.insert(elems.end(), a.begin(), a.end());
      distinct.insert(a);
    }
    ColumnStats s;
    s.is_array = true;
    s.row_count = t.row_count;
    double rows = static_cast<double>(rel.rows.size());
    s.avg_array_len = rows > 0 ? static_cast<double>(total) / rows : 0;
    s.empty_fraction = rows > 0 ? static_cast<double>(empty) / rows : 0;
    s.array_ndv = static_cast<int64_t>(distinct.size());
    s.ndv = s.array_ndv;
    s.row_stats = std::make_shared<ColumnStats>(build_column_stats(elems, config));
    s.kind = s.row_stats->kind;
    t.columns[c] = std::move(s);
  }
  return t;
}

StatsCatalog build_stats(const Database& db, const StatsConfig& config) {
  StatsCatalog out;
  for (const auto& [name, rel] : db) out.tables[name] = build_stats(rel, config);
  return out;
}

// ---------------------------------------------------------------------------
// Selectivity

namespace {

std::optional<std::partial_ordering> safe_compare(const Scalar& a, const Scalar& b) {
  try {
    return compare_sql(a, b);
  } catch (const SchemaError&) {
    return std::nullopt;
  }
}

bool is_integral(const Scalar& s) { return std::holds_alternative<int64_t>(s); }

// Fraction of the value interval [lo, hi] strictly below v (or at most v).
double interval_fraction(const Scalar& lo, const Scalar& hi, const Scalar& v, bool inclusive) {
  auto clo = safe_compare(v, lo);
  auto chi = safe_compare(v, hi);
  if (!clo || !chi) return 0.5;
  if (*clo < 0 || (*clo == 0 && !inclusive)) return 0;
  if (*chi > 0 || (*chi == 0 && inclusive)) return 1;
  auto l = to_double(lo), h = to_double(hi), x = to_double(v);
  if (!l || !h || !x) return 0.5;
  if (is_integral(lo) && is_integral(hi)) {
    double width = *h - *l + 1;
    double last = inclusive ? std::floor(*x) : std::ceil(*x) - 1;
    double below = last - *l + 1;
    return std::clamp(below / width, 0.0, 1.0);
  }
  if (*h == *l) return inclusive ? 1 : 0;
  return std::clamp((*x - *l) / (*h - *l), 0.0, 1.0);
}

bool within(const Scalar& lo, const Scalar& hi, const Scalar& v) {
  auto a = safe_compare(v, lo), b = safe_compare(v, hi);
  return a && b && *a >= 0 && *b <= 0;
}

}  // namespace

double equality_selectivity(const ColumnStats& s, const Scalar& v) {
  if (is_null(v) || s.ndv == 0) return 0;
  double nonnull = 1 - s.null_fraction;
  switch (s.kind) {
    case StatsKind::kExact: {
      for (const auto& [k, f] : s.freq) {
        auto c = safe_compare(k, v);
        if (c && *c == 0) return f * nonnull;
      }
      return 0;
    }
    case StatsKind::kUniform:
      return within(s.min, s.max, v) ? nonnull / static_cast<double>(s.ndv) : 0;
    case StatsKind::kClustered:
      for (const auto& c : s.clusters)
        for (const auto& r : c.runs)
          if (within(r.lo, r.hi, v)) return c.centroid * nonnull;
      return 0;
  }
  return 0;
}

double less_selectivity(const ColumnStats& s, const Scalar& v, bool inclusive) {
  if (is_null(v) || s.ndv == 0) return 0;
  double nonnull = 1 - s.null_fraction;
  double mass = 0;
  switch (s.kind) {
    case StatsKind::kExact:
      for (const auto& [k, f] : s.freq) {
        auto c = safe_compare(k, v);
        if (c && (*c < 0 || (inclusive && *c == 0))) mass += f;
      }
      break;
    case StatsKind::kUniform:
      mass = interval_fraction(s.min, s.max, v, inclusive);
      break;
    case StatsKind::kClustered:
      for (const auto& c : s.clusters)
        for (const auto& r : c.runs) mass += c.centroid * static_cast<double>(r.count) * interval_fraction(r.lo, r.hi, v, inclusive);
      break;
  }
  return std::clamp(mass, 0.0, 1.0) * nonnull;
}

namespace {

constexpr double kDefaultEq = 0.1;
constexpr double kDefaultCmp = 1.0 / 3.0;

double default_selectivity(CmpOp op) {
  if (op == CmpOp::kEq) return kDefaultEq;
  if (op == CmpOp::kNe) return 1 - kDefaultEq;
  return kDefaultCmp;
}

// length(a) compared with a constant: answered from the empty fraction when
// the comparison separates empty from non-empty arrays.
std::optional<double> length_selectivity(const Apply& a, CmpOp op, const Scalar& v, const Props& props) {
  if (a.fn.name != "length" || a.fn.map || a.args.size() != 1) return std::nullopt;
  const auto* c = std::get_if<ColRef>(&a.args[0]->node);
  if (!c) return std::nullopt;
  auto it = props.cols.find(c->name);
  if (it == props.cols.end()) return std::nullopt;
  auto k = to_double(v);
  if (!k) return std::nullopt;
  double ef = it->second.empty_frac;
  bool nonempty = (op == CmpOp::kNe && *k == 0) || (op == CmpOp::kGt && *k == 0) || (op == CmpOp::kGe && *k == 1);
  bool empty = (op == CmpOp::kEq && *k == 0) || (op == CmpOp::kLe && *k == 0) || (op == CmpOp::kLt && *k == 1);
  if (nonempty) return 1 - ef;
  if (empty) return ef;
  return std::nullopt;
}

double compare_selectivity(const Compare& c, const Props& props) {
  CmpOp op = c.op;
  const Expr* lhs = c.lhs.get();
  const Expr* rhs = c.rhs.get();
  if (std::holds_alternative<Literal>(lhs->node)) {
    std::swap(lhs, rhs);
    op = flip(op);
  }
  const auto* value = std::get_if<Literal>(&rhs->node);
  if (!value) return default_selectivity(op);
  if (const auto* a = std::get_if<Apply>(&lhs->node)) {
    auto s = length_selectivity(*a, op, value->value, props);
    return s ? *s : default_selectivity(op);
  }
  const auto* ref = std::get_if<ColRef>(&lhs->node);
  if (!ref) return default_selectivity(op);
  auto it = props.cols.find(ref->name);
  if (it == props.cols.end()) return default_selectivity(op);
  const ColProps& cp = it->second;
  Scalar v = value->value;
  const ColumnStats* stats = cp.stats;
  if (!stats && cp.affine_of) {
    // scale * x + offset op v  <=>  x op' (v - offset) / scale
    auto k = to_double(v);
    if (!k) return default_selectivity(op);
    stats = cp.affine_of;
    v = (*k - cp.offset) / cp.scale;
    if (cp.scale < 0) op = flip(op);
  }
  if (!stats || stats->is_array) return default_selectivity(op);
  const ColumnStats& s = *stats;
  double nonnull = 1 - s.null_fraction;
  switch (op) {
    case CmpOp::kEq:
      return equality_selectivity(s, v);
    case CmpOp::kNe:
      return is_null(v) ? 0 : nonnull - equality_selectivity(s, v);
    case CmpOp::kLt:
      return less_selectivity(s, v, false);
    case CmpOp::kLe:
      return less_selectivity(s, v, true);
    case CmpOp::kGt:
      return is_null(v) ? 0 : nonnull - less_selectivity(s, v, true);
    case CmpOp::kGe:
      return is_null(v) ? 0 : nonnull - less_selectivity(s, v, false);
  }
  return default_selectivity(op);
}

double selectivity(const PredPtr& p, const Props& props) {
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstPred>) {
          return x.value ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return std::clamp(compare_selectivity(x, props), 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          return 1 - selectivity(x.inner, props);
        } else if constexpr (std::is_same_v<T, AndPred>) {
          double s = 1;
          for (const auto& part : x.parts) s *= selectivity(part, props);
          return s;
        } else {
          double miss = 1;
          for (const auto& part : x.parts) miss *= 1 - selectivity(part, props);
          return 1 - miss;
        }
      },
      p->node);
}

}  // namespace

double estimate_selectivity(const PredPtr& p, const Props& props) {
  return std::clamp(selectivity(p, props), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Profiles

double OpCostProfile::multiplier() const {
  switch (kind) {
    case OpKind::kFilter:
    case OpKind::kAggregate:
      return s;
    case OpKind::kArrayJoin:
      return len;
    default:
      return 1;
  }
}

double OpCostProfile::rank() const {
  switch (kind) {
    case OpKind::kFilter:
    case OpKind::kAggregate:
      return (1 - s) / c;
    case OpKind::kArrayFilter:
    case OpKind::kDerive:
      return (1 - s_a) / c;
    case OpKind::kArrayJoin:
      return (1 - len) / c;
  }
  return 0;
}

double OpCostProfile::vertical_rank() const { return (1 - multiplier()) / c; }

double OpCostProfile::horizontal_rank() const { return kind == OpKind::kArrayFilter ? (1 - s_a) / c : 0; }

bool rank_before(const OpCostProfile& a, const OpCostProfile& b) {
  constexpr double kEps = 1e-12;
  double va = a.vertical_rank(), vb = b.vertical_rank();
  if (va > vb + kEps) return true;
  if (vb > va + kEps) return false;
  return a.horizontal_rank() > b.horizontal_rank() + kEps;
}

double sequence_cost(const std::vector<OpCostProfile>& ops, double rows) {
  double total = 0, n = rows;
  for (const auto& op : ops) {
    total += op.c * n;
    n *= op.multiplier();
  }
  return total;
}

// ---------------------------------------------------------------------------
// Cost model

namespace {

constexpr double kDefaultArrayLen = 4;
constexpr double kMinCost = 1e-6;

bool is_emptiness_test(const PredPtr& p, std::string* column) {
  const auto* c = std::get_if<Compare>(&p->node);
  if (!c) return false;
  CmpOp op = c->op;
  const Expr* lhs = c->lhs.get();
  const Expr* rhs = c->rhs.get();
  if (std::holds_alternative<Literal>(lhs->node)) {
    std::swap(lhs, rhs);
    op = flip(op);
  }
  const auto* a = std::get_if<Apply>(&lhs->node);
  const auto* v = std::get_if<Literal>(&rhs->node);
  if (!a || !v || a->fn.name != "length" || a->fn.map || a->args.size() != 1) return false;
  const auto* ref = std::get_if<ColRef>(&a->args[0]->node);
  auto k = to_double(v->value);
  if (!ref || !k) return false;
  bool nonempty = (op == CmpOp::kNe && *k == 0) || (op == CmpOp::kGt && *k == 0) || (op == CmpOp::kGe && *k == 1);
  if (nonempty) *column = ref->name;
  return nonempty;
}

}  // namespace

CostModel::CostModel(const Catalog& catalog, const StatsCatalog* stats, CostParams params)
    : catalog_(catalog), stats_(stats), params_(params), types_(catalog_) {}

const Props& CostModel::props(const TermPtr& t) {
  auto it = props_.find(t.get());
  if (it != props_.end()) return it->second.second;
  Props p = compute(t);
  return props_.emplace(t.get(), std::make_pair(t, std::move(p))).first->second.second;
}

double CostModel::function_cost(const std::string& fn, double base) const {
  if (stats_) {
    auto it = stats_->cost_overrides.find(fn);
    if (it != stats_->cost_overrides.end()) return it->second * std::max(base, 1.0);
  }
  return base;
}

double CostModel::expr_cost(const ExprPtr& e, const Props& in) const {
  const auto* a = std::get_if<Apply>(&e->node);
  if (!a) return 0;
  double args = 0, lens = 0;
  for (const auto& arg : a->args) {
    args += expr_cost(arg, in);
    if (const auto* c = std::get_if<ColRef>(&arg->node)) {
      auto it = in.cols.find(c->name);
      if (it != in.cols.end()) lens += it->second.avg_len;
    }
  }
  const auto* info = FunctionRegistry::instance().find(a->fn.name);
  bool iterates = a->fn.map || (info && info->shape == FnShape::kArray && a->fn.name != "length");
  return args + function_cost(a->fn.name, iterates ? lens : 0);
}

Props CostModel::compute(const TermPtr& t) {
  return std::visit(
      [&](const auto& x) -> Props {
        using T = std::decay_t<decltype(x)>;
        Props out;
        if constexpr (std::is_same_v<T, RelVar>) {
          const Schema& schema = types_.schema(t);
          const TableStats* ts = nullptr;
          if (stats_) {
            auto it = stats_->tables.find(x.name);
            if (it != stats_->tables.end()) ts = &it->second;
          }
          out.card = ts ? static_cast<double>(ts->row_count) : params_.default_rows;
          for (const auto& c : schema.columns()) {
            ColProps cp;
            const ColumnStats* cs = nullptr;
            if (ts) {
              auto it = ts->columns.find(c);
              if (it != ts->columns.end()) cs = &it->second;
            }
            if (schema.is_array(c)) {
              cp.avg_len = cs ? cs->avg_array_len : kDefaultArrayLen;
              cp.empty_frac = cs ? cs->empty_fraction : 0;
              cp.stats = cs ? cs->row_stats.get() : nullptr;
              cp.ndv = cs ? static_cast<double>(std::max<int64_t>(cs->array_ndv, 1)) : out.card;
            } else {
              cp.stats = cs;
              cp.ndv = cs ? static_cast<double>(std::max<int64_t>(cs->ndv, 1)) : out.card;
            }
            out.cols[c] = cp;
          }
        } else if constexpr (std::is_same_v<T, Join>) {
          const Props& l = props(x.left);
          const Props& r = props(x.right);
          out.cols = l.cols;
          double denom = 1;
          for (const auto& [c, cp] : r.cols) {
            auto it = out.cols.find(c);
            if (it == out.cols.end()) {
              out.cols[c] = cp;
              continue;
            }
            denom *= std::max({it->second.ndv, cp.ndv, 1.0});
            it->second.ndv = std::min(it->second.ndv, cp.ndv);
          }
          out.card = l.card * r.card / denom;
        } else if constexpr (std::is_same_v<T, Filter>) {
          const Props& in = props(x.input);
          out = in;
          out.card = in.card * estimate_selectivity(x.pred, in);
          for (const auto& part : split_conjuncts(x.pred)) {
            std::string a;
            if (!is_emptiness_test(part, &a)) continue;
            auto it = out.cols.find(a);
            if (it == out.cols.end()) continue;
            if (it->second.empty_frac < 1) it->second.avg_len /= 1 - it->second.empty_frac;
            it->second.empty_frac = 0;
          }
        } else if constexpr (std::is_same_v<T, Project>) {
          const Props& in = props(x.input);
          out.card = in.card;
          for (const auto& c : x.columns) out.cols[c] = in.cols.at(c);
        } else if constexpr (std::is_same_v<T, ArrayFilter>) {
          const Props& in = props(x.input);
          out = in;
          Props elems;
          elems.card = in.card;
          for (const auto& tg : x.targets) elems.cols[tg.alias] = ColProps{in.cols.at(tg.source).stats, 0, 0, 0};
          double sa = estimate_selectivity(x.pred, elems);
          std::vector<ColProps> kept;
          for (const auto& tg : x.targets) {
            ColProps cp = in.cols.at(tg.source);
            double ef = cp.empty_frac;
            if (ef < 1) {
              double per_row = cp.avg_len / (1 - ef);
              cp.empty_frac = ef + (1 - ef) * std::pow(1 - sa, per_row);
            }
            cp.avg_len *= sa;
            kept.push_back(cp);
          }
          for (const auto& tg : x.targets) {
            out.cols.erase(tg.source);
            out.cols.erase(tg.alias);
          }
          for (size_t i = 0; i < x.targets.size(); ++i) out.cols[x.targets[i].alias] = kept[i];
        } else if constexpr (std::is_same_v<T, ArrayJoin>) {
          const Props& in = props(x.input);
          out = in;
          double len = in.cols.at(x.targets[0].source).avg_len;
          out.card = in.card * len;
          std::vector<ColProps> elems;
          for (const auto& tg : x.targets) {
            const ColProps& src = in.cols.at(tg.source);
            double ndv = src.stats ? static_cast<double>(std::max<int64_t>(src.stats->ndv, 1)) : out.card;
            elems.push_back(ColProps{src.stats, 0, 0, ndv});
          }
          for (const auto& tg : x.targets) {
            out.cols.erase(tg.source);
            out.cols.erase(tg.alias);
          }
          for (size_t i = 0; i < x.targets.size(); ++i) out.cols[x.targets[i].alias] = elems[i];
        } else if constexpr (std::is_same_v<T, Derive>) {
          const Props& in = props(x.input);
          out = in;
          ColProps cp;
          if (x.fn.name == "id" && !x.fn.map && x.inputs.size() == 1) {
            cp = in.cols.at(x.inputs[0]);
          } else if (fn_returns_array(x.fn)) {
            for (const auto& c : x.inputs) {
              const ColProps& src = in.cols.at(c);
              if (src.avg_len >= cp.avg_len && (src.avg_len > 0 || types_.schema(x.input).is_array(c))) {
                cp.avg_len = src.avg_len;
                cp.empty_frac = src.empty_frac;
              }
            }
            cp.ndv = in.card;
          } else {
            cp.ndv = x.inputs.empty() ? 1 : in.cols.at(x.inputs[0]).ndv;
            auto af = x.inputs.size() == 1 ? affine_form(x.fn) : std::nullopt;
            const ColProps& src = x.inputs.empty() ? cp : in.cols.at(x.inputs[0]);
            if (af && src.stats && !src.stats->is_array) {
              cp.affine_of = src.stats;
              cp.scale = *to_double(af->scale);
              cp.offset = *to_double(af->offset);
            } else if (af && src.affine_of) {
              cp.affine_of = src.affine_of;
              cp.scale = *to_double(af->scale) * src.scale;
              cp.offset = *to_double(af->scale) * src.offset + *to_double(af->offset);
            }
          }
          out.cols[x.output] = cp;
        } else {
          const Props& in = props(x.input);
          double groups = 1;
          for (const auto& g : x.group_by) groups *= std::max(in.cols.at(g).ndv, 1.0);
          groups = std::min(groups, in.card);
          out.card = groups;
          for (const auto& g : x.group_by) out.cols[g] = in.cols.at(g);
          for (const auto& a : x.aggs) {
            ColProps cp;
            cp.ndv = std::max(groups, 1.0);
            if (!a.inputs.empty()) {
              const ColProps& src = in.cols.at(a.inputs[0]);
              if (a.for_each || a.fn == AggFn::kDistinctMerge) {
                cp.avg_len = src.avg_len;
                cp.empty_frac = 0;
              } else if (a.fn == AggFn::kDistinct) {
                cp.avg_len = groups > 0 ? std::min(src.ndv, in.card / groups) : 0;
              }
            }
            out.cols[a.alias] = cp;
          }
        }
        return out;
      },
      t->node);
}

double CostModel::per_tuple_cost(const TermPtr& op) {
  double c = std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Filter>) {
          const Props& in = props(x.input);
          double total = 0;
          std::function<void(const PredPtr&)> walk = [&](const PredPtr& p) {
            if (const auto* cmp = std::get_if<Compare>(&p->node)) {
              total += expr_cost(cmp->lhs, in) + expr_cost(cmp->rhs, in);
            } else if (const auto* n = std::get_if<NotPred>(&p->node)) {
              walk(n->inner);
            } else if (const auto* a = std::get_if<AndPred>(&p->node)) {
              for (const auto& part : a->parts) walk(part);
            } else if (const auto* o = std::get_if<OrPred>(&p->node)) {
              for (const auto& part : o->parts) walk(part);
            }
          };
          walk(x.pred);
          return std::max(1.0, total);
        } else if constexpr (std::is_same_v<T, ArrayFilter>) {
          const Props& in = props(x.input);
          double total = 0;
          for (const auto& tg : x.targets) total += in.cols.at(tg.source).avg_len;
          return total;
        } else if constexpr (std::is_same_v<T, ArrayJoin>) {
          const Props& in = props(x.input);
          double total = 0;
          for (const auto& tg : x.targets) total += in.cols.at(tg.source).avg_len;
          return total + params_.array_join_row_cost;
        } else if constexpr (std::is_same_v<T, Derive>) {
          const Props& in = props(x.input);
          const Schema& s = types_.schema(x.input);
          const auto& info = FunctionRegistry::instance().get(x.fn.name);
          bool iterates = x.fn.map || (info.shape == FnShape::kArray && x.fn.name != "length");
          if (!iterates) return function_cost(x.fn.name, 1);
          double total = 0;
          for (const auto& c : x.inputs)
            if (s.is_array(c)) total += in.cols.at(c).avg_len;
          return function_cost(x.fn.name, total);
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          const Props& in = props(x.input);
          double total = 1;
          for (const auto& a : x.aggs)
            if (!a.inputs.empty() && (a.for_each || a.fn == AggFn::kDistinctMerge))
              total += in.cols.at(a.inputs[0]).avg_len;
          return total;
        } else {
          return 0;
        }
      },
      op->node);
  return std::max(c, kMinCost);
}

OpCostProfile CostModel::profile(const TermPtr& op) {
  OpCostProfile p;
  p.c = per_tuple_cost(op);
  if (const auto* f = op->as<Filter>()) {
    p.kind = OpKind::kFilter;
    p.s = estimate_selectivity(f->pred, props(f->input));
  } else if (const auto* af = op->as<ArrayFilter>()) {
    p.kind = OpKind::kArrayFilter;
    const Props& in = props(af->input);
    Props elems;
    for (const auto& tg : af->targets) elems.cols[tg.alias] = ColProps{in.cols.at(tg.source).stats, 0, 0, 0};
    p.s_a = estimate_selectivity(af->pred, elems);
  } else if (const auto* aj = op->as<ArrayJoin>()) {
    p.kind = OpKind::kArrayJoin;
    p.len = props(aj->input).cols.at(aj->targets[0].source).avg_len;
  } else if (op->is<Derive>()) {
    p.kind = OpKind::kDerive;
  } else if (const auto* g = op->as<Aggregate>()) {
    p.kind = OpKind::kAggregate;
    double in = props(g->input).card;
    p.s = in > 0 ? std::min(1.0, props(op).card / in) : 1;
  } else {
    throw Error("operator " + op_symbol(op) + " is not rankable");
  }
  return p;
}

double CostModel::cost(const TermPtr& t) {
  auto it = cost_.find(t.get());
  if (it != cost_.end()) return it->second;
  double c = 0;
  if (const auto* j = t->as<Join>()) {
    c = cost(j->left) + cost(j->right) + cardinality(j->left) + cardinality(j->right) + cardinality(t);
  } else if (const auto* p = t->as<Project>()) {
    c = cost(p->input);
  } else if (!t->is<RelVar>()) {
    TermPtr in = children(t)[0];
    c = cost(in) + per_tuple_cost(t) * cardinality(in);
  }
  props(t);  // keeps t alive alongside the memoized cost
  cost_[t.get()] = c;
  return c;
}

}  // namespace a3d
