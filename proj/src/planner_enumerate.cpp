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


#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

#include "a3d/errors.hpp"
#include "planner_internal.hpp"

namespace a3d::planning {

namespace {

using Mask = uint32_t;
using OpSet = std::vector<bool>;

Mask bit(size_t i) { return Mask(1) << i; }

struct BlockOp {
  TermPtr node;
  Access acc;
  Mask below = 0;   // leaves under the node in the input term
  Mask inputs = 0;  // leaves the columns it reads come from
  bool key = false;  // derive producing a column that joins a leaf outside `below`
  Mask key_leaves = 0;
};

struct Entry {
  TermPtr plan;
  double cost = 0;
  OpSet applied;
  double count = 0;  // oracle: plans reaching this state
};

std::string describe(const TermPtr& op) { return op_symbol(op) + "(" + op_params(op) + ")"; }

class Block {
 public:
  Block(const TermPtr& t, CostModel& model) : model_(model) {
    collect(t);
    for (const auto& l : leaves_) leaf_cols_.push_back(model_.types().schema(l).columns());
    analyze();
    edges();
  }

  void optimize_leaves(const std::function<TermPtr(const TermPtr&)>& f) {
    for (auto& l : leaves_) l = f(l);
  }

  JoinGraph graph() const { return graph_; }
  size_t num_leaves() const { return leaves_.size(); }
  size_t num_ops() const { return ops_.size(); }
  bool hygienic() const { return why_.empty(); }

  // Input term with the (possibly optimized) leaves substituted.
  TermPtr rebuild(const TermPtr& t) const {
    size_t next = 0;
    return rebuild(t, next);
  }

  void check_connected(bool allow_cross) {
    if (graph_.connected()) return;
    if (!allow_cross)
      throw InfeasibleQuery("join graph is disconnected: a cross product is required (allow it explicitly)");
    for (size_t l = 0; l < leaves_.size(); ++l) adj_[l] = full() & ~bit(l);
  }

  void build_precedence() {
    prec_ = PrecedenceGraph(ops_.size());
    for (auto [lo, hi] : under_)
      if (conflicts(ops_[lo].acc, ops_[hi].acc)) prec_.add_edge(lo, hi);
    std::vector<OpCostProfile> prof;
    for (const auto& o : ops_) prof.push_back(model_.profile(o.node));
    repair_z(prec_, [&](size_t a, size_t b) {
      if (rank_before(prof[a], prof[b])) return true;
      if (rank_before(prof[b], prof[a])) return false;
      return a < b;
    });
  }

  TermPtr enumerate(EnumerationStats& stats) {
    const auto& top = solve(full(), stats);
    const Entry* best = nullptr;
    TermPtr best_plan;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& [set, e] : top) {
      const auto& rest = applicable(e, full());
      if (count(set) + rest.size() != ops_.size()) continue;
      TermPtr plan = e.plan;
      for (size_t i : rest) plan = with_input(ops_[i].node, plan);
      double c = model_.cost(plan);
      ++stats.plans_costed;
      if (!best || c < best_cost) {
        best = &e;
        best_cost = c;
        best_plan = plan;
      }
    }
    if (!best) throw InfeasibleQuery(blocked_message());
    return best_plan;
  }

  TermPtr oracle(EnumerationStats& stats) {
    std::vector<Mask> masks;
    for (Mask p = 1; p <= full(); ++p)
      if (connected(p)) masks.push_back(p);
    std::stable_sort(masks.begin(), masks.end(),
                     [](Mask a, Mask b) { return std::popcount(a) < std::popcount(b); });
    for (Mask p : masks) {
      auto& tab = table_[p];
      if (std::popcount(p) == 1) {
        size_t l = std::countr_zero(p);
        tab[empty()] = Entry{leaves_[l], model_.cost(leaves_[l]), empty(), 1};
      } else {
        for_partitions(p, [&](Mask p1, Mask p2) {
          ++stats.partitions;
          bool any = false;
          for (const auto& [s1, e1] : table_[p1])
            for (const auto& [s2, e2] : table_[p2]) {
              if (!oracle_valid(e1, p1, e2, p2)) continue;
              any = true;
              OpSet set = unite(s1, s2);
              TermPtr plan = join(e1.plan, e2.plan);
              offer(tab, set, plan, e1.count * e2.count, stats);
            }
          if (!any) ++stats.rejected_partitions;
        });
      }
      for (size_t level = 0; level < ops_.size(); ++level) {
        std::vector<OpSet> sets;
        for (const auto& [set, e] : tab)
          if (count(set) == level) sets.push_back(set);
        for (const auto& set : sets) {
          Entry e = tab.at(set);
          const auto cols = model_.types().schema(e.plan).columns();
          for (size_t i = 0; i < ops_.size(); ++i) {
            if (!can_apply(i, set, p, cols)) continue;
            OpSet next = set;
            next[i] = true;
            offer(tab, next, with_input(ops_[i].node, e.plan), e.count, stats);
          }
        }
      }
    }
    auto& top = table_[full()];
    OpSet all(ops_.size(), true);
    auto it = top.find(all);
    if (it == top.end()) throw InfeasibleQuery(blocked_message());
    stats.plans_represented += it->second.count;
    stats.memo_entries += [&] {
      size_t n = 0;
      for (const auto& [m, tab] : table_) n += tab.size();
      return n;
    }();
    return it->second.plan;
  }

 private:
  struct Walk {
    Mask mask = 0;
    std::vector<size_t> ops;
  };

  Walk collect(const TermPtr& t) {
    if (const auto* j = t->as<Join>()) {
      Walk l = collect(j->left), r = collect(j->right);
      l.mask |= r.mask;
      l.ops.insert(l.ops.end(), r.ops.begin(), r.ops.end());
      return l;
    }
    if (is_rankable(t)) {
      Walk w = collect(children(t)[0]);
      size_t idx = ops_.size();
      ops_.push_back(BlockOp{t, access_of(t), w.mask});
      for (size_t o : w.ops) under_.emplace_back(o, idx);
      w.ops.push_back(idx);
      return w;
    }
    if (leaves_.size() >= 31) throw InfeasibleQuery("more than 31 relations in one select-join block");
    leaves_.push_back(t);
    return {bit(leaves_.size() - 1), {}};
  }

  TermPtr rebuild(const TermPtr& t, size_t& next) const {
    if (const auto* j = t->as<Join>()) {
      TermPtr l = rebuild(j->left, next);
      return join(l, rebuild(j->right, next));
    }
    if (is_rankable(t)) return with_input(t, rebuild(children(t)[0], next));
    return leaves_[next++];
  }

  Mask full() const { return Mask((uint64_t(1) << leaves_.size()) - 1); }
  OpSet empty() const { return OpSet(ops_.size(), false); }
  static size_t count(const OpSet& s) { return static_cast<size_t>(std::count(s.begin(), s.end(), true)); }
  static OpSet unite(const OpSet& a, const OpSet& b) {
    OpSet r = a;
    for (size_t i = 0; i < b.size(); ++i)
      if (b[i]) r[i] = true;
    return r;
  }

  bool related(size_t a, size_t b) const { return related_[a][b]; }

  Mask leaves_with(const std::string& c) const {
    Mask m = 0;
    for (size_t l = 0; l < leaves_.size(); ++l)
      if (leaf_cols_[l].count(c)) m |= bit(l);
    return m;
  }

  // Name hygiene: reordering treats equal names in different leaves as one
  // joined column, so operators must not create, overwrite or drop such
  // names except for derives that produce a join key.
  void analyze() {
    related_.assign(ops_.size(), std::vector<char>(ops_.size(), 0));
    std::vector<std::vector<size_t>> lower(ops_.size());
    for (auto [lo, hi] : under_) {
      related_[lo][hi] = related_[hi][lo] = 1;
      lower[hi].push_back(lo);
    }
    for (size_t i = 0; i < ops_.size(); ++i) {
      auto& o = ops_[i];
      for (const auto& y : o.acc.outputs) {
        Mask has = leaves_with(y);
        Mask outside = has & ~o.below, inside = has & o.below;
        if (outside) {
          if (o.node->is<Derive>() && !inside) {
            o.key = true;
            o.key_leaves |= outside;
          } else {
            why_ = describe(o.node) + " writes a column of another relation";
          }
        }
        if (std::popcount(inside) > 1) why_ = describe(o.node) + " overwrites a join column";
        for (size_t j = 0; j < ops_.size(); ++j)
          if (j != i && !related(i, j) && ops_[j].acc.outputs.count(y))
            why_ = describe(o.node) + " and " + describe(ops_[j].node) + " produce the same column";
      }
      for (const auto& r : o.acc.removed) {
        Mask has = leaves_with(r);
        if ((has & ~o.below) || std::popcount(has) > 1) why_ = describe(o.node) + " drops a join column";
      }
      for (const auto& c : o.acc.reads) {
        o.inputs |= leaves_with(c) & o.below;
        for (size_t lo : lower[i])
          if (ops_[lo].acc.outputs.count(c)) o.inputs |= ops_[lo].inputs;
      }
      if (!o.inputs) o.inputs = o.below;
    }
  }

  void edges() {
    graph_.relations = leaves_;
    adj_.assign(leaves_.size(), 0);
    auto add = [&](size_t l, size_t r, const std::set<std::string>& cols) {
      if (l == r) return;
      adj_[l] |= bit(r);
      adj_[r] |= bit(l);
      for (auto& e : graph_.edges)
        if ((e.left == l && e.right == r) || (e.left == r && e.right == l)) {
          e.columns.insert(cols.begin(), cols.end());
          return;
        }
      graph_.edges.push_back(JoinEdge{l, r, cols});
    };
    for (size_t l = 0; l < leaves_.size(); ++l)
      for (size_t r = l + 1; r < leaves_.size(); ++r) {
        std::set<std::string> shared;
        for (const auto& c : leaf_cols_[l])
          if (leaf_cols_[r].count(c)) shared.insert(c);
        if (!shared.empty()) add(l, r, shared);
      }
    for (const auto& o : ops_) {
      if (!o.key) continue;
      for (size_t l = 0; l < leaves_.size(); ++l)
        for (size_t r = 0; r < leaves_.size(); ++r)
          if ((o.inputs & bit(l)) && (o.key_leaves & bit(r))) add(l, r, o.acc.outputs);
    }
  }

  bool connected(Mask p) const {
    if (!p) return false;
    Mask seen = bit(std::countr_zero(p)), frontier = seen;
    while (frontier) {
      Mask next = 0;
      for (size_t l = 0; l < leaves_.size(); ++l)
        if (frontier & bit(l)) next |= adj_[l] & p;
      frontier = next & ~seen;
      seen |= next;
    }
    return seen == p;
  }

  bool adjacent(Mask a, Mask b) const {
    for (size_t l = 0; l < leaves_.size(); ++l)
      if ((a & bit(l)) && (adj_[l] & b)) return true;
    return false;
  }

  // Connected complement pairs (p1 holds the lowest relation of p).
  template <class F>
  void for_partitions(Mask p, F&& f) const {
    Mask low = p & (~p + 1);
    for (Mask sub = (p - 1) & p; sub; sub = (sub - 1) & p) {
      if (!(sub & low)) continue;
      Mask rest = p & ~sub;
      if (connected(sub) && connected(rest) && adjacent(sub, rest)) f(sub, rest);
    }
  }

  bool can_apply(size_t i, const OpSet& applied, Mask p, const std::set<std::string>& cols) const {
    if (applied[i]) return false;
    const auto& o = ops_[i];
    if (o.key && (o.key_leaves & p)) return false;
    for (size_t j = 0; j < ops_.size(); ++j)
      if (prec_.precedes(j, i) && !applied[j]) return false;
    for (const auto& c : o.acc.reads)
      if (!cols.count(c)) return false;
    return true;
  }

  // Operators applicable on top of `e` (closing over their own effects),
  // in sort_ops order.
  const std::vector<size_t>& applicable(const Entry& e, Mask p) {
    auto hit = applicable_.find(e.plan.get());
    if (hit != applicable_.end()) return hit->second.second;
    auto cols = model_.types().schema(e.plan).columns();
    OpSet taken = e.applied;
    std::vector<size_t> list;
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t i = 0; i < ops_.size(); ++i) {
        if (!can_apply(i, taken, p, cols)) continue;
        taken[i] = true;
        list.push_back(i);
        for (const auto& c : ops_[i].acc.removed) cols.erase(c);
        cols.insert(ops_[i].acc.outputs.begin(), ops_[i].acc.outputs.end());
        changed = true;
      }
    }
    std::vector<OpCostProfile> prof;
    for (size_t k = 0; k < list.size(); ++k) {
      TermPtr ctx = e.plan;
      for (size_t q = 0; q < k; ++q)
        if (prec_.precedes(list[q], list[k])) ctx = with_input(ops_[list[q]].node, ctx);
      prof.push_back(model_.profile(with_input(ops_[list[k]].node, ctx)));
    }
    std::vector<size_t> sorted;
    for (size_t k : sort_ops(prof, prec_.restrict(list))) sorted.push_back(list[k]);
    auto& slot = applicable_[e.plan.get()];
    slot = {e.plan, std::move(sorted)};
    return slot.second;
  }

  void offer(std::map<OpSet, Entry>& tab, const OpSet& set, const TermPtr& plan, double count,
             EnumerationStats& stats) {
    double c = model_.cost(plan);
    ++stats.plans_costed;
    auto it = tab.find(set);
    if (it == tab.end()) {
      tab.emplace(set, Entry{plan, c, set, count});
      return;
    }
    it->second.count += count;
    if (c < it->second.cost) {
      it->second.plan = plan;
      it->second.cost = c;
    }
  }

  static bool meets(Mask a, Mask b) { return (a & b) != 0; }

  bool touches(const BlockOp& o, Mask p1, Mask p2) const {
    return (meets(o.inputs, p1) && meets(o.key_leaves, p2)) || (meets(o.inputs, p2) && meets(o.key_leaves, p1));
  }

  bool oracle_valid(const Entry& s, Mask p1, const Entry& t, Mask p2) {
    const auto c1 = model_.types().schema(s.plan).columns();
    const auto c2 = model_.types().schema(t.plan).columns();
    for (size_t i = 0; i < ops_.size(); ++i) {
      const auto& o = ops_[i];
      if (!o.key || s.applied[i] || t.applied[i]) continue;
      if (meets(o.key_leaves, p2) && can_apply(i, s.applied, p1, c1)) return false;
      if (meets(o.key_leaves, p1) && can_apply(i, t.applied, p2, c2)) return false;
      if (touches(o, p1, p2)) return false;
    }
    return true;
  }

  const std::map<OpSet, Entry>& solve(Mask p, EnumerationStats& stats) {
    auto found = memo_.find(p);
    if (found != memo_.end()) return found->second;
    std::map<OpSet, Entry> tab;
    if (std::popcount(p) == 1) {
      size_t l = std::countr_zero(p);
      tab.emplace(empty(), Entry{leaves_[l], model_.cost(leaves_[l]), empty(), 1});
    } else {
      for_partitions(p, [&](Mask p1, Mask p2) {
        ++stats.partitions;
        bool any = false;
        const auto& left = solve(p1, stats);
        const auto& right = solve(p2, stats);
        for (const auto& [s1, s] : left)
          for (const auto& [s2, t] : right) any |= join_pair(tab, s, p1, t, p2, stats);
        if (!any) ++stats.rejected_partitions;
      });
    }
    stats.memo_entries += tab.size();
    return memo_.emplace(p, std::move(tab)).first->second;
  }

  // Lines 12-20 of Algorithm 1 for one (s, t) pair. Operators that must
  // precede the join are always taken; the others contribute a prefix of
  // the rank order.
  bool join_pair(std::map<OpSet, Entry>& tab, const Entry& s, Mask p1, const Entry& t, Mask p2,
                 EnumerationStats& stats) {
    const auto o1 = applicable(s, p1);
    const auto o2 = applicable(t, p2);
    OpSet need1(ops_.size(), false), need2(ops_.size(), false);
    for (size_t i = 0; i < ops_.size(); ++i) {
      const auto& o = ops_[i];
      if (!o.key || s.applied[i] || t.applied[i]) continue;
      if (meets(o.key_leaves, p2) && std::count(o1.begin(), o1.end(), i)) {
        need1[i] = true;
      } else if (meets(o.key_leaves, p1) && std::count(o2.begin(), o2.end(), i)) {
        need2[i] = true;
      } else if (touches(o, p1, p2)) {
        return false;
      }
    }
    auto left = variants(s, o1, need1);
    auto right = variants(t, o2, need2);
    OpSet base = unite(s.applied, t.applied);
    for (const auto& [l, ls] : left)
      for (const auto& [r, rs] : right) offer(tab, unite(unite(base, ls), rs), join(l, r), 1, stats);
    return true;
  }

  // Plans `e` extended by the mandatory operators (and their predecessors)
  // plus each prefix of the remaining sorted list.
  std::vector<std::pair<TermPtr, OpSet>> variants(const Entry& e, const std::vector<size_t>& sorted, OpSet need) {
    for (size_t k = sorted.size(); k-- > 0;)
      if (need[sorted[k]])
        for (size_t q = 0; q < k; ++q)
          if (prec_.precedes(sorted[q], sorted[k])) need[sorted[q]] = true;
    std::vector<size_t> rest;
    for (size_t i : sorted)
      if (!need[i]) rest.push_back(i);
    std::vector<std::pair<TermPtr, OpSet>> out;
    for (size_t k = 0; k <= rest.size(); ++k) {
      OpSet chosen = need;
      for (size_t q = 0; q < k; ++q) chosen[rest[q]] = true;
      TermPtr plan = e.plan;
      for (size_t i : sorted)
        if (chosen[i]) plan = with_input(ops_[i].node, plan);
      out.emplace_back(plan, chosen);
    }
    return out;
  }

  std::string blocked_message() const {
    for (const auto& o : ops_)
      if (o.key) return "no valid join order: " + describe(o.node) + " must precede a join it cannot be placed under";
    return "no valid plan for the select-join block";
  }

  CostModel& model_;
  std::vector<TermPtr> leaves_;
  std::vector<std::set<std::string>> leaf_cols_;
  std::vector<BlockOp> ops_;
  std::vector<std::pair<size_t, size_t>> under_;  // (lower, upper) along a path
  std::vector<std::vector<char>> related_;
  std::vector<Mask> adj_;
  JoinGraph graph_;
  std::string why_;
  PrecedenceGraph prec_;
  std::unordered_map<Mask, std::map<OpSet, Entry>> memo_;
  std::unordered_map<Mask, std::map<OpSet, Entry>> table_;
  std::unordered_map<const Term*, std::pair<TermPtr, std::vector<size_t>>> applicable_;
};

}  // namespace

TermPtr plan_block(const TermPtr& t, BlockContext& ctx, bool oracle) {
  Block block(t, ctx.model);
  block.optimize_leaves(ctx.optimize_leaf);
  ++ctx.stats.blocks;
  if (!block.hygienic()) return block.rebuild(t);
  block.check_connected(ctx.options.allow_cross_products);
  if (oracle) {
    if (block.num_leaves() > ctx.options.oracle_max_relations || block.num_ops() > ctx.options.oracle_max_ops)
      throw InfeasibleQuery("query exceeds the oracle limits (" + std::to_string(ctx.options.oracle_max_relations) +
                            " relations, " + std::to_string(ctx.options.oracle_max_ops) + " operators)");
  }
  block.build_precedence();
  return oracle ? block.oracle(ctx.stats) : block.enumerate(ctx.stats);
}

JoinGraph block_join_graph(const TermPtr& t, CostModel& model) { return Block(t, model).graph(); }

}  // namespace a3d::planning
