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
#include <numeric>

#include "a3d/errors.hpp"
#include "a3d/planner.hpp"
#include "planner_internal.hpp"

namespace a3d {

namespace planning {

Access access_of(const TermPtr& op) {
  Access a;
  a.reads = columns_read(op);
  if (const auto* d = op->as<Derive>()) {
    a.outputs.insert(d->output);
  } else if (const auto* m = op->as<ArrayJoin>()) {
    for (const auto& tg : m->targets) a.outputs.insert(tg.alias);
    for (const auto& tg : m->targets)
      if (!a.outputs.count(tg.source)) a.removed.insert(tg.source);
  } else if (const auto* f = op->as<ArrayFilter>()) {
    for (const auto& tg : f->targets) a.outputs.insert(tg.alias);
    for (const auto& tg : f->targets)
      if (!a.outputs.count(tg.source)) a.removed.insert(tg.source);
  }
  a.writes = a.outputs;
  a.writes.insert(a.removed.begin(), a.removed.end());
  return a;
}

static bool meets(const std::set<std::string>& x, const std::set<std::string>& y) {
  for (const auto& c : x)
    if (y.count(c)) return true;
  return false;
}

bool conflicts(const Access& lower, const Access& upper) {
  return meets(lower.writes, upper.reads) || meets(lower.reads, upper.writes) || meets(lower.writes, upper.writes);
}

bool is_rankable(const TermPtr& t) {
  return t->is<Filter>() || t->is<ArrayFilter>() || t->is<ArrayJoin>() || t->is<Derive>();
}

}  // namespace planning

PrecedenceGraph::PrecedenceGraph(size_t n)
    : adj_(n, std::vector<char>(n, 0)), reach_(n, std::vector<char>(n, 0)) {}

void PrecedenceGraph::add_edge(size_t from, size_t to) {
  if (from == to || reach_[to][from]) throw InfeasibleQuery("precedence cycle between operators");
  adj_[from][to] = 1;
  size_t n = size();
  for (size_t x = 0; x < n; ++x) {
    if (x != from && !reach_[x][from]) continue;
    for (size_t y = 0; y < n; ++y)
      if (y == to || reach_[to][y]) reach_[x][y] = 1;
  }
}

std::vector<std::pair<size_t, size_t>> PrecedenceGraph::edges() const {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t i = 0; i < size(); ++i)
    for (size_t j = 0; j < size(); ++j)
      if (adj_[i][j]) out.emplace_back(i, j);
  return out;
}

PrecedenceGraph PrecedenceGraph::restrict(const std::vector<size_t>& nodes) const {
  PrecedenceGraph g(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i)
    for (size_t j = 0; j < nodes.size(); ++j)
      if (reach_[nodes[i]][nodes[j]]) g.adj_[i][j] = g.reach_[i][j] = 1;
  return g;
}

static bool find_z(const PrecedenceGraph& g, size_t& za, size_t& zb) {
  size_t n = g.size();
  for (size_t b = 0; b < n; ++b)
    for (size_t c = 0; c < n; ++c) {
      if (!g.precedes(b, c)) continue;
      for (size_t a = 0; a < n; ++a) {
        if (a == b || !g.precedes(a, c) || g.comparable(a, b)) continue;
        for (size_t d = 0; d < n; ++d) {
          if (!g.precedes(b, d) || g.comparable(d, c) || g.comparable(a, d)) continue;
          za = a;
          zb = b;
          return true;
        }
      }
    }
  return false;
}

size_t repair_z(PrecedenceGraph& g, const std::function<bool(size_t, size_t)>& before) {
  size_t added = 0, a = 0, b = 0;
  while (find_z(g, a, b)) {
    if (before(a, b))
      g.add_edge(a, b);
    else
      g.add_edge(b, a);
    ++added;
  }
  return added;
}

PrecedenceGraph build_precedence(const std::vector<TermPtr>& ops, const std::vector<OpCostProfile>& profiles) {
  PrecedenceGraph g(ops.size());
  std::vector<planning::Access> acc;
  for (const auto& op : ops) acc.push_back(planning::access_of(op));
  for (size_t i = 0; i < ops.size(); ++i)
    for (size_t j = i + 1; j < ops.size(); ++j)
      if (planning::conflicts(acc[i], acc[j])) g.add_edge(i, j);
  repair_z(g, [&](size_t a, size_t b) {
    if (a < profiles.size() && b < profiles.size()) {
      if (rank_before(profiles[a], profiles[b])) return true;
      if (rank_before(profiles[b], profiles[a])) return false;
    }
    return a < b;
  });
  return g;
}

namespace {

struct Block {
  std::vector<size_t> ops;
  OpCostProfile p;
  size_t first = 0;
};

Block compose(const Block& a, const Block& b) {
  Block r;
  r.ops = a.ops;
  r.ops.insert(r.ops.end(), b.ops.begin(), b.ops.end());
  r.first = std::min(a.first, b.first);
  double m = a.p.multiplier() * b.p.multiplier();
  r.p.c = a.p.c + a.p.multiplier() * b.p.c;
  if (a.p.kind == OpKind::kArrayFilter && b.p.kind == OpKind::kArrayFilter) {
    r.p.kind = OpKind::kArrayFilter;
    r.p.s_a = a.p.s_a * b.p.s_a;
  } else {
    r.p.kind = OpKind::kFilter;
    r.p.s = m;
  }
  return r;
}

bool better(const Block& a, const Block& b) {
  if (rank_before(a.p, b.p)) return true;
  if (rank_before(b.p, a.p)) return false;
  return a.first < b.first;
}

class Sequencer {
 public:
  Sequencer(const std::vector<OpCostProfile>& profiles, const PrecedenceGraph& g) : profiles_(profiles), g_(g) {}

  std::vector<Block> solve(const std::vector<size_t>& nodes) {
    if (nodes.size() == 1) return {Block{{nodes[0]}, profiles_[nodes[0]], nodes[0]}};
    auto parts = components(nodes, true);
    if (parts.size() > 1) {
      std::vector<std::vector<Block>> lists;
      for (const auto& part : parts) lists.push_back(solve(part));
      return merge(lists);
    }
    parts = components(nodes, false);
    if (parts.size() < 2) throw Error("precedence graph is not series-parallel");
    std::sort(parts.begin(), parts.end(),
              [&](const auto& x, const auto& y) { return g_.precedes(x[0], y[0]); });
    std::vector<Block> out = solve(parts[0]);
    for (size_t k = 1; k < parts.size(); ++k) out = series(out, solve(parts[k]));
    return out;
  }

 private:
  // Connected components of the comparability graph (or of its complement).
  std::vector<std::vector<size_t>> components(const std::vector<size_t>& nodes, bool comparability) const {
    std::vector<size_t> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<size_t(size_t)> root = [&](size_t x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    for (size_t i = 0; i < nodes.size(); ++i)
      for (size_t j = i + 1; j < nodes.size(); ++j)
        if (g_.comparable(nodes[i], nodes[j]) == comparability) parent[root(i)] = root(j);
    std::vector<std::vector<size_t>> out;
    std::vector<int> slot(nodes.size(), -1);
    for (size_t i = 0; i < nodes.size(); ++i) {
      size_t r = root(i);
      if (slot[r] < 0) {
        slot[r] = static_cast<int>(out.size());
        out.emplace_back();
      }
      out[slot[r]].push_back(nodes[i]);
    }
    return out;
  }

  static std::vector<Block> merge(std::vector<std::vector<Block>>& lists) {
    std::vector<size_t> pos(lists.size(), 0);
    std::vector<Block> out;
    for (;;) {
      int pick = -1;
      for (size_t k = 0; k < lists.size(); ++k) {
        if (pos[k] == lists[k].size()) continue;
        if (pick < 0 || better(lists[k][pos[k]], lists[pick][pos[pick]])) pick = static_cast<int>(k);
      }
      if (pick < 0) return out;
      out.push_back(lists[pick][pos[pick]++]);
    }
  }

  // Everything in `head` precedes everything in `tail`; a tail block that
  // outranks the head blocks before it is glued to them.
  static std::vector<Block> series(const std::vector<Block>& head, const std::vector<Block>& tail) {
    std::vector<Block> out = head;
    std::vector<char> from_head(out.size(), 1);
    for (Block b : tail) {
      bool glued = false;
      while (!out.empty() && from_head.back() && better(b, out.back())) {
        b = compose(out.back(), b);
        out.pop_back();
        from_head.pop_back();
        glued = true;
      }
      out.push_back(b);
      from_head.push_back(glued);
    }
    return out;
  }

  const std::vector<OpCostProfile>& profiles_;
  const PrecedenceGraph& g_;
};

}  // namespace

std::vector<size_t> sort_ops(const std::vector<OpCostProfile>& profiles, const PrecedenceGraph& g) {
  if (profiles.size() != g.size()) throw Error("sort_ops: profile count does not match precedence graph");
  if (profiles.empty()) return {};
  std::vector<size_t> all(profiles.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<size_t> order;
  for (const auto& b : Sequencer(profiles, g).solve(all)) order.insert(order.end(), b.ops.begin(), b.ops.end());
  return order;
}

bool JoinGraph::connected() const {
  if (relations.empty()) return true;
  std::vector<char> seen(relations.size(), 0);
  std::vector<size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    size_t x = stack.back();
    stack.pop_back();
    for (const auto& e : edges) {
      size_t y = e.left == x ? e.right : e.right == x ? e.left : x;
      if (y != x && !seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace a3d
