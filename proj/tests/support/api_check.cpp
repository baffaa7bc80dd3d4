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


#include "api_check.hpp"

#include <algorithm>
#include <cmath>

#include "a3d/planner.hpp"
#include "random_queries.hpp"

namespace a3d::testing {

ApiOutcome api_pair_check(SplitMix64& rng, double rel_tol) {
  ApiOutcome out;
  RandomQuery q = random_query(rng, QueryShape{0, 6, 200, 0, 0});
  std::vector<TermPtr> ops;  // bottom-up
  TermPtr base = q.term;
  for (; !base->is<RelVar>(); base = children(base)[0]) ops.insert(ops.begin(), base);
  if (ops.size() < 2) return out;
  size_t k = rng.below(ops.size() - 1);
  PrecedenceGraph g = build_precedence(ops, {});
  if (g.comparable(k, k + 1)) return out;

  StatsCatalog stats = build_stats(q.db);
  CostModel model(q.catalog, &stats);
  TermPtr u = base;
  for (size_t x = 0; x < k; ++x) u = with_input(ops[x], u);
  auto finish = [&](TermPtr t) {
    for (size_t x = k + 2; x < ops.size(); ++x) t = with_input(ops[x], t);
    return t;
  };
  TermPtr ij = finish(with_input(ops[k + 1], with_input(ops[k], u)));
  TermPtr ji = finish(with_input(ops[k], with_input(ops[k + 1], u)));
  OpCostProfile pi = model.profile(with_input(ops[k], u));
  OpCostProfile pj = model.profile(with_input(ops[k + 1], u));
  double c_ij = model.cost(ij), c_ji = model.cost(ji);
  double tol = rel_tol * std::max({1.0, c_ij, c_ji});
  out.checked = true;
  if (rank_before(pi, pj))
    out.holds = c_ij <= c_ji + tol;
  else if (rank_before(pj, pi))
    out.holds = c_ji <= c_ij + tol;
  else  // equal ranks: either order may be called i ≲ j
    out.holds = std::abs(c_ij - c_ji) <= tol;
  if (!out.holds)
    out.detail = to_string(ij) + " costs " + std::to_string(c_ij) + ", " + to_string(ji) + " costs " +
                 std::to_string(c_ji) + " (difference " + std::to_string((c_ij - c_ji) / std::max(c_ij, c_ji)) + ", ranks " +
                 std::to_string(pi.vertical_rank()) + "/" + std::to_string(pj.vertical_rank()) + ")";
  return out;
}

}  // namespace a3d::testing
