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


#include "a3d/planner.hpp"

#include <algorithm>
#include <optional>

#include "a3d/errors.hpp"
#include "planner_internal.hpp"

namespace a3d {

std::string mode_name(PlanMode m) {
  switch (m) {
    case PlanMode::kGreedy:
      return "greedy";
    case PlanMode::kEnumerate:
      return "enumerate";
    case PlanMode::kOracle:
      return "oracle";
  }
  return "?";
}

PlanMode parse_mode(const std::string& name) {
  if (name == "greedy") return PlanMode::kGreedy;
  if (name == "enumerate") return PlanMode::kEnumerate;
  if (name == "oracle") return PlanMode::kOracle;
  throw ParseError("unknown planner mode '" + name + "'");
}

Planner::Planner(Catalog catalog, const StatsCatalog* stats, PlannerOptions options)
    : catalog_(std::move(catalog)), options_(options) {
  model_ = std::make_unique<CostModel>(catalog_, stats);
  env_ = std::make_unique<RewriteEnv>(catalog_, model_.get());
  env_->alpha = options_.preagg_alpha;
}

TermPtr Planner::optimize(const TermPtr& t) {
  output_schema(t, catalog_);
  TermPtr cur = preprocess(t);
  switch (options_.mode) {
    case PlanMode::kGreedy:
      cur = optimize_greedy(cur);
      break;
    case PlanMode::kEnumerate:
      cur = enumerate(cur);
      break;
    case PlanMode::kOracle:
      cur = oracle_enumerate(cur);
      break;
  }
  if (options_.preaggregate) cur = postprocess(cur);
  return cur;
}

TermPtr Planner::apply_to_fixpoint(const TermPtr& t, const std::vector<const Rule*>& rules, int cap,
                                   bool bottom_up) {
  TermPtr cur = t;
  for (int applied = 0;; ++applied) {
    auto paths = all_paths(cur);
    if (bottom_up) std::reverse(paths.begin(), paths.end());
    std::optional<TermPtr> next;
    for (const auto& path : paths) {
      for (const Rule* rule : rules)
        if ((next = try_apply_at(*rule, cur, path, *env_, &trace_))) break;
      if (next) break;
    }
    if (!next) return cur;
    if (applied >= cap) throw Error("rewriting did not reach a fixpoint within " + std::to_string(cap) + " steps");
    cur = *next;
  }
}

// ---------------------------------------------------------------------------
// Preprocessing

namespace {

struct Pulled {
  TermPtr term;
  std::optional<std::set<std::string>> keep;  // columns visible above
};

class Preprocessor {
 public:
  Preprocessor(RewriteEnv& env, std::vector<TraceEntry>* trace) : env_(env), trace_(trace) {}

  TermPtr pull_projections(const TermPtr& t) {
    Pulled p = pull(t);
    if (!p.keep || *p.keep == env_.schema(p.term).columns()) return p.term;
    return project(p.term, *p.keep);
  }

  TermPtr push_filters(const TermPtr& t) {
    TermPtr cur = t;
    for (int round = 0; round < 1000; ++round) {
      TermPtr next = push_pass(cur);
      if (same_term(next, cur)) return cur;
      cur = next;
    }
    throw Error("filter pushdown did not converge");
  }

 private:
  static TermPtr restore(const Pulled& p) { return p.keep ? project(p.term, *p.keep) : p.term; }

  Pulled pull(const TermPtr& t) {
    if (t->is<RelVar>()) return {t, std::nullopt};
    if (const auto* p = t->as<Project>()) {
      Pulled in = pull(p->input);
      return {in.term, p->columns};
    }
    if (t->is<Aggregate>()) return {with_input(t, pull_through(children(t)[0])), std::nullopt};
    if (const auto* j = t->as<Join>()) {
      Pulled l = pull(j->left), r = pull(j->right);
      auto full_l = env_.schema(l.term).columns(), full_r = env_.schema(r.term).columns();
      auto vis_l = l.keep ? *l.keep : full_l, vis_r = r.keep ? *r.keep : full_r;
      std::set<std::string> shared_full, shared_vis;
      std::set_intersection(full_l.begin(), full_l.end(), full_r.begin(), full_r.end(),
                            std::inserter(shared_full, shared_full.end()));
      std::set_intersection(vis_l.begin(), vis_l.end(), vis_r.begin(), vis_r.end(),
                            std::inserter(shared_vis, shared_vis.end()));
      // Hidden columns would become join keys once visible.
      if (shared_full != shared_vis) return {join(restore(l), restore(r)), std::nullopt};
      if (!l.keep && !r.keep) return {join(l.term, r.term), std::nullopt};
      vis_l.insert(vis_r.begin(), vis_r.end());
      return {join(l.term, r.term), vis_l};
    }
    Pulled in = pull(children(t)[0]);
    TermPtr out = with_input(t, in.term);
    if (!in.keep) return {out, std::nullopt};
    auto acc = planning::access_of(t);
    auto keep = *in.keep;
    for (const auto& c : acc.removed) keep.erase(c);
    keep.insert(acc.outputs.begin(), acc.outputs.end());
    return {out, keep};
  }

  TermPtr pull_through(const TermPtr& t) { return restore(pull(t)); }

  // σ over a join: conjuncts over one side move into that side.
  std::optional<TermPtr> filter_into_join(const TermPtr& t) {
    const auto* f = t->as<Filter>();
    if (!f || !f->input->is<Join>()) return std::nullopt;
    const auto& j = *f->input->as<Join>();
    const auto& ls = env_.schema(j.left);
    const auto& rs = env_.schema(j.right);
    std::vector<PredPtr> left, right, stay;
    for (const auto& c : split_conjuncts(f->pred)) {
      auto cols = columns_of(c);
      auto in = [&](const Schema& s) {
        return !cols.empty() && std::all_of(cols.begin(), cols.end(), [&](const auto& x) { return s.has(x); });
      };
      if (in(ls))
        left.push_back(c);
      else if (in(rs))
        right.push_back(c);
      else
        stay.push_back(c);
    }
    if (left.empty() && right.empty()) return std::nullopt;
    TermPtr l = left.empty() ? j.left : filter(j.left, conjoin(left));
    TermPtr r = right.empty() ? j.right : filter(j.right, conjoin(right));
    TermPtr out = join(l, r);
    return stay.empty() ? out : filter(out, conjoin(stay));
  }

  TermPtr push_pass(const TermPtr& t, const Path& at = {}) {
    static const std::vector<const Rule*> rules = {&find_rule("R2.1"), &find_rule("R8"), &find_rule("R13.1"),
                                                   &find_rule("R13.2"), &find_rule("R2.2")};
    TermPtr cur = t;
    for (int guard = 0; guard < 1000; ++guard) {
      std::optional<TermPtr> next;
      for (const Rule* r : rules) {
        if ((next = try_apply_at(*r, cur, {}, env_, trace_))) {
          if (trace_) trace_->back().path = at;
          break;
        }
      }
      if (!next) next = filter_into_join(cur);
      if (!next) break;
      cur = *next;
    }
    auto kids = children(cur);
    for (size_t i = 0; i < kids.size(); ++i) {
      Path sub = at;
      sub.push_back(static_cast<int>(i));
      kids[i] = push_pass(kids[i], sub);
    }
    return kids.empty() ? cur : with_children(cur, kids);
  }

  RewriteEnv& env_;
  std::vector<TraceEntry>* trace_;
};

size_t count_rankable(const TermPtr& t) {
  size_t n = planning::is_rankable(t) ? 1 : 0;
  for (const auto& k : children(t)) n += count_rankable(k);
  return n;
}

size_t count_relations(const TermPtr& t) {
  if (t->is<RelVar>()) return 1;
  size_t n = 0;
  for (const auto& k : children(t)) n += count_relations(k);
  return n;
}

}  // namespace

TermPtr Planner::preprocess(const TermPtr& t) {
  Preprocessor pre(*env_, &trace_);
  TermPtr cur = pre.pull_projections(t);
  cur = pre.push_filters(cur);
  return apply_to_fixpoint(cur, {&find_rule("R2.3")}, 10000, true);
}

// ---------------------------------------------------------------------------
// Enumeration

TermPtr Planner::optimize_blocks(const TermPtr& t, bool oracle) {
  if (t->is<RelVar>()) return t;
  if (t->is<Project>() || t->is<Aggregate>()) return with_input(t, optimize_blocks(children(t)[0], oracle));
  planning::BlockContext ctx{*model_, options_, stats_,
                             [this, oracle](const TermPtr& leaf) { return optimize_blocks(leaf, oracle); }};
  return planning::plan_block(t, ctx, oracle);
}

TermPtr Planner::enumerate(const TermPtr& t) {
  TermPtr cur = apply_to_fixpoint(t, {&find_rule("R16")}, 10000, false);
  return optimize_blocks(cur, false);
}

TermPtr Planner::oracle_enumerate(const TermPtr& t) {
  if (count_relations(t) > options_.oracle_max_relations || count_rankable(t) > options_.oracle_max_ops)
    throw InfeasibleQuery("query exceeds the oracle limits (" + std::to_string(options_.oracle_max_relations) +
                          " relations, " + std::to_string(options_.oracle_max_ops) + " operators)");
  TermPtr cur = apply_to_fixpoint(t, {&find_rule("R16")}, 10000, false);
  return optimize_blocks(cur, true);
}

JoinGraph Planner::join_graph(const TermPtr& t) {
  TermPtr cur = t;
  while (cur->is<Project>() || cur->is<Aggregate>()) cur = children(cur)[0];
  return planning::block_join_graph(cur, *model_);
}

// ---------------------------------------------------------------------------
// Post-processing and greedy mode

TermPtr Planner::postprocess(const TermPtr& t) {
  std::vector<const Rule*> rules;
  for (const char* id : {"R17.1", "R17.2", "R17.3", "R18", "R19", "R20", "R21"}) rules.push_back(&find_rule(id));
  TermPtr cur = apply_to_fixpoint(t, rules, options_.postprocess_cap, false);
  return simplify_reaggregation(cur);
}

TermPtr Planner::optimize_greedy(const TermPtr& t) {
  std::vector<const Rule*> rules;
  for (const auto& r : rule_catalog()) rules.push_back(&r);
  return apply_to_fixpoint(t, rules, options_.greedy_cap, true);
}

}  // namespace a3d
