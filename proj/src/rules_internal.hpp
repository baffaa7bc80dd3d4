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

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "a3d/rewrite.hpp"

namespace a3d::rules {

using Names = std::set<std::string>;

Names sources(const std::vector<Target>& ts);
Names aliases(const std::vector<Target>& ts);
bool disjoint(const Names& a, const Names& b);
bool subset(const Names& a, const Names& b);
Names unite(Names a, const Names& b);
Names minus(Names a, const Names& b);
Names shared_columns(const Schema& a, const Schema& b);

/// Splits the conjuncts of p into those satisfying `keep` and the rest.
template <class F>
std::pair<std::vector<PredPtr>, std::vector<PredPtr>> partition(const PredPtr& p, F keep) {
  std::pair<std::vector<PredPtr>, std::vector<PredPtr>> out;
  for (const auto& c : split_conjuncts(p)) (keep(c) ? out.first : out.second).push_back(c);
  return out;
}

/// σ over the conjunction of parts, or the input itself when parts is empty.
TermPtr filter_if(TermPtr input, const std::vector<PredPtr>& parts);

/// True if the term is σ_{length(a) != 0}(..) for the given array.
bool is_nonempty_filter(const TermPtr& t, const std::string& array);
PredPtr nonempty_pred(const std::string& array);

std::vector<Rule> unnest_rules();
std::vector<Rule> derive_rules();
std::vector<Rule> aggregate_rules();

}  // namespace a3d::rules
