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


// a3d: batch driver. Reads a plan document (and optional statistics),
// optimizes it and writes the requested artifact to stdout.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "a3d/errors.hpp"
#include "a3d/io.hpp"
#include "a3d/planner.hpp"
#include "a3d/testkit.hpp"
#include "a3d/translate.hpp"

namespace {

using a3d::Json;
using Clock = std::chrono::steady_clock;

enum Exit { kOk = 0, kParse = 1, kSchema = 2, kInfeasible = 3, kDialect = 4 };

int diagnose(const char* kind, int code, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"exit", code}, {"message", message}}.dump() << "\n";
  return code;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw a3d::ParseError("cannot write " + path);
  out << text;
}

struct RunArgs {
  std::string plan;
  std::string stats;
  std::string mode;
  std::string emit = "plan";
  std::string out;
  bool trace = false;
  bool time = false;
  bool cte = false;
  bool annotate = false;
  std::optional<double> alpha;
  bool no_preagg = false;
  bool cross = false;
  std::optional<int> oracle_relations;
  std::optional<uint64_t> seed;
};

class Stopwatch {
 public:
  template <class F>
  auto run(const std::string& stage, F&& f) {
    auto start = Clock::now();
    auto result = f();
    timings_[stage + "_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return result;
  }
  const Json& timings() const { return timings_; }

 private:
  Json timings_ = Json::object();
};

void print_trace(const std::vector<a3d::TraceEntry>& trace, size_t from) {
  for (size_t i = from; i < trace.size(); ++i) {
    const auto& e = trace[i];
    std::cerr << Json{{"rule", e.rule_id}, {"path", e.path}, {"before", e.before_cost}, {"after", e.after_cost}}.dump()
              << "\n";
  }
}

int run(const RunArgs& args) {
  using namespace a3d;
  Stopwatch clock;
  auto doc = clock.run("parse", [&] { return plan_from_json(parse_json(read_file(args.plan))); });
  std::optional<StatsCatalog> stats;
  if (!args.stats.empty())
    stats = clock.run("stats", [&] { return stats_from_json(parse_json(read_file(args.stats))); });

  PlannerOptions options = doc.options;
  if (!args.mode.empty()) options.mode = parse_mode(args.mode);
  if (args.alpha) options.preagg_alpha = *args.alpha;
  if (args.no_preagg) options.preaggregate = false;
  if (args.cross) options.allow_cross_products = true;
  if (args.oracle_relations) options.oracle_max_relations = *args.oracle_relations;

  Planner planner(doc.catalog, stats ? &*stats : nullptr, options);
  clock.run("schema_check", [&] { return output_schema(doc.term, doc.catalog); });
  size_t traced = 0;
  auto stage = [&](const std::string& name, auto&& f) {
    auto out = clock.run(name, f);
    if (args.trace) print_trace(planner.trace(), traced);
    traced = planner.trace().size();
    return out;
  };
  TermPtr t = stage("preprocess", [&] { return planner.preprocess(doc.term); });
  t = stage(mode_name(options.mode), [&] {
    switch (options.mode) {
      case PlanMode::kGreedy:
        return planner.optimize_greedy(t);
      case PlanMode::kOracle:
        return planner.oracle_enumerate(t);
      default:
        return planner.enumerate(t);
    }
  });
  if (options.preaggregate) t = stage("postprocess", [&] { return planner.postprocess(t); });

  std::string artifact = clock.run("emit", [&] {
    if (args.emit == "plan") return to_json(PlanDocument{doc.catalog, t, options}).dump(2) + "\n";
    if (args.emit == "sql-clickhouse" || args.emit == "sql-generic") {
      const auto& dialect = dialect_by_name(args.emit.substr(4));
      return to_sql(t, doc.catalog, dialect, {.cte = args.cte}) + "\n";
    }
    return to_dot(t, args.annotate ? &planner.model() : nullptr);
  });

  if (args.time) {
    Json timings = clock.timings();
    double optimize = 0;
    for (const auto& key : {"preprocess_ms", "greedy_ms", "enumerate_ms", "oracle_ms", "postprocess_ms"})
      if (timings.contains(key)) optimize += timings[key].get<double>();
    timings["optimize_ms"] = optimize;
    std::cerr << Json{{"timing", timings},
                      {"cost_before", planner.cost(doc.term)},
                      {"cost_after", planner.cost(t)}}
                     .dump()
              << "\n";
  }
  write_output(args.out, artifact);
  return kOk;
}

int gen(const std::string& spec_path, const std::string& name, const std::string& out) {
  using namespace a3d;
  auto spec = genspec_from_json(parse_json(read_file(spec_path)));
  Relation r;
  try {
    r = generate(spec);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  write_output(out, to_json(Database{{name, r}}).dump() + "\n");
  return kOk;
}

struct PatternArgs {
  std::string kind = "A";
  int n = 1;
  size_t rows = 1000;
  uint64_t seed = 1;
  std::string out;
  std::string stats_out;
  std::string data_out;
};

int pattern(const PatternArgs& args) {
  using namespace a3d;
  auto kind = args.kind == "A" ? PatternKind::kA : PatternKind::kB;
  auto q = make_pattern(kind, args.n);
  write_output(args.out, to_json(PlanDocument{q.catalog, q.term, {}}).dump(2) + "\n");
  if (args.stats_out.empty() && args.data_out.empty()) return kOk;
  Database db{{"R", pattern_data(kind, args.n, args.rows, args.seed)}};
  if (!args.data_out.empty()) write_output(args.data_out, to_json(db).dump() + "\n");
  if (!args.stats_out.empty()) write_output(args.stats_out, to_json(build_stats(db)).dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A3D-RA logical optimizer for array queries"};
  app.require_subcommand(0, 1);

  RunArgs args;
  app.add_option("--plan", args.plan, "Plan document (JSON)");
  app.add_option("--stats", args.stats, "Statistics or data document (JSON)");
  app.add_option("--mode", args.mode, "Optimization mode (overrides the plan options)")
      ->check(CLI::IsMember({"greedy", "enumerate", "oracle"}));
  app.add_option("--emit", args.emit, "Output artifact")
      ->check(CLI::IsMember({"plan", "sql-clickhouse", "sql-generic", "dot"}));
  app.add_option("-o,--out", args.out, "Write the artifact here instead of stdout");
  app.add_flag("--trace", args.trace, "Print rule applications to stderr as JSON lines");
  app.add_flag("--time", args.time, "Print per-stage wall-clock times to stderr");
  app.add_flag("--cte", args.cte, "Emit SQL with WITH clauses instead of nested subqueries");
  app.add_flag("--annotate", args.annotate, "Annotate dot nodes with estimated rows and cost");
  app.add_option("--preagg-alpha", args.alpha, "Pre-aggregation reduction threshold")->check(CLI::Range(0.0, 1.0));
  app.add_flag("--no-preagg", args.no_preagg, "Skip the pre-aggregation pass");
  app.add_flag("--allow-cross-products", args.cross, "Allow joins without shared columns");
  app.add_option("--oracle-max-relations", args.oracle_relations, "Relation limit of the oracle mode");
  app.add_option("--seed", args.seed, "Seed for randomized tie-breaks (the planner is deterministic)");

  auto* gen_cmd = app.add_subcommand("gen", "Generate a relation from a generator spec");
  std::string spec_path, gen_name = "R", gen_out;
  gen_cmd->add_option("--spec", spec_path, "Generator spec (JSON)")->required();
  gen_cmd->add_option("--name", gen_name, "Relation name");
  gen_cmd->add_option("--out", gen_out, "Output data document");

  auto* pat_cmd = app.add_subcommand("pattern", "Write a scaling pattern as a plan document");
  PatternArgs pat;
  pat_cmd->add_option("--kind", pat.kind, "A or B")->check(CLI::IsMember({"A", "B"}));
  pat_cmd->add_option("--n", pat.n, "Pattern size")->check(CLI::PositiveNumber);
  pat_cmd->add_option("--rows", pat.rows, "Rows of generated data");
  pat_cmd->add_option("--seed", pat.seed, "Data seed");
  pat_cmd->add_option("--out", pat.out, "Plan output");
  pat_cmd->add_option("--stats-out", pat.stats_out, "Also write statistics of generated data");
  pat_cmd->add_option("--data-out", pat.data_out, "Also write the generated data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kParse;
  }

  try {
    if (gen_cmd->parsed()) return gen(spec_path, gen_name, gen_out);
    if (pat_cmd->parsed()) return pattern(pat);
    if (args.plan.empty()) return diagnose("usage", kParse, "--plan is required");
    return run(args);
  } catch (const a3d::ParseError& e) {
    return diagnose("parse", kParse, e.what());
  } catch (const a3d::SchemaError& e) {
    return diagnose("schema", kSchema, e.what());
  } catch (const a3d::DialectError& e) {
    return diagnose("dialect", kDialect, e.what());
  } catch (const a3d::Error& e) {
    return diagnose("infeasible", kInfeasible, e.what());
  }
}
