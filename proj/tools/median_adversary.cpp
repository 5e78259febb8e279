// median_adversary: run algorithms against the adversary, sweep parameter
// grids, validate metric files and run shortest-path recovery experiments.
//
// Exit codes: 0 success, 1 usage/parse error, 2 validation failure,
// 3 adversary premise failure (EmptySafeSet), 4 internal invariant violation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "madv/madv.hpp"

namespace {

using namespace madv;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t parse_count(const std::string& text) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) {
    throw Error(ErrorKind::InvalidArgument, "expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  return f;
}

int fail(const Error& e) {
  nlohmann::json j{{"status", std::string(to_string(e.kind()))}, {"error", e.what()}};
  std::cout << j.dump() << '\n';
  return exit_code_for(e.kind());
}

struct RunArgs {
  std::size_t n = 0;
  std::string delta;
  std::string alg;
  std::optional<std::uint64_t> budget;
  std::string format = "json";
  std::string out;
  std::string export_instance;
  std::string export_metric;
  std::string export_trace;
  bool full_validate = false;
  bool timing = false;
};

int cmd_run(const RunArgs& a) {
  const DeltaParam delta = DeltaParam::parse(a.delta);
  const AlgorithmId alg = AlgorithmId::parse(a.alg);
  AlgorithmRegistry::builtin().find(alg.name);
  RunOptions opt;
  opt.budget = a.budget;
  opt.full_validate = a.full_validate;
  opt.timing = a.timing;
  opt.record_trace = !a.export_trace.empty();
  CellOutcome cell = run_cell(a.n, delta, alg, opt);

  if (!a.export_trace.empty()) {
    auto f = open_out(a.export_trace);
    for (const auto& e : cell.trace.entries) {
      f << nlohmann::json::array({e.pair.lo, e.pair.hi, e.answer}).dump() << '\n';
    }
  }
  if (cell.instance && !a.export_instance.empty()) {
    auto f = open_out(a.export_instance);
    f << cell.instance->to_json().dump() << '\n';
  }
  if (cell.instance && !a.export_metric.empty()) {
    if (a.n > 3000) throw Error(ErrorKind::InvalidArgument, "dense export is limited to n <= 3000");
    auto f = open_out(a.export_metric);
    write_dense_metric(f, *cell.instance);
  }

  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& os = a.out.empty() ? std::cout : file;
  if (a.format == "csv") {
    write_csv(os, {cell.record});
  } else if (a.format == "jsonl") {
    write_jsonl(os, {cell.record});
  } else {
    nlohmann::ordered_json j;
    j["record"] = to_json(cell.record);
    if (cell.report) j["report"] = to_json(*cell.report);
    if (cell.structured) j["structured_validation"] = to_json(*cell.structured);
    if (cell.full) j["full_validation"] = to_json(*cell.full);
    if (!cell.error.empty()) j["error"] = cell.error;
    j["exit_code"] = cell.exit_code;
    os << j.dump(2) << '\n';
  }
  return cell.exit_code;
}

struct SweepArgs {
  std::string ns;
  std::string deltas;
  std::string algs;
  std::optional<std::uint64_t> budget;
  unsigned workers = 1;
  std::string out;
  std::string format = "csv";
  bool timing = false;
};

int cmd_sweep(SweepArgs a) {
  SweepPlan plan;
  for (const auto& s : split_list(a.ns)) plan.ns.push_back(parse_count(s));
  for (const auto& s : split_list(a.deltas)) plan.deltas.push_back(DeltaParam::parse(s));
  for (const auto& s : split_list(a.algs)) {
    plan.algorithms.push_back(AlgorithmId::parse(s));
    AlgorithmRegistry::builtin().find(plan.algorithms.back().name);
  }
  if (const char* env = std::getenv("MEDIAN_ADVERSARY_WORKERS")) {
    a.workers = static_cast<unsigned>(parse_count(env));
  }
  RunOptions opt;
  opt.budget = a.budget;
  opt.timing = a.timing;
  const auto records = run_sweep(plan, opt, std::max(1u, a.workers));

  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& os = a.out.empty() ? std::cout : file;
  if (a.format == "jsonl") write_jsonl(os, records);
  else write_csv(os, records);
  return 0;
}

int cmd_validate(const std::string& path, const std::string& mode, std::size_t max_full_n) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
  const DenseMetric m = read_dense_metric(f);
  ValidateOptions opt;
  opt.mode = mode == "structured" ? ValidationMode::Structured : ValidationMode::Full;
  opt.full_cap = max_full_n;
  const ValidationReport rep = validate_metric(m, opt);
  nlohmann::json j = to_json(rep);
  j["n"] = m.size();
  std::cout << j.dump(2) << '\n';
  return rep.ok() ? kExitOk : kExitValidation;
}

struct RecoverArgs {
  std::size_t n = 0;
  std::string delta;
  std::string alg;
  std::string metric;
  std::string queries;
  std::string source = "run";
};

int cmd_recover(const RecoverArgs& a) {
  nlohmann::ordered_json j;
  RecoveryOutcome outcome;
  if (!a.metric.empty()) {
    std::ifstream f(a.metric);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot read " + a.metric);
    const DenseMetric m = read_dense_metric(f);
    if (!a.queries.empty()) {
      std::ifstream qf(a.queries);
      if (!qf) throw Error(ErrorKind::InvalidArgument, "cannot read " + a.queries);
      const QuerySet g = read_query_set(qf);
      if (g.n() != m.size()) throw Error(ErrorKind::InvalidArgument, "query set and metric sizes differ");
      outcome = recover(g, m);
      j["query_source"] = a.queries;
    } else {
      if (a.source != "all" && a.source != "empty") {
        throw Error(ErrorKind::InvalidArgument, "with --metric use --queries FILE or --query-source all|empty");
      }
      const auto pairs = a.source == "all" ? all_pairs(m.size()) : std::vector<PairKey>{};
      outcome = recover(m, pairs);
      j["query_source"] = a.source;
    }
  } else {
    if (a.n > 3000) throw Error(ErrorKind::InvalidArgument, "recovery is limited to n <= 3000");
    RunOptions opt;
    opt.replay = false;
    CellOutcome cell = run_cell(a.n, DeltaParam::parse(a.delta), AlgorithmId::parse(a.alg), opt);
    j["record"] = to_json(cell.record);
    if (!cell.instance) {
      j["error"] = cell.error;
      std::cout << j.dump(2) << '\n';
      return cell.exit_code;
    }
    std::vector<PairKey> pairs;
    if (a.source == "run") pairs = cell.instance->log().seq();
    else if (a.source == "all") pairs = all_pairs(a.n);
    else if (a.source != "empty") throw Error(ErrorKind::InvalidArgument, "--query-source must be run, all or empty");
    outcome = recover(*cell.instance, pairs);
    j["query_source"] = a.source;
  }
  j["recovery"] = to_json(outcome);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial lower-bound laboratory for metric 1-median"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run one algorithm against a fresh adversary");
  run->add_option("--n", run_args.n, "number of points")->required();
  run->add_option("--delta", run_args.delta, "delta as num/den, in (0, 1/10)")->required();
  run->add_option("--alg", run_args.alg, "exhaustive | pivot | pivot_h[:h] | greedy_probe")->required();
  run->add_option("--budget", run_args.budget, "distinct query budget");
  run->add_option("--format", run_args.format, "json | csv | jsonl")
      ->check(CLI::IsMember({"json", "csv", "jsonl"}));
  run->add_option("--out", run_args.out, "write the record here instead of stdout");
  run->add_option("--export-instance", run_args.export_instance, "finalized instance as JSON");
  run->add_option("--export-metric", run_args.export_metric, "finalized metric as dense text (n <= 3000)");
  run->add_option("--export-trace", run_args.export_trace, "query trace as JSON lines [x,y,d]");
  run->add_flag("--full-validate", run_args.full_validate, "always run the O(n^3) validator");
  run->add_flag("--timing", run_args.timing, "fill wall_time_ms (makes output nondeterministic)");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "run a grid of (n, delta, algorithm) cells");
  sweep->add_option("--n", sweep_args.ns, "comma-separated point counts")->required();
  sweep->add_option("--delta", sweep_args.deltas, "comma-separated num/den values")->required();
  sweep->add_option("--alg", sweep_args.algs, "comma-separated algorithms (may be empty)")->required();
  sweep->add_option("--budget", sweep_args.budget, "distinct query budget per cell");
  sweep->add_option("--workers", sweep_args.workers, "parallel cells (MEDIAN_ADVERSARY_WORKERS overrides)");
  sweep->add_option("--out", sweep_args.out, "output file (default stdout)");
  sweep->add_option("--format", sweep_args.format, "csv | jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  sweep->add_flag("--timing", sweep_args.timing, "fill wall_time_ms (makes output nondeterministic)");

  std::string validate_path;
  std::string validate_mode = "full";
  std::size_t max_full_n = 300;
  auto* validate = app.add_subcommand("validate", "check a dense metric file");
  validate->add_option("path", validate_path, "metric text file")->required();
  validate->add_option("--mode", validate_mode, "full | structured")
      ->check(CLI::IsMember({"full", "structured"}));
  validate->add_option("--max-full-n", max_full_n, "largest n accepted by full mode");

  RecoverArgs recover_args;
  auto* rec = app.add_subcommand("recover", "shortest-path completion from a query set");
  rec->add_option("--n", recover_args.n, "number of points (adversary instance)");
  rec->add_option("--delta", recover_args.delta, "delta as num/den");
  rec->add_option("--alg", recover_args.alg, "algorithm producing the instance and its queries");
  rec->add_option("--metric", recover_args.metric, "dense metric file instead of an adversary run");
  rec->add_option("--queries", recover_args.queries, "query set file 'n m' + 'lo hi length' lines");
  rec->add_option("--query-source", recover_args.source, "run | all | empty")
      ->check(CLI::IsMember({"run", "all", "empty"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*validate) return cmd_validate(validate_path, validate_mode, max_full_n);
    if (*rec) {
      if (recover_args.metric.empty() &&
          (recover_args.n == 0 || recover_args.delta.empty() || recover_args.alg.empty())) {
        throw Error(ErrorKind::InvalidArgument, "recover needs --metric or all of --n, --delta, --alg");
      }
      return cmd_recover(recover_args);
    }
  } catch (const Error& e) {
    return fail(e);
  }
  return 0;
}
