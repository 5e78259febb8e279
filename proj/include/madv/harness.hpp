#pragma once

// Experiment driver shared by the CLI and the acceptance suite: one adversary
// run per (n, delta, algorithm) cell, sweeps over grids, recovery runs.

#include <atomic>
#include <chrono>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "madv/adversary.hpp"
#include "madv/algorithms.hpp"
#include "madv/oracle.hpp"
#include "madv/replay.hpp"
#include "madv/sparse_recovery.hpp"
#include "madv/validate.hpp"

namespace madv {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitValidation = 2,
  kExitPremise = 3,
  kExitInvariant = 4,
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptySafeSet: return kExitPremise;
    case ErrorKind::BoundViolation:
    case ErrorKind::ReplayMismatch:
    case ErrorKind::InternalInvariant: return kExitInvariant;
    default: return kExitError;
  }
}

/// One experiment cell. Optional columns are empty when not computed.
struct RunRecord {
  std::size_t n = 0;
  std::string delta;
  std::string algorithm;
  std::optional<std::uint64_t> q_total;
  std::optional<std::uint64_t> redundant_queries;
  std::optional<std::uint64_t> b_size;
  std::optional<std::uint32_t> alpha_phat;
  std::optional<Cost> cost_p;
  std::optional<Cost> cost_phat;
  std::optional<Cost> cost_opt;
  std::optional<Ratio> measured_ratio;
  std::optional<Ratio> ratio_floor;
  std::optional<double> wall_time_ms;
  /// "ok" or the error kind that stopped the cell.
  std::string status = "ok";
};

inline const std::vector<std::string>& run_record_columns() {
  static const std::vector<std::string> cols{
      "n",       "delta",     "algorithm", "q_total",        "redundant_queries",
      "b_size",  "alpha_phat", "cost_p",   "cost_phat",      "cost_opt",
      "measured_ratio", "ratio_floor", "wall_time_ms", "status"};
  return cols;
}

namespace detail {

template <class T>
std::string cell(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, Ratio>) {
    return to_string(*v);
  } else if constexpr (std::is_same_v<T, double>) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << *v;
    return os.str();
  } else {
    return std::to_string(*v);
  }
}

template <class T>
nlohmann::json json_cell(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, Ratio>) {
    return to_string(*v);
  } else {
    return *v;
  }
}

}  // namespace detail

inline std::vector<std::string> csv_fields(const RunRecord& r) {
  return {std::to_string(r.n),
          r.delta,
          r.algorithm,
          detail::cell(r.q_total),
          detail::cell(r.redundant_queries),
          detail::cell(r.b_size),
          detail::cell(r.alpha_phat),
          detail::cell(r.cost_p),
          detail::cell(r.cost_phat),
          detail::cell(r.cost_opt),
          detail::cell(r.measured_ratio),
          detail::cell(r.ratio_floor),
          detail::cell(r.wall_time_ms),
          r.status};
}

inline nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["delta"] = r.delta;
  j["algorithm"] = r.algorithm;
  j["q_total"] = detail::json_cell(r.q_total);
  j["redundant_queries"] = detail::json_cell(r.redundant_queries);
  j["b_size"] = detail::json_cell(r.b_size);
  j["alpha_phat"] = detail::json_cell(r.alpha_phat);
  j["cost_p"] = detail::json_cell(r.cost_p);
  j["cost_phat"] = detail::json_cell(r.cost_phat);
  j["cost_opt"] = detail::json_cell(r.cost_opt);
  j["measured_ratio"] = detail::json_cell(r.measured_ratio);
  j["ratio_floor"] = detail::json_cell(r.ratio_floor);
  j["wall_time_ms"] = detail::json_cell(r.wall_time_ms);
  j["status"] = r.status;
  return j;
}

inline std::string to_json_line(const RunRecord& r) { return to_json(r).dump(); }

struct RunOptions {
  std::optional<std::uint64_t> budget;
  /// Full O(n^3) validation; otherwise only when n <= full_validate_max_n.
  bool full_validate = false;
  std::size_t full_validate_max_n = 300;
  std::size_t cost_opt_max_n = 2000;
  bool replay = true;
  bool validate = true;
  bool timing = false;
  bool record_trace = false;
  /// Stop a run as soon as EmptySafeSet is certain instead of finishing it.
  bool early_empty_safe_set = true;
};

struct CellOutcome {
  RunRecord record;
  int exit_code = kExitOk;
  std::string error;
  std::optional<FinalizedInstance> instance;
  std::optional<InstanceReport> report;
  std::optional<ValidationReport> structured;
  std::optional<ValidationReport> full;
  RunTrace trace;
};

/// Algorithm vs fresh adversary, then pad, finalize, audit, validate, replay.
inline CellOutcome run_cell(std::size_t n, const DeltaParam& delta, const AlgorithmId& alg,
                            const RunOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  CellOutcome out;
  out.record.n = n;
  out.record.delta = delta.to_string();
  out.record.algorithm = alg.to_string();
  auto stamp = [&] {
    if (opt.timing) {
      out.record.wall_time_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  };
  try {
    Adversary adv(n, delta);
    adv.stop_when_safe_set_exhausted(opt.early_empty_safe_set);
    AdversarySource source(adv);
    OracleHandle oracle(source, opt.budget, opt.record_trace);
    out.trace = run(alg, oracle);
    out.record.redundant_queries = out.trace.redundant_queries;
    adv.pad_output_queries(out.trace.output);
    out.record.q_total = adv.log().size();
    out.instance.emplace(adv.finalize(out.trace.output));
    const FinalizedInstance& inst = *out.instance;
    out.record.b_size = inst.heavy_set().size();
    out.record.alpha_phat = inst.alpha_phat();

    out.report = instance_report(inst);
    out.record.cost_p = out.report->cost_p;
    out.record.cost_phat = out.report->cost_phat;
    out.record.measured_ratio = out.report->measured_ratio;
    out.record.ratio_floor = out.report->ratio_floor;

    if (opt.validate) {
      out.structured = validate_metric(inst, ValidationMode::Structured);
      if (opt.full_validate || n <= opt.full_validate_max_n) {
        ValidateOptions vo;
        vo.mode = ValidationMode::Full;
        vo.full_cap = std::max(vo.full_cap, n);
        out.full = validate_metric(inst, vo);
      }
      const bool valid = out.structured->ok() && (!out.full || out.full->ok());
      if (!valid) {
        out.record.status = "ValidationFailure";
        out.exit_code = kExitValidation;
        out.error = "finalized instance failed metric validation";
        stamp();
        return out;
      }
    }
    if (opt.replay) replay_consistency(inst, alg);
    if (n <= opt.cost_opt_max_n) out.record.cost_opt = exact_median(inst).cost;
  } catch (const Error& e) {
    out.record.status = std::string(to_string(e.kind()));
    out.exit_code = exit_code_for(e.kind());
    out.error = e.what();
  }
  stamp();
  return out;
}

struct SweepPlan {
  std::vector<std::size_t> ns;
  std::vector<DeltaParam> deltas;
  std::vector<AlgorithmId> algorithms;
};

/// Cells in (n, delta, algorithm) order regardless of worker count.
inline std::vector<RunRecord> run_sweep(const SweepPlan& plan, const RunOptions& opt = {},
                                        unsigned workers = 1) {
  struct Cell {
    std::size_t n;
    DeltaParam delta;
    AlgorithmId alg;
  };
  std::vector<Cell> cells;
  for (auto n : plan.ns) {
    for (const auto& d : plan.deltas) {
      for (const auto& a : plan.algorithms) cells.push_back({n, d, a});
    }
  }
  std::vector<RunRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      records[i] = run_cell(cells[i].n, cells[i].delta, cells[i].alg, opt).record;
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cells.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return records;
}

inline void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  const auto& cols = run_record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : records) {
    const auto f = csv_fields(r);
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
    out << '\n';
  }
}

inline void write_jsonl(std::ostream& out, const std::vector<RunRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

struct RecoveryOutcome {
  std::string status = "ok";
  std::size_t query_count = 0;
  std::optional<RecoveryChain> chain;
};

inline nlohmann::json to_json(const RecoveryOutcome& r) {
  nlohmann::json j{{"status", r.status}, {"query_count", r.query_count}};
  if (r.chain) {
    j.update(to_json(*r.chain));
    j["chain_holds"] = r.chain->holds();
  }
  return j;
}

inline RecoveryOutcome recover(const MetricView& m, std::span<const PairKey> pairs) {
  RecoveryOutcome out;
  out.query_count = pairs.size();
  const QuerySet g = build_query_graph(m, pairs);
  const CompletedMetric dq = shortest_path_completion(g);
  try {
    out.chain = check_recovery_chain(dq, m);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Disconnected) throw;
    out.status = "Disconnected";
  }
  return out;
}

inline RecoveryOutcome recover(const QuerySet& g, const MetricView& m) {
  RecoveryOutcome out;
  out.query_count = g.edges().size();
  const CompletedMetric dq = shortest_path_completion(g);
  try {
    out.chain = check_recovery_chain(dq, m);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Disconnected) throw;
    out.status = "Disconnected";
  }
  return out;
}

}  // namespace madv
