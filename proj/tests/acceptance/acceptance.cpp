// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "madv/madv.hpp"

namespace {

using namespace madv;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::vector<std::pair<int, Verdict>> g_results;

void report(int id, const Verdict& v) {
  std::cout << "CRITERION " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
  g_results.emplace_back(id, v);
}

const std::vector<std::string> kBuiltins{"exhaustive", "pivot", "pivot_h", "greedy_probe"};

// Shared grid: every built-in algorithm, n in {50, 100, 300, 1000, 10000},
// delta in {1/20, 1/15}.
struct GridCell {
  std::size_t n;
  DeltaParam delta;
  std::string alg;
  CellOutcome out;
};

std::vector<GridCell> build_grid(double& seconds) {
  const auto t0 = Clock::now();
  std::vector<GridCell> grid;
  for (std::size_t n : {50u, 100u, 300u, 1000u, 10000u}) {
    for (const DeltaParam& d : {DeltaParam(1, 20), DeltaParam(1, 15)}) {
      for (const auto& alg : kBuiltins) {
        RunOptions opt;
        opt.cost_opt_max_n = 1000;
        grid.push_back({n, d, alg, run_cell(n, d, AlgorithmId::parse(alg), opt)});
        const CellOutcome& c = grid.back().out;
        if (c.instance && n > 1000) {
          // Large instances are only needed for the checks above; free them.
          grid.back().out.instance.reset();
        }
      }
    }
  }
  seconds = seconds_since(t0);
  return grid;
}

std::string cell_name(const GridCell& c) {
  return c.alg + "@n=" + std::to_string(c.n) + ",delta=" + c.delta.to_string();
}

bool finalized(const GridCell& c) { return c.out.report.has_value(); }

bool unexpected_status(const GridCell& c) {
  return c.out.record.status != "ok" && c.out.record.status != "EmptySafeSet";
}

Verdict criterion_metricity(const std::vector<GridCell>& grid, double grid_seconds) {
  Verdict v;
  std::size_t full = 0, structured = 0, empty = 0;
  for (const auto& c : grid) {
    if (unexpected_status(c)) {
      v.pass = false;
      v.detail += " [" + cell_name(c) + ": " + c.out.record.status + "]";
      continue;
    }
    if (!finalized(c)) {
      ++empty;
      continue;
    }
    if (c.n <= 300) {
      if (!c.out.full || !c.out.full->ok()) {
        v.pass = false;
        v.detail += " [full validator failed on " + cell_name(c) + "]";
      }
      ++full;
    }
    if (!c.out.structured || !c.out.structured->ok()) {
      v.pass = false;
      v.detail += " [structured validator failed on " + cell_name(c) + "]";
    }
    if (c.n >= 1000) ++structured;
  }
  if (full + structured == 0) {
    v.pass = false;
    v.detail += " [no finalized instance]";
  }
  if (grid_seconds >= 30.0) {
    v.pass = false;
    v.detail += " [runtime over 30 s]";
  }
  std::ostringstream os;
  os.precision(1);
  os << std::fixed << full << " instances full-validated (n<=300), " << structured
     << " structured-validated (n>=1000), " << empty << " cells ended in EmptySafeSet; grid time "
     << grid_seconds << " s" << v.detail;
  v.detail = os.str();
  return v;
}

Verdict criterion_lower_bound(const std::vector<GridCell>& grid) {
  Verdict v;
  std::size_t checked = 0;
  for (const auto& c : grid) {
    if (unexpected_status(c)) {
      v.pass = false;
      v.detail += " [" + cell_name(c) + ": " + c.out.record.status + "]";
    }
    if (!finalized(c)) continue;
    const std::int64_t s = static_cast<std::int64_t>(c.delta.ceil_times(c.n));
    const std::int64_t bound = 4 * (static_cast<std::int64_t>(c.n) - 2 * s - 2);
    if (static_cast<std::int64_t>(c.out.report->cost_p) < bound) {
      v.pass = false;
      v.detail += " [" + cell_name(c) + ": cost_p " + std::to_string(c.out.report->cost_p) + " < " +
                  std::to_string(bound) + "]";
    }
    ++checked;
  }
  if (checked == 0) v.pass = false;
  v.detail = std::to_string(checked) + " runs, cost_p >= 4(n-2ceil(delta n)-2) on each" + v.detail;
  return v;
}

Verdict criterion_upper_bound(const std::vector<GridCell>& grid) {
  Verdict v;
  std::size_t checked = 0;
  for (const auto& c : grid) {
    if (unexpected_status(c)) {
      v.pass = false;
      v.detail += " [" + cell_name(c) + ": " + c.out.record.status + "]";
    }
    if (!finalized(c)) continue;
    const auto& r = *c.out.report;
    const std::int64_t bound = static_cast<std::int64_t>(c.n + 3 * r.safe_union_size);
    if (static_cast<std::int64_t>(r.cost_phat) > bound) {
      v.pass = false;
      v.detail += " [" + cell_name(c) + ": cost_phat " + std::to_string(r.cost_phat) + " > " +
                  std::to_string(bound) + "]";
    }
    ++checked;
  }
  if (checked == 0) v.pass = false;
  v.detail = std::to_string(checked) + " runs, cost_phat <= n + 3|S u B u N(p_hat)| on each" + v.detail;
  return v;
}

Verdict criterion_degrees(const std::vector<GridCell>& grid) {
  Verdict v;
  std::size_t checked = 0;
  for (const auto& c : grid) {
    if (!finalized(c)) continue;
    const auto& r = *c.out.report;
    const bool sum_ok = r.degree_sum == 2 * r.q_total;
    const bool b_ok = static_cast<unsigned __int128>(r.b_size) * c.delta.num() * c.n <=
                      static_cast<unsigned __int128>(2) * r.q_total * c.delta.den();
    if (!sum_ok || !b_ok) {
      v.pass = false;
      v.detail += " [" + cell_name(c) + "]";
    }
    ++checked;
  }
  if (checked == 0) v.pass = false;
  v.detail = std::to_string(checked) + " runs, degree sum = 2 q_total and |B| num n <= 2 q_total den" + v.detail;
  return v;
}

// 4(n - 2 ceil(delta n) - 2) / (n + 3 (ceil(delta n) + |B| + alpha(p_hat)))
Ratio floor_oracle(std::size_t n, const DeltaParam& d, std::size_t b, std::uint32_t alpha_phat) {
  const auto s = static_cast<std::int64_t>(d.ceil_times(n));
  const auto nn = static_cast<std::int64_t>(n);
  return Ratio(4 * (nn - 2 * s - 2), nn + 3 * (s + static_cast<std::int64_t>(b) + alpha_phat));
}

Verdict criterion_ratio_trend() {
  Verdict v;
  const auto t0 = Clock::now();
  const DeltaParam d(1, 100);
  const std::vector<std::pair<std::size_t, Ratio>> points{{1000, Ratio(0)}, {10000, Ratio(355, 100)},
                                                          {40000, Ratio(360, 100)}};
  std::vector<std::optional<Ratio>> floors;
  std::ostringstream os;
  os.precision(4);
  for (const auto& [n, threshold] : points) {
    RunOptions opt;
    opt.validate = n <= 10000;
    opt.replay = n <= 10000;
    const CellOutcome c = run_cell(n, d, AlgorithmId::parse("pivot"), opt);
    if (!c.report) {
      floors.push_back(std::nullopt);
      os << " n=" << n << ": " << c.record.status << " (no ratio_floor);";
      if (c.record.status != "EmptySafeSet") v.pass = false;
      continue;
    }
    const auto& r = *c.report;
    const Ratio oracle = floor_oracle(n, d, r.b_size, r.alpha_phat);
    floors.push_back(r.ratio_floor);
    os << " n=" << n << ": ratio_floor=" << boost::rational_cast<double>(r.ratio_floor)
       << " oracle=" << boost::rational_cast<double>(oracle) << " (|B|=" << r.b_size
       << ", alpha(p_hat)=" << r.alpha_phat << ");";
    if (r.ratio_floor < oracle) {
      v.pass = false;
      os << " floor below oracle;";
    }
    if (threshold > Ratio(0) && (r.ratio_floor < threshold || oracle < threshold)) {
      v.pass = false;
      os << " below " << boost::rational_cast<double>(threshold) << ";";
    }
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < floors.size(); ++i) {
    if (!floors[i] || !floors[i + 1] || *floors[i + 1] < *floors[i]) monotone = false;
  }
  if (!monotone) {
    v.pass = false;
    os << " monotone check over {1000, 10000, 40000} not satisfiable;";
  }
  const double secs = seconds_since(t0);
  if (secs >= 120.0) v.pass = false;
  os.precision(1);
  os << std::fixed << " time " << secs << " s";
  v.detail = os.str();
  return v;
}

// Replays against the frozen answers of an adversary that could not be
// finalized. Every replayed query is frozen, so this is the same check as
// replaying against a completed metric.
class FrozenLogSource final : public DistanceSource {
 public:
  explicit FrozenLogSource(const Adversary& adv) : adv_(adv) {}
  std::size_t size() const override { return adv_.n(); }
  std::optional<Dist> cached(PairKey k) const override {
    auto pos = adv_.log().position(k);
    if (pos && *pos < cursor_) return adv_.frozen(k);
    return std::nullopt;
  }
  Dist fresh(PairKey k) override {
    const auto& seq = adv_.log().seq();
    if (cursor_ >= seq.size() || !(seq[cursor_] == k)) {
      throw Error(ErrorKind::ReplayMismatch, "query #" + std::to_string(cursor_) + " differs");
    }
    ++cursor_;
    return *adv_.frozen(k);
  }
  std::size_t consumed() const { return cursor_; }

 private:
  const Adversary& adv_;
  std::size_t cursor_ = 0;
};

Verdict criterion_replay() {
  Verdict v;
  std::size_t on_metric = 0, on_log = 0;
  for (std::size_t n : {100u, 1000u}) {
    for (const auto& name : kBuiltins) {
      const AlgorithmId alg = AlgorithmId::parse(name);
      const std::string cell = name + "@n=" + std::to_string(n);
      try {
        Adversary adv(n, DeltaParam(1, 20));
        AdversarySource src(adv);
        OracleHandle oracle(src, std::nullopt, true);
        const RunTrace first = run(alg, oracle);
        const std::size_t q_alg = adv.log().size();
        adv.pad_output_queries(first.output);
        std::optional<FinalizedInstance> inst;
        try {
          inst.emplace(adv.finalize(first.output));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::EmptySafeSet) throw;
        }
        RunTrace second;
        if (inst) {
          replay_consistency(*inst, alg);
          ReplaySource rs(*inst);
          OracleHandle again(rs, std::nullopt, true);
          second = run(alg, again);
          ++on_metric;
        } else {
          FrozenLogSource ls(adv);
          OracleHandle again(ls, std::nullopt, true);
          second = run(alg, again);
          if (ls.consumed() != q_alg) throw Error(ErrorKind::ReplayMismatch, "query count differs");
          ++on_log;
        }
        if (second.entries != first.entries || second.output != first.output) {
          throw Error(ErrorKind::ReplayMismatch, "trace or output differs");
        }
      } catch (const Error& e) {
        v.pass = false;
        v.detail += " [" + cell + ": " + e.what() + "]";
      }
    }
  }
  v.detail = std::to_string(on_metric) + " replays against finalized metrics, " + std::to_string(on_log) +
             " against frozen answers (EmptySafeSet cells); traces and outputs identical" + v.detail;
  return v;
}

Verdict criterion_exhaustive_vs_bruteforce() {
  Verdict v;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> pick_n(3, 25);
  std::uniform_int_distribution<PathLength> pick_d(1, 60);
  int matches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = pick_n(rng);
    QuerySet g(n);
    for (PointId x = 0; x < n; ++x) {
      for (PointId y = x + 1; y < n; ++y) g.add(x, y, pick_d(rng));
    }
    const CompletedMetric dq = shortest_path_completion(g);
    DenseMetric m(n);
    for (PointId x = 0; x < n; ++x) {
      for (PointId y = 0; y < n; ++y) m.set(x, y, static_cast<Dist>(*dq.at(x, y)));
    }
    if (!validate_metric(m).ok()) {
      v.pass = false;
      v.detail += " [trial " + std::to_string(trial) + ": generated matrix is not a metric]";
      continue;
    }
    // Independent brute force over the cost table.
    PointId best = 0;
    Cost best_cost = 0;
    for (PointId x = 0; x < n; ++x) {
      Cost c = 0;
      for (PointId y = 0; y < n; ++y) c += m.at(x, y);
      if (x == 0 || c < best_cost) {
        best = x;
        best_cost = c;
      }
    }
    MetricSource src(m);
    OracleHandle oracle(src);
    const RunTrace t = run(AlgorithmId::parse("exhaustive"), oracle);
    const MedianResult exact = exact_median(m);
    if (t.output == best && exact.point == best && exact.cost == best_cost) {
      ++matches;
    } else {
      v.pass = false;
      v.detail += " [trial " + std::to_string(trial) + "]";
    }
  }
  v.detail = std::to_string(matches) + "/100 random metrics: exhaustive == exact_median == brute force" + v.detail;
  return v;
}

Verdict criterion_recovery(const std::vector<GridCell>& grid) {
  Verdict v;
  std::size_t run_q = 0, all_q = 0, skipped = 0;
  for (const auto& c : grid) {
    if (!finalized(c)) continue;
    if (!c.out.instance) {
      ++skipped;
      continue;
    }
    const FinalizedInstance& inst = *c.out.instance;
    const RecoveryOutcome r = recover(inst, inst.log().seq());
    if (r.status != "ok" || !r.chain || !r.chain->holds()) {
      v.pass = false;
      v.detail += " [" + cell_name(c) + ": " + r.status + "]";
    }
    ++run_q;
    if (c.n <= 300) {
      const RecoveryOutcome all = recover(inst, all_pairs(c.n));
      if (!all.chain || all.chain->l1_error != Ratio(0) || !all.chain->holds()) {
        v.pass = false;
        v.detail += " [" + cell_name(c) + ": all-pairs error nonzero]";
      }
      ++all_q;
    }
  }
  if (run_q == 0) v.pass = false;
  v.detail = std::to_string(run_q) + " instances with the run's Q: dq >= d, n cost_dq(z~) <= ||dq||_1, ||d||_1 <= 2n cost_d(z*); " +
             std::to_string(all_q) + " all-pairs completions with zero error; " + std::to_string(skipped) +
             " instances at n=10000 not computable (all-pairs shortest paths)" + v.detail;
  return v;
}

// Valid {1,..,4} metric shaped like an adversary instance: a hub at unit
// distance from a subset Y, 3 to the rest, 2 inside Y, {2,3,4} elsewhere.
std::vector<std::vector<Dist>> hub_metric(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::vector<Dist>> a(n, std::vector<Dist>(n, 0));
  std::uniform_int_distribution<int> far(2, 4);
  std::bernoulli_distribution in_y(0.6);
  const PointId hub = static_cast<PointId>(rng() % n);
  std::vector<char> y(n, 0);
  for (std::size_t i = 0; i < n; ++i) y[i] = i != hub && in_y(rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Dist v;
      if (i == hub || j == hub) v = y[i == hub ? j : i] ? 1 : 3;
      else if (y[i] && y[j]) v = 2;
      else v = static_cast<Dist>(far(rng));
      a[i][j] = a[j][i] = v;
    }
  }
  return a;
}

Verdict criterion_structured_soundness() {
  Verdict v;
  std::mt19937_64 rng(77);
  int agree = 0, invalid = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 98;
    auto a = hub_metric(n, rng);
    std::size_t x = rng() % n;
    std::size_t y = rng() % n;
    while (y == x) y = rng() % n;
    Dist nv = static_cast<Dist>(1 + rng() % 4);
    if (nv == a[x][y]) nv = static_cast<Dist>(1 + nv % 4);
    a[x][y] = nv;
    if (trial % 4 != 0) a[y][x] = nv;  // most corruptions keep symmetry
    DenseMetric m(n);
    for (PointId i = 0; i < n; ++i) {
      for (PointId j = 0; j < n; ++j) m.set(i, j, a[i][j]);
    }
    const ValidationReport full = validate_metric(m, ValidationMode::Full);
    const ValidationReport fast = validate_metric(m, ValidationMode::Structured);
    const bool same = full.ok() == fast.ok() && full.triangle_ok == fast.triangle_ok &&
                      full.symmetric_ok == fast.symmetric_ok && full.positivity_ok == fast.positivity_ok &&
                      full.first_violation == fast.first_violation;
    if (same) {
      ++agree;
    } else {
      v.pass = false;
      v.detail += " [trial " + std::to_string(trial) + " n=" + std::to_string(n) + "]";
    }
    if (!full.ok()) ++invalid;
  }
  v.detail = std::to_string(agree) + "/200 corrupted matrices with identical verdicts (" + std::to_string(invalid) +
             " invalid, " + std::to_string(200 - invalid) + " still metrics)" + v.detail;
  return v;
}

}  // namespace

int main() {
  double grid_seconds = 0;
  const std::vector<GridCell> grid = build_grid(grid_seconds);
  report(1, criterion_metricity(grid, grid_seconds));
  report(2, criterion_lower_bound(grid));
  report(3, criterion_upper_bound(grid));
  report(4, criterion_ratio_trend());
  report(5, criterion_degrees(grid));
  report(6, criterion_replay());
  report(7, criterion_exhaustive_vs_bruteforce());
  report(8, criterion_recovery(grid));
  report(9, criterion_structured_soundness());

  int failed = 0;
  for (const auto& [id, v] : g_results) failed += v.pass ? 0 : 1;
  std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAILED") << std::endl;
  return failed == 0 ? 0 : 1;
}
