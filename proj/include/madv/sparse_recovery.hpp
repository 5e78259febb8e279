#pragma once

// Shortest-path completion d_Q of a partially observed metric, its relative
// l1 error, and 1-median selection through the completion.

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include <absl/container/flat_hash_set.h>
#include <nlohmann/json.hpp>

#include "madv/metric_core.hpp"

namespace madv {

using PathLength = std::uint32_t;

struct WeightedEdge {
  PairKey pair;
  PathLength length = 0;
  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Observed pairs with their lengths. No self loops, no duplicate pairs.
class QuerySet {
 public:
  explicit QuerySet(std::size_t n = 0) : n_(n) {}

  std::size_t n() const { return n_; }
  const std::vector<WeightedEdge>& edges() const { return edges_; }

  void add(PointId x, PointId y, PathLength length) {
    const PairKey k = canonical_pair(x, y);
    if (k.hi >= n_) throw Error(ErrorKind::InvalidArgument, "edge endpoint outside [0, n)");
    if (!seen_.insert(k.packed()).second) {
      throw Error(ErrorKind::RepeatedQuery, "duplicate edge (" + std::to_string(k.lo) + "," +
                                                std::to_string(k.hi) + ")");
    }
    edges_.push_back({k, length});
  }

 private:
  std::size_t n_;
  std::vector<WeightedEdge> edges_;
  absl::flat_hash_set<std::uint64_t> seen_;
};

inline QuerySet build_query_graph(const MetricView& m, std::span<const PairKey> pairs) {
  QuerySet g(m.size());
  for (PairKey k : pairs) g.add(k.lo, k.hi, m.at(k.lo, k.hi));
  return g;
}

inline std::vector<PairKey> all_pairs(std::size_t n) {
  std::vector<PairKey> out;
  out.reserve(n * (n - 1) / 2);
  for (PointId x = 0; x < n; ++x) {
    for (PointId y = x + 1; y < n; ++y) out.push_back({x, y});
  }
  return out;
}

/// All-pairs shortest-path distances; nullopt marks an unreachable pair.
class CompletedMetric {
 public:
  CompletedMetric() = default;
  explicit CompletedMetric(std::size_t n) : n_(n), d_(n * n) {}

  std::size_t size() const { return n_; }
  std::optional<PathLength> at(PointId x, PointId y) const { return d_[std::size_t{x} * n_ + y]; }
  void set(PointId x, PointId y, std::optional<PathLength> v) { d_[std::size_t{x} * n_ + y] = v; }

  bool connected() const {
    for (const auto& v : d_) {
      if (!v) return false;
    }
    return true;
  }

  friend bool operator==(const CompletedMetric&, const CompletedMetric&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::optional<PathLength>> d_;
};

/// One Dijkstra run per source.
inline CompletedMetric shortest_path_completion(const QuerySet& g) {
  const std::size_t n = g.n();
  std::vector<std::size_t> offsets(n + 1, 0);
  for (const auto& e : g.edges()) {
    ++offsets[e.pair.lo + 1];
    ++offsets[e.pair.hi + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  std::vector<std::pair<PointId, PathLength>> adj(offsets[n]);
  {
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& e : g.edges()) {
      adj[cursor[e.pair.lo]++] = {e.pair.hi, e.length};
      adj[cursor[e.pair.hi]++] = {e.pair.lo, e.length};
    }
  }

  CompletedMetric out(n);
  using Item = std::pair<std::uint64_t, PointId>;
  std::vector<std::uint64_t> dist(n);
  std::vector<char> reached(n);
  for (PointId s = 0; s < n; ++s) {
    std::fill(reached.begin(), reached.end(), 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s] = 0;
    reached[s] = 1;
    heap.push({0, s});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d != dist[u]) continue;
      for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) {
        const auto [v, len] = adj[i];
        const std::uint64_t nd = d + len;
        if (!reached[v] || nd < dist[v]) {
          reached[v] = 1;
          dist[v] = nd;
          heap.push({nd, v});
        }
      }
    }
    for (PointId v = 0; v < n; ++v) {
      if (reached[v]) out.set(s, v, static_cast<PathLength>(dist[v]));
    }
  }
  return out;
}

/// Every finite entry of `dq` as an edge, for re-completion.
inline QuerySet to_query_set(const CompletedMetric& dq) {
  QuerySet g(dq.size());
  for (PointId x = 0; x < dq.size(); ++x) {
    for (PointId y = x + 1; y < dq.size(); ++y) {
      if (auto v = dq.at(x, y)) g.add(x, y, *v);
    }
  }
  return g;
}

namespace detail {

inline void require_connected(const CompletedMetric& dq) {
  if (!dq.connected()) throw Error(ErrorKind::Disconnected, "query graph is not connected");
}

inline Cost completion_row_sum(const CompletedMetric& dq, PointId z) {
  Cost s = 0;
  for (PointId x = 0; x < dq.size(); ++x) s += *dq.at(z, x);
  return s;
}

}  // namespace detail

/// ||dq - d||_1 / ||d||_1 over ordered pairs.
inline Ratio l1_relative_error(const CompletedMetric& dq, const MetricView& m) {
  detail::require_connected(dq);
  if (dq.size() != m.size()) throw Error(ErrorKind::InvalidArgument, "size mismatch");
  if (m.size() < 2) throw Error(ErrorKind::InvalidArgument, "need n >= 2");
  std::int64_t diff = 0;
  std::int64_t norm = 0;
  std::vector<Dist> r(m.size());
  for (PointId x = 0; x < m.size(); ++x) {
    m.fill_row(x, 0, r);
    for (PointId y = 0; y < m.size(); ++y) {
      const std::int64_t q = *dq.at(x, y);
      diff += q >= r[y] ? q - r[y] : r[y] - q;
      norm += r[y];
    }
  }
  if (norm == 0) throw Error(ErrorKind::DegenerateOptimum, "metric has zero l1 norm");
  return Ratio(diff, norm);
}

/// argmin_z sum_x dq(z, x), smallest index on ties.
inline PointId median_from_completion(const CompletedMetric& dq) {
  detail::require_connected(dq);
  PointId best = 0;
  Cost best_cost = 0;
  for (PointId z = 0; z < dq.size(); ++z) {
    const Cost c = detail::completion_row_sum(dq, z);
    if (z == 0 || c < best_cost) {
      best = z;
      best_cost = c;
    }
  }
  return best;
}

/// The pointwise inequalities behind the recovery argument, each with the
/// integers it compares.
struct RecoveryChain {
  PointId z_tilde = 0;
  PointId z_star = 0;
  Cost cost_d_ztilde = 0;   // sum_x d(z~, x)
  Cost cost_dq_ztilde = 0;  // sum_x dq(z~, x)
  Cost cost_d_zstar = 0;    // sum_x d(z*, x)
  Cost dq_norm = 0;         // ||dq||_1
  Cost d_norm = 0;          // ||d||_1
  std::size_t n = 0;
  bool dominates = false;       // dq >= d pointwise
  bool pseudo_cost_bound = false;  // cost_d(z~) <= cost_dq(z~)
  bool average_bound = false;      // n cost_dq(z~) <= ||dq||_1
  bool optimum_bound = false;      // ||d||_1 <= 2 n cost_d(z*)
  Ratio l1_error;

  bool holds() const { return dominates && pseudo_cost_bound && average_bound && optimum_bound; }
};

inline nlohmann::json to_json(const RecoveryChain& c) {
  return {{"n", c.n},
          {"z_tilde", c.z_tilde},
          {"z_star", c.z_star},
          {"l1_relative_error", to_string(c.l1_error)},
          {"cost_d_ztilde", c.cost_d_ztilde},
          {"cost_dq_ztilde", c.cost_dq_ztilde},
          {"cost_d_zstar", c.cost_d_zstar},
          {"dq_norm", c.dq_norm},
          {"d_norm", c.d_norm},
          {"dominates", c.dominates},
          {"pseudo_cost_bound", c.pseudo_cost_bound},
          {"average_bound", c.average_bound},
          {"optimum_bound", c.optimum_bound}};
}

inline RecoveryChain check_recovery_chain(const CompletedMetric& dq, const MetricView& m) {
  detail::require_connected(dq);
  RecoveryChain c;
  c.n = m.size();
  c.l1_error = l1_relative_error(dq, m);
  c.z_tilde = median_from_completion(dq);
  const MedianResult opt = exact_median(m);
  c.z_star = opt.point;
  c.cost_d_zstar = opt.cost;
  c.cost_d_ztilde = point_cost(m, c.z_tilde);
  c.cost_dq_ztilde = detail::completion_row_sum(dq, c.z_tilde);

  c.dominates = true;
  std::vector<Dist> r(m.size());
  for (PointId x = 0; x < m.size(); ++x) {
    m.fill_row(x, 0, r);
    for (PointId y = 0; y < m.size(); ++y) {
      const PathLength q = *dq.at(x, y);
      c.dq_norm += q;
      c.d_norm += r[y];
      if (q < r[y]) c.dominates = false;
    }
  }
  c.pseudo_cost_bound = c.cost_d_ztilde <= c.cost_dq_ztilde;
  c.average_bound = c.n * c.cost_dq_ztilde <= c.dq_norm;
  c.optimum_bound = c.d_norm <= 2 * c.n * c.cost_d_zstar;
  return c;
}

/// "n m" then m lines "lo hi length", 0-based.
inline QuerySet read_query_set(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    return Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + msg);
  };
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw fail("missing header 'n m'");
  std::istringstream head(line);
  long long n = -1;
  long long m = -1;
  std::string extra;
  if (!(head >> n >> m) || n < 1 || m < 0 || (head >> extra)) throw fail("expected 'n m'");
  QuerySet g(static_cast<std::size_t>(n));
  for (long long i = 0; i < m; ++i) {
    if (!next_line()) throw fail("expected " + std::to_string(m) + " edges, found " + std::to_string(i));
    std::istringstream row(line);
    long long lo = -1;
    long long hi = -1;
    long long len = -1;
    if (!(row >> lo >> hi >> len) || (row >> extra)) throw fail("expected 'lo hi length'");
    if (lo < 0 || hi < 0 || lo >= n || hi >= n || lo == hi) throw fail("bad endpoints");
    if (len < 1 || len > 0xffffffffLL) throw fail("length must be a positive integer");
    try {
      g.add(static_cast<PointId>(lo), static_cast<PointId>(hi), static_cast<PathLength>(len));
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  if (next_line()) throw fail("trailing content");
  return g;
}

inline void write_query_set(std::ostream& out, const QuerySet& g) {
  out << g.n() << ' ' << g.edges().size() << '\n';
  for (const auto& e : g.edges()) out << e.pair.lo << ' ' << e.pair.hi << ' ' << e.length << '\n';
}

}  // namespace madv
