#pragma once

// Deterministic 1-median algorithms behind the oracle contract. None of them
// sees anything but n and the oracle.

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "madv/oracle.hpp"

namespace madv {

struct AlgorithmId {
  std::string name;
  /// Root used by pivot_h (pivot count ceil(n^(1/h))); 0 for the others.
  std::uint32_t h = 0;

  static constexpr std::uint32_t kDefaultH = 3;

  /// "exhaustive", "pivot", "greedy_probe", "pivot_h" or "pivot_h:<h>".
  static AlgorithmId parse(std::string_view text) {
    const auto colon = text.find(':');
    AlgorithmId id{std::string(text.substr(0, colon)), 0};
    if (id.name == "pivot_h") {
      id.h = kDefaultH;
      if (colon != std::string_view::npos) {
        const auto arg = text.substr(colon + 1);
        auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), id.h);
        if (arg.empty() || ec != std::errc{} || ptr != arg.data() + arg.size() || id.h < 2) {
          throw Error(ErrorKind::InvalidArgument, "pivot_h needs an integer h >= 2");
        }
      }
    } else if (colon != std::string_view::npos) {
      throw Error(ErrorKind::InvalidArgument, id.name + " takes no parameter");
    }
    return id;
  }

  std::string to_string() const { return h == 0 ? name : name + ":" + std::to_string(h); }

  friend bool operator==(const AlgorithmId&, const AlgorithmId&) = default;
};

struct RunTrace {
  std::vector<TraceEntry> entries;
  PointId output = 0;
  std::uint64_t distinct_queries = 0;
  std::uint64_t redundant_queries = 0;
};

namespace algo {

namespace detail {

/// Smallest k with k^h >= n.
inline std::uint64_t ceil_root(std::uint64_t n, std::uint32_t h) {
  auto reaches = [&](std::uint64_t k) {
    unsigned __int128 p = 1;
    for (std::uint32_t i = 0; i < h; ++i) {
      p *= k;
      if (p >= n) return true;
    }
    return p >= n;
  };
  std::uint64_t lo = 1;
  std::uint64_t hi = n;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (reaches(mid)) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

/// [0, n) in bit-reversed order: consecutive prefixes are spread evenly.
inline std::vector<PointId> spread_order(std::size_t n) {
  unsigned bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  std::vector<PointId> order;
  order.reserve(n);
  for (std::size_t i = 0; i < (std::size_t{1} << bits); ++i) {
    std::size_t r = 0;
    for (unsigned b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    }
    if (r < n) order.push_back(static_cast<PointId>(r));
  }
  return order;
}

inline void require_points(const OracleHandle& o) {
  if (o.n() < 2) throw Error(ErrorKind::InvalidArgument, "algorithms need n >= 2");
}

}  // namespace detail

/// Asks every pair once; exact argmin, smallest index on ties.
inline PointId exhaustive(OracleHandle& o) {
  detail::require_points(o);
  const std::size_t n = o.n();
  std::vector<Cost> cost(n, 0);
  for (PointId x = 0; x < n; ++x) {
    for (PointId y = x + 1; y < n; ++y) {
      const Dist v = o.query(x, y);
      cost[x] += v;
      cost[y] += v;
    }
  }
  return static_cast<PointId>(std::min_element(cost.begin(), cost.end()) - cost.begin());
}

/// The evenly spaced pivots {0, s, 2s, ...}, s = floor(n/k), k = ceil(n^(1/h)).
inline std::vector<PointId> pivot_set(std::size_t n, std::uint32_t h) {
  const std::uint64_t k = detail::ceil_root(n, h);
  const std::uint64_t step = n / k;
  std::vector<PointId> pivots(k);
  for (std::uint64_t j = 0; j < k; ++j) pivots[j] = static_cast<PointId>(j * step);
  return pivots;
}

/// Nonadaptive: every pivot asks its whole row, the cheapest pivot wins.
/// Pivot-pivot pairs are asked twice and absorbed by the oracle cache.
inline PointId pivot_h(OracleHandle& o, std::uint32_t h) {
  detail::require_points(o);
  const std::size_t n = o.n();
  PointId best = 0;
  Cost best_cost = 0;
  bool first = true;
  for (PointId u : pivot_set(n, h)) {
    Cost c = 0;
    for (PointId v = 0; v < n; ++v) {
      if (v != u) c += o.query(u, v);
    }
    if (first || c < best_cost) {
      best = u;
      best_cost = c;
      first = false;
    }
  }
  return best;
}

inline PointId pivot(OracleHandle& o) { return pivot_h(o, 2); }

/// Adaptive successive halving. Each round every surviving candidate is
/// compared against the newly added sample points; the half with the
/// smallest partial sums survives and the sample doubles. At most
/// n (log2 n + 2) distinct queries.
inline PointId greedy_probe(OracleHandle& o) {
  detail::require_points(o);
  const std::size_t n = o.n();
  const std::vector<PointId> order = detail::spread_order(n);
  std::vector<PointId> candidates(n);
  std::iota(candidates.begin(), candidates.end(), PointId{0});
  std::vector<Cost> partial(n, 0);

  auto by_partial = [&](PointId a, PointId b) {
    return partial[a] != partial[b] ? partial[a] < partial[b] : a < b;
  };

  std::size_t sampled = 0;
  std::size_t target = std::min<std::size_t>(2, n);
  while (true) {
    for (PointId c : candidates) {
      for (std::size_t i = sampled; i < target; ++i) {
        if (order[i] != c) partial[c] += o.query(c, order[i]);
      }
    }
    sampled = target;
    if (sampled == n) break;
    const std::size_t keep = (candidates.size() + 1) / 2;
    std::sort(candidates.begin(), candidates.end(), by_partial);
    candidates.resize(keep);
    std::sort(candidates.begin(), candidates.end());
    if (candidates.size() == 1) break;
    target = std::min(n, 2 * target);
  }
  return *std::min_element(candidates.begin(), candidates.end(), by_partial);
}

}  // namespace algo

using AlgorithmFn = std::function<PointId(OracleHandle&, const AlgorithmId&)>;

/// Name -> algorithm. Only deterministic algorithms may be registered, since
/// replay against the finalized metric relies on it.
class AlgorithmRegistry {
 public:
  void add(const std::string& name, AlgorithmFn fn, bool deterministic) {
    if (!deterministic) {
      throw Error(ErrorKind::NotDeterministic,
                  "algorithm '" + name + "' is not deterministic and cannot be registered");
    }
    if (!entries_.emplace(name, std::move(fn)).second) {
      throw Error(ErrorKind::InvalidArgument, "algorithm '" + name + "' already registered");
    }
  }

  const AlgorithmFn& find(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + name + "'");
    return it->second;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, fn] : entries_) out.push_back(name);
    return out;
  }

  static const AlgorithmRegistry& builtin() {
    static const AlgorithmRegistry registry = [] {
      AlgorithmRegistry r;
      r.add("exhaustive", [](OracleHandle& o, const AlgorithmId&) { return algo::exhaustive(o); }, true);
      r.add("pivot", [](OracleHandle& o, const AlgorithmId&) { return algo::pivot(o); }, true);
      r.add("pivot_h",
            [](OracleHandle& o, const AlgorithmId& id) {
              return algo::pivot_h(o, id.h == 0 ? AlgorithmId::kDefaultH : id.h);
            },
            true);
      r.add("greedy_probe", [](OracleHandle& o, const AlgorithmId&) { return algo::greedy_probe(o); },
            true);
      return r;
    }();
    return registry;
  }

 private:
  std::map<std::string, AlgorithmFn> entries_;
};

inline RunTrace run(const AlgorithmId& alg, OracleHandle& oracle,
                    const AlgorithmRegistry& registry = AlgorithmRegistry::builtin()) {
  const AlgorithmFn& fn = registry.find(alg.name);
  RunTrace trace;
  trace.output = fn(oracle, alg);
  if (trace.output >= oracle.n()) {
    throw Error(ErrorKind::InternalInvariant, alg.to_string() + " returned an invalid point");
  }
  trace.distinct_queries = oracle.distinct_queries();
  trace.redundant_queries = oracle.redundant_queries();
  trace.entries = oracle.take_trace();
  return trace;
}

}  // namespace madv
