#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond the plain data types.

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "madv/madv.hpp"

namespace madv::testing {

using Matrix = std::vector<std::vector<std::int64_t>>;

inline Matrix to_matrix(const MetricView& m) {
  const std::size_t n = m.size();
  Matrix out(n, std::vector<std::int64_t>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) out[x][y] = m.at(static_cast<PointId>(x), static_cast<PointId>(y));
  }
  return out;
}

inline DenseMetric to_dense(const Matrix& a) {
  DenseMetric m(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < a.size(); ++y) {
      m.set(static_cast<PointId>(x), static_cast<PointId>(y), static_cast<Dist>(a[x][y]));
    }
  }
  return m;
}

/// Floyd-Warshall over a matrix where -1 means "no edge".
inline Matrix floyd_warshall(Matrix a) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i][k] < 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (a[k][j] < 0) continue;
        const std::int64_t via = a[i][k] + a[k][j];
        if (a[i][j] < 0 || via < a[i][j]) a[i][j] = via;
      }
    }
  }
  return a;
}

/// Random symmetric integer matrix in [lo, hi], then shortest-path closed so
/// the triangle inequality holds.
inline Matrix random_metric(std::size_t n, std::int64_t lo, std::int64_t hi, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> pick(lo, hi);
  Matrix a(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) a[x][y] = a[y][x] = pick(rng);
  }
  return floyd_warshall(a);
}

inline std::vector<std::int64_t> cost_table(const Matrix& a) {
  std::vector<std::int64_t> c(a.size(), 0);
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < a.size(); ++y) c[x] += a[x][y];
  }
  return c;
}

inline std::size_t brute_argmin(const Matrix& a) {
  const auto c = cost_table(a);
  std::size_t best = 0;
  for (std::size_t x = 1; x < c.size(); ++x) {
    if (c[x] < c[best]) best = x;
  }
  return best;
}

/// True when every triple of distinct points satisfies the triangle inequality.
inline bool brute_triangle_ok(const Matrix& a) {
  const std::size_t n = a.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        if (x == y || y == z || x == z) continue;
        if (a[x][y] + a[x][z] < a[y][z]) return false;
      }
    }
  }
  return true;
}

inline bool brute_metric_ok(const Matrix& a) {
  const std::size_t n = a.size();
  for (std::size_t x = 0; x < n; ++x) {
    if (a[x][x] != 0) return false;
    for (std::size_t y = 0; y < n; ++y) {
      if (a[x][y] != a[y][x]) return false;
      if (x != y && a[x][y] <= 0) return false;
    }
  }
  return brute_triangle_ok(a);
}

/// Drives a fresh adversary with `alg`, pads and finalizes.
inline FinalizedInstance finalized_run(std::size_t n, DeltaParam delta, const std::string& alg) {
  Adversary adv(n, delta);
  AdversarySource source(adv);
  OracleHandle oracle(source);
  const RunTrace t = run(AlgorithmId::parse(alg), oracle);
  adv.pad_output_queries(t.output);
  return adv.finalize(t.output);
}

}  // namespace madv::testing
