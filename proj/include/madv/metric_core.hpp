#pragma once

// Point/distance domain types, query bookkeeping, costs and the exact median.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <boost/rational.hpp>

#include "madv/errors.hpp"

namespace madv {

using PointId = std::uint32_t;
/// Distances are small non-negative integers; adversary instances only use 0..4.
using Dist = std::uint8_t;
using Cost = std::uint64_t;
using Ratio = boost::rational<std::int64_t>;

inline std::string to_string(const Ratio& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Canonical unordered pair, lo < hi.
struct PairKey {
  PointId lo = 0;
  PointId hi = 0;

  std::uint64_t packed() const { return (std::uint64_t{lo} << 32) | hi; }
  static PairKey unpack(std::uint64_t v) {
    return {static_cast<PointId>(v >> 32), static_cast<PointId>(v & 0xffffffffu)};
  }

  friend bool operator==(const PairKey&, const PairKey&) = default;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

inline PairKey canonical_pair(PointId x, PointId y) {
  if (x == y) {
    throw Error(ErrorKind::SelfPair, "d(" + std::to_string(x) + "," + std::to_string(x) +
                                         ") is trivially 0 and may not be queried");
  }
  return x < y ? PairKey{x, y} : PairKey{y, x};
}

/// Ordered sequence of distinct unordered pairs plus the per-point degree in
/// the query graph after the last recorded query.
class QueryLog {
 public:
  explicit QueryLog(std::size_t n = 0) : degree_(n, 0) {}

  std::size_t n() const { return degree_.size(); }
  std::size_t size() const { return seq_.size(); }
  const std::vector<PairKey>& seq() const { return seq_; }
  const std::vector<std::uint32_t>& degrees() const { return degree_; }

  std::uint32_t degree_of(PointId x) const {
    check_point(x);
    return degree_[x];
  }

  bool contains(PairKey k) const { return index_.contains(k.packed()); }

  std::optional<std::size_t> position(PairKey k) const {
    auto it = index_.find(k.packed());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Appends `k` and returns its position.
  std::size_t record(PairKey k) {
    check_point(k.hi);
    if (k.lo >= k.hi) throw Error(ErrorKind::InvalidArgument, "pair key is not canonical");
    auto [it, inserted] = index_.try_emplace(k.packed(), static_cast<std::uint32_t>(seq_.size()));
    if (!inserted) {
      throw Error(ErrorKind::RepeatedQuery, "pair (" + std::to_string(k.lo) + "," +
                                                std::to_string(k.hi) + ") already queried");
    }
    seq_.push_back(k);
    ++degree_[k.lo];
    ++degree_[k.hi];
    return seq_.size() - 1;
  }

  std::size_t record(PointId x, PointId y) { return record(canonical_pair(x, y)); }

 private:
  void check_point(PointId x) const {
    if (x >= degree_.size()) {
      throw Error(ErrorKind::InvalidArgument,
                  "point " + std::to_string(x) + " out of range for n=" + std::to_string(n()));
    }
  }

  std::vector<PairKey> seq_;
  std::vector<std::uint32_t> degree_;
  absl::flat_hash_map<std::uint64_t, std::uint32_t> index_;
};

/// Read-only distance function on n points. Implementations must be
/// symmetric with zero diagonal for the result to be a metric; the validator
/// is what checks that.
class MetricView {
 public:
  virtual ~MetricView() = default;

  virtual std::size_t size() const = 0;
  virtual Dist at(PointId x, PointId y) const = 0;

  /// Writes d(x, first), ..., d(x, first + out.size() - 1) into `out`.
  virtual void fill_row(PointId x, PointId first, std::span<Dist> out) const {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(x, first + static_cast<PointId>(i));
  }

  std::vector<Dist> row(PointId x) const {
    std::vector<Dist> r(size());
    fill_row(x, 0, r);
    return r;
  }
};

/// Row-major n x n matrix, one byte per entry.
class DenseMetric final : public MetricView {
 public:
  DenseMetric() = default;
  explicit DenseMetric(std::size_t n) : n_(n), d_(n * n, 0) {}

  static DenseMetric materialize(const MetricView& view) {
    DenseMetric m(view.size());
    for (std::size_t x = 0; x < m.n_; ++x) {
      view.fill_row(static_cast<PointId>(x), 0, std::span<Dist>(m.d_.data() + x * m.n_, m.n_));
    }
    return m;
  }

  std::size_t size() const override { return n_; }
  Dist at(PointId x, PointId y) const override { return d_[std::size_t{x} * n_ + y]; }
  void fill_row(PointId x, PointId first, std::span<Dist> out) const override {
    std::copy_n(d_.data() + std::size_t{x} * n_ + first, out.size(), out.begin());
  }

  void set(PointId x, PointId y, Dist v) { d_[std::size_t{x} * n_ + y] = v; }
  void set_symmetric(PointId x, PointId y, Dist v) {
    set(x, y, v);
    set(y, x, v);
  }
  std::span<const Dist> row_view(PointId x) const {
    return {d_.data() + std::size_t{x} * n_, n_};
  }

 private:
  std::size_t n_ = 0;
  std::vector<Dist> d_;
};

inline Cost point_cost(const MetricView& m, PointId x) {
  std::vector<Dist> r = m.row(x);
  Cost total = 0;
  for (Dist v : r) total += v;
  return total;
}

struct MedianResult {
  PointId point = 0;
  Cost cost = 0;
};

/// Exact 1-median by full enumeration; ties go to the smallest index.
inline MedianResult exact_median(const MetricView& m) {
  if (m.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty metric");
  std::vector<Dist> r(m.size());
  MedianResult best{0, 0};
  for (std::size_t x = 0; x < m.size(); ++x) {
    m.fill_row(static_cast<PointId>(x), 0, r);
    Cost c = 0;
    for (Dist v : r) c += v;
    if (x == 0 || c < best.cost) best = {static_cast<PointId>(x), c};
  }
  return best;
}

inline Ratio approx_ratio(Cost cost_out, Cost cost_opt) {
  if (cost_opt == 0) throw Error(ErrorKind::DegenerateOptimum, "optimal cost is 0");
  return Ratio(static_cast<std::int64_t>(cost_out), static_cast<std::int64_t>(cost_opt));
}

}  // namespace madv
