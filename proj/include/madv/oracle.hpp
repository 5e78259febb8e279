#pragma once

// Query-counting distance oracle handed to algorithms. Algorithms see only n
// and `query`; repeated pairs are served from the source's cache and counted
// separately so the underlying source only ever sees each pair once.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "madv/adversary.hpp"
#include "madv/metric_core.hpp"

namespace madv {

class DistanceSource {
 public:
  virtual ~DistanceSource() = default;
  virtual std::size_t size() const = 0;
  /// Value of a pair already asked through this source, if any.
  virtual std::optional<Dist> cached(PairKey k) const = 0;
  /// Answers a pair never asked before.
  virtual Dist fresh(PairKey k) = 0;
};

/// Online answers from the adversary.
class AdversarySource final : public DistanceSource {
 public:
  explicit AdversarySource(Adversary& adv) : adv_(adv) {}
  std::size_t size() const override { return adv_.n(); }
  std::optional<Dist> cached(PairKey k) const override { return adv_.frozen(k); }
  Dist fresh(PairKey k) override { return adv_.answer_query(k.lo, k.hi); }

 private:
  Adversary& adv_;
};

/// Passive lookups into a fixed metric.
class MetricSource final : public DistanceSource {
 public:
  explicit MetricSource(const MetricView& m) : m_(m) {}
  std::size_t size() const override { return m_.size(); }
  std::optional<Dist> cached(PairKey k) const override {
    auto it = asked_.find(k.packed());
    if (it == asked_.end()) return std::nullopt;
    return it->second;
  }
  Dist fresh(PairKey k) override {
    const Dist v = m_.at(k.lo, k.hi);
    asked_.emplace(k.packed(), v);
    return v;
  }

 private:
  const MetricView& m_;
  absl::flat_hash_map<std::uint64_t, Dist> asked_;
};

struct TraceEntry {
  PairKey pair;
  Dist answer = 0;
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

class OracleHandle {
 public:
  /// Without an explicit budget the limit is n(n-1)/2.
  explicit OracleHandle(DistanceSource& source, std::optional<std::uint64_t> budget = std::nullopt,
                        bool record_trace = false)
      : source_(source),
        budget_(budget.value_or(static_cast<std::uint64_t>(source.size()) *
                                (source.size() - 1) / 2)),
        record_(record_trace) {}

  std::size_t n() const { return source_.size(); }

  Dist query(PointId x, PointId y) {
    if (x >= n() || y >= n()) {
      throw Error(ErrorKind::InvalidArgument, "query outside [0, n)");
    }
    const PairKey k = canonical_pair(x, y);
    if (auto v = source_.cached(k)) {
      ++redundant_;
      return *v;
    }
    if (distinct_ >= budget_) {
      throw Error(ErrorKind::BudgetExceeded,
                  "query budget of " + std::to_string(budget_) + " distinct pairs exhausted");
    }
    const Dist v = source_.fresh(k);
    ++distinct_;
    if (record_) trace_.push_back({k, v});
    return v;
  }

  std::uint64_t distinct_queries() const { return distinct_; }
  std::uint64_t redundant_queries() const { return redundant_; }
  std::uint64_t budget() const { return budget_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  std::vector<TraceEntry> take_trace() { return std::move(trace_); }

 private:
  DistanceSource& source_;
  std::uint64_t budget_;
  bool record_;
  std::uint64_t distinct_ = 0;
  std::uint64_t redundant_ = 0;
  std::vector<TraceEntry> trace_;
};

}  // namespace madv
