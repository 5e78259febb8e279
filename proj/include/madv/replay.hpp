#pragma once

// Re-runs an algorithm against a finalized instance used as a plain metric.
// The online answers must agree with the completed metric, so a
// deterministic algorithm has to retrace the recorded run exactly.

#include <string>

#include "madv/adversary.hpp"
#include "madv/algorithms.hpp"

namespace madv {

/// Serves the finalized metric and checks each distinct query against the
/// recorded log, in order.
class ReplaySource final : public DistanceSource {
 public:
  explicit ReplaySource(const FinalizedInstance& inst) : inst_(inst) {}

  std::size_t size() const override { return inst_.size(); }

  std::optional<Dist> cached(PairKey k) const override {
    auto pos = inst_.log().position(k);
    if (pos && *pos < cursor_) return inst_.at(k.lo, k.hi);
    return std::nullopt;
  }

  Dist fresh(PairKey k) override {
    const auto& seq = inst_.log().seq();
    const std::size_t limit = inst_.algorithm_queries();
    if (cursor_ >= limit || !(seq[cursor_] == k)) {
      throw Error(ErrorKind::ReplayMismatch,
                  "query #" + std::to_string(cursor_) + " is (" + std::to_string(k.lo) + "," +
                      std::to_string(k.hi) + "), recorded run " +
                      (cursor_ >= limit ? std::string("had no more queries")
                                        : "asked (" + std::to_string(seq[cursor_].lo) + "," +
                                              std::to_string(seq[cursor_].hi) + ")"));
    }
    const Dist v = inst_.at(k.lo, k.hi);
    if (v != inst_.frozen_value(cursor_)) {
      throw Error(ErrorKind::ReplayMismatch, "answer to query #" + std::to_string(cursor_) +
                                                 " differs from the online answer");
    }
    ++cursor_;
    return v;
  }

  std::size_t consumed() const { return cursor_; }

 private:
  const FinalizedInstance& inst_;
  std::size_t cursor_ = 0;
};

/// True when the replay reproduces query sequence, answers and output;
/// otherwise throws ReplayMismatch.
inline bool replay_consistency(const FinalizedInstance& inst, const AlgorithmId& alg,
                               const AlgorithmRegistry& registry = AlgorithmRegistry::builtin()) {
  ReplaySource source(inst);
  OracleHandle oracle(source);
  const RunTrace trace = run(alg, oracle, registry);
  if (source.consumed() != inst.algorithm_queries()) {
    throw Error(ErrorKind::ReplayMismatch,
                "replay asked " + std::to_string(source.consumed()) + " distinct queries, recorded run " +
                    std::to_string(inst.algorithm_queries()));
  }
  if (trace.output != inst.output()) {
    throw Error(ErrorKind::ReplayMismatch, "replay output " + std::to_string(trace.output) +
                                               " differs from recorded output " +
                                               std::to_string(inst.output()));
  }
  return true;
}

}  // namespace madv
