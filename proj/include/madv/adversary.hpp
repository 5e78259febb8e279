#pragma once

// Adaptive adversary for deterministic metric 1-median algorithms.
//
// Queries are answered online from the query-graph degrees seen so far
// (the state *before* the query is recorded): points of the planted set S
// look far (3) from everything while they are lightly queried, heavily
// queried points look very far (4), and everything else looks like a uniform
// distance-2 space. After the algorithm outputs p, every pair (p, y) is
// frozen by padding, the heavy set B and the least-queried point p_hat of S
// are fixed, and all unfrozen pairs are completed so that p_hat sits at
// distance 1 from almost everyone while p sits at distance 4 from almost
// everyone. The result is always a metric with distances in {1,2,3,4}.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "madv/metric_core.hpp"

namespace madv {

/// delta = num/den, kept exact so that "alpha > delta * n" is an integer test.
class DeltaParam {
 public:
  DeltaParam(std::uint64_t num, std::uint64_t den) {
    if (num == 0 || den == 0 || static_cast<unsigned __int128>(num) * 10 >= den) {
      throw Error(ErrorKind::BadDelta, "delta must lie in (0, 1/10), got " + std::to_string(num) +
                                           "/" + std::to_string(den));
    }
    const std::uint64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
  }

  /// Accepts only "num/den" with positive integers.
  static DeltaParam parse(std::string_view text) {
    const auto slash = text.find('/');
    auto bad = [&] {
      return Error(ErrorKind::BadDelta,
                   "delta must be written as num/den, got '" + std::string(text) + "'");
    };
    if (slash == std::string_view::npos) throw bad();
    auto parse_part = [&](std::string_view part) {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) throw bad();
      return v;
    };
    return DeltaParam(parse_part(text.substr(0, slash)), parse_part(text.substr(slash + 1)));
  }

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }

  /// alpha > delta * n
  bool exceeds(std::uint64_t alpha, std::uint64_t n) const {
    return static_cast<unsigned __int128>(alpha) * den_ > static_cast<unsigned __int128>(num_) * n;
  }

  /// ceil(delta * n)
  std::uint64_t ceil_times(std::uint64_t n) const {
    const auto prod = static_cast<unsigned __int128>(num_) * n;
    return static_cast<std::uint64_t>((prod + den_ - 1) / den_);
  }

  std::string to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  friend bool operator==(const DeltaParam&, const DeltaParam&) = default;

 private:
  std::uint64_t num_ = 1;
  std::uint64_t den_ = 20;
};

/// The seven answering cases, in the order they are usually listed.
enum class AnswerCase {
  BothInS,
  XInSLight,
  YInSLight,
  XInSHeavy,
  YInSHeavy,
  OutsideLight,
  OutsideHeavy,
};

constexpr Dist answer_value(AnswerCase c) {
  constexpr std::array<Dist, 7> values{3, 3, 3, 4, 4, 2, 4};
  return values[static_cast<std::size_t>(c)];
}

/// `x_heavy` / `y_heavy` mean alpha_{i-1} > delta n for that endpoint.
inline AnswerCase classify_answer(bool x_in_s, bool y_in_s, bool x_heavy, bool y_heavy) {
  const std::array<bool, 7> fires{
      x_in_s && y_in_s,
      x_in_s && !y_in_s && !x_heavy,
      y_in_s && !x_in_s && !y_heavy,
      x_in_s && !y_in_s && x_heavy,
      y_in_s && !x_in_s && y_heavy,
      !x_in_s && !y_in_s && !(x_heavy || y_heavy),
      !x_in_s && !y_in_s && (x_heavy || y_heavy),
  };
  if (std::count(fires.begin(), fires.end(), true) != 1) {
    throw Error(ErrorKind::InternalInvariant, "answering cases are not exclusive");
  }
  return static_cast<AnswerCase>(std::find(fires.begin(), fires.end(), true) - fires.begin());
}

/// The six completion cases for pairs never queried.
enum class CompletionCase {
  HatToOutside,
  OutsideToHat,
  BothInSB,
  XInSBToOutside,
  YInSBToOutside,
  Otherwise,
};

constexpr Dist completion_value(CompletionCase c) {
  constexpr std::array<Dist, 6> values{1, 1, 3, 4, 4, 2};
  return values[static_cast<std::size_t>(c)];
}

/// `x_in_sb`: x in S union B; `x_hat`: x == p_hat.
inline CompletionCase classify_completion(bool x_in_sb, bool y_in_sb, bool x_hat, bool y_hat) {
  const std::array<bool, 6> fires{
      x_hat && !y_in_sb,
      y_hat && !x_in_sb,
      x_in_sb && y_in_sb,
      x_in_sb && !x_hat && !y_in_sb && !y_hat,
      y_in_sb && !y_hat && !x_in_sb && !x_hat,
      false,
  };
  const auto hits = std::count(fires.begin(), fires.end(), true);
  if (hits > 1) throw Error(ErrorKind::InternalInvariant, "completion cases are not exclusive");
  if (hits == 0) return CompletionCase::Otherwise;
  return static_cast<CompletionCase>(std::find(fires.begin(), fires.end(), true) - fires.begin());
}

class FinalizedInstance;

class Adversary {
 public:
  enum class Phase { Answering, Finalized };

  /// S = {0, ..., ceil(delta n) - 1}.
  Adversary(std::size_t n, DeltaParam delta) : n_(n), delta_(delta), log_(n), in_s_(n, 0) {
    check_n();
    const auto s = delta_.ceil_times(n);
    for (PointId x = 0; x < s; ++x) {
      safe_.push_back(x);
      in_s_[x] = 1;
    }
  }

  Adversary(std::size_t n, DeltaParam delta, std::vector<PointId> explicit_s)
      : n_(n), delta_(delta), log_(n), in_s_(n, 0) {
    check_n();
    std::sort(explicit_s.begin(), explicit_s.end());
    explicit_s.erase(std::unique(explicit_s.begin(), explicit_s.end()), explicit_s.end());
    const auto want = delta_.ceil_times(n);
    if (explicit_s.size() != want || (!explicit_s.empty() && explicit_s.back() >= n)) {
      throw Error(ErrorKind::BadSetSize, "S must hold " + std::to_string(want) +
                                             " distinct points in [0, n)");
    }
    safe_ = std::move(explicit_s);
    for (PointId x : safe_) in_s_[x] = 1;
  }

  std::size_t n() const { return n_; }
  const DeltaParam& delta() const { return delta_; }
  const std::vector<PointId>& safe_set() const { return safe_; }
  bool in_safe_set(PointId x) const { return in_s_[x] != 0; }
  const QueryLog& log() const { return log_; }
  Phase phase() const { return phase_; }
  std::size_t padding_queries() const { return padding_; }
  bool heavy(std::uint64_t alpha) const { return delta_.exceeds(alpha, n_); }

  /// Degrees only grow, so once all of S is heavy finalize() must fail.
  /// With this set, answer_query reports EmptySafeSet at that moment.
  void stop_when_safe_set_exhausted(bool on) { stop_when_s_heavy_ = on; }

  std::optional<Dist> frozen(PairKey k) const {
    auto pos = log_.position(k);
    if (!pos) return std::nullopt;
    return values_[*pos];
  }

  /// Freezes and returns d(x, y) for a pair never asked before.
  Dist answer_query(PointId x, PointId y) {
    require_answering();
    const PairKey key = canonical_pair(x, y);
    check_point(key.hi);
    if (log_.contains(key)) {
      throw Error(ErrorKind::RepeatedQuery, "pair (" + std::to_string(key.lo) + "," +
                                                std::to_string(key.hi) + ") already frozen");
    }
    const auto& deg = log_.degrees();
    const AnswerCase c =
        classify_answer(in_s_[x] != 0, in_s_[y] != 0, heavy(deg[x]), heavy(deg[y]));
    const Dist v = answer_value(c);
    log_.record(key);
    values_.push_back(v);
    for (PointId z : {key.lo, key.hi}) {
      if (in_s_[z] && heavy(deg[z]) && !heavy(deg[z] - 1)) ++heavy_in_s_;
    }
    if (stop_when_s_heavy_ && heavy_in_s_ == safe_.size()) {
      throw Error(ErrorKind::EmptySafeSet, "every point of S has alpha > delta n after " +
                                               std::to_string(log_.size()) + " queries");
    }
    return v;
  }

  /// Asks every still-unfrozen (p, y), ascending y. Returns how many were added.
  std::size_t pad_output_queries(PointId p) {
    require_answering();
    check_point(p);
    std::size_t added = 0;
    for (PointId y = 0; y < n_; ++y) {
      if (y == p || log_.contains(canonical_pair(p, y))) continue;
      answer_query(p, y);
      ++added;
    }
    padding_ += added;
    return added;
  }

  /// Fixes B and p_hat and completes the metric. Requires padding for p.
  FinalizedInstance finalize(PointId p);

 private:
  void check_n() const {
    if (n_ < 2) throw Error(ErrorKind::InvalidArgument, "need n >= 2");
    if (n_ > 0xffffffffu) throw Error(ErrorKind::InvalidArgument, "n too large");
  }
  void check_point(PointId x) const {
    if (x >= n_) throw Error(ErrorKind::InvalidArgument, "point " + std::to_string(x) + " out of range");
  }
  void require_answering() const {
    if (phase_ != Phase::Answering) throw Error(ErrorKind::PhaseError, "adversary already finalized");
  }

  std::size_t n_;
  DeltaParam delta_;
  QueryLog log_;
  std::vector<Dist> values_;  // frozen value of log_.seq()[i]
  std::vector<char> in_s_;
  std::vector<PointId> safe_;
  std::size_t padding_ = 0;
  std::size_t heavy_in_s_ = 0;
  bool stop_when_s_heavy_ = false;
  Phase phase_ = Phase::Answering;
};

/// The completed metric together with everything needed to audit it.
/// Immutable once built; lookups are O(1) expected.
class FinalizedInstance final : public MetricView {
 public:
  std::size_t size() const override { return n_; }

  Dist at(PointId x, PointId y) const override {
    if (x == y) return 0;
    if (auto pos = log_.position(canonical_pair(x, y))) return values_[*pos];
    return completion_value(completion_case(x, y));
  }

  void fill_row(PointId x, PointId first, std::span<Dist> out) const override {
    const PointId last = first + static_cast<PointId>(out.size());
    // Off p_hat and x itself, the completion rule depends on y only through
    // membership in S u B.
    const bool x_sb = in_sb_[x] != 0;
    const bool x_hat = x == p_hat_;
    const Dist in_value = completion_value(classify_completion(x_sb, true, x_hat, false));
    const Dist out_value = completion_value(classify_completion(x_sb, false, x_hat, false));
    for (PointId y = first; y < last; ++y) out[y - first] = in_sb_[y] ? in_value : out_value;
    if (p_hat_ >= first && p_hat_ < last && p_hat_ != x) {
      out[p_hat_ - first] = completion_value(completion_case(x, p_hat_));
    }
    if (x >= first && x < last) out[x - first] = 0;
    const auto begin = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[x]);
    const auto end = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[x + 1]);
    auto it = std::lower_bound(begin, end, first,
                               [](const AdjEntry& e, PointId v) { return e.neighbor < v; });
    for (; it != end && it->neighbor < last; ++it) out[it->neighbor - first] = it->value;
  }

  /// Which completion rule applies to an unfrozen distinct pair.
  CompletionCase completion_case(PointId x, PointId y) const {
    return classify_completion(in_sb_[x] != 0, in_sb_[y] != 0, x == p_hat_, y == p_hat_);
  }

  bool is_frozen(PointId x, PointId y) const { return x != y && log_.contains(canonical_pair(x, y)); }

  const DeltaParam& delta() const { return delta_; }
  const std::vector<PointId>& safe_set() const { return safe_; }
  const std::vector<PointId>& heavy_set() const { return heavy_; }
  bool in_safe_set(PointId x) const { return in_s_[x] != 0; }
  bool in_heavy_set(PointId x) const { return in_b_[x] != 0; }
  PointId p_hat() const { return p_hat_; }
  PointId output() const { return p_; }
  std::size_t q_total() const { return log_.size(); }
  std::size_t padding_queries() const { return padding_; }
  std::size_t algorithm_queries() const { return log_.size() - padding_; }
  std::uint32_t alpha(PointId x) const { return log_.degrees()[x]; }
  std::uint32_t alpha_phat() const { return alpha(p_hat_); }
  const QueryLog& log() const { return log_; }
  /// Frozen value of the i-th logged query.
  Dist frozen_value(std::size_t i) const { return values_[i]; }

  /// Points that share a frozen pair with x.
  std::vector<PointId> neighbors(PointId x) const {
    std::vector<PointId> out;
    for (std::size_t i = offsets_[x]; i < offsets_[x + 1]; ++i) out.push_back(adj_[i].neighbor);
    return out;
  }

  /// {n, delta, S, B, p_hat, p, q_total, frozen: [[lo, hi, dist], ...]}, 0-based.
  nlohmann::json to_json(bool include_frozen = true) const {
    nlohmann::json j{{"n", n_},          {"delta", delta_.to_string()}, {"index_base", 0},
                     {"S", safe_},       {"B", heavy_},                 {"p_hat", p_hat_},
                     {"p", p_},          {"q_total", q_total()},        {"padding_queries", padding_}};
    if (include_frozen) {
      nlohmann::json frozen = nlohmann::json::array();
      const auto& seq = log_.seq();
      for (std::size_t i = 0; i < seq.size(); ++i) {
        frozen.push_back({seq[i].lo, seq[i].hi, values_[i]});
      }
      j["frozen"] = std::move(frozen);
    }
    return j;
  }

 private:
  friend class Adversary;

  struct AdjEntry {
    PointId neighbor;
    Dist value;
  };

  FinalizedInstance() = default;

  void build_adjacency() {
    offsets_.assign(n_ + 1, 0);
    for (PairKey k : log_.seq()) {
      ++offsets_[k.lo + 1];
      ++offsets_[k.hi + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adj_.resize(offsets_[n_]);
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    const auto& seq = log_.seq();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      adj_[cursor[seq[i].lo]++] = {seq[i].hi, values_[i]};
      adj_[cursor[seq[i].hi]++] = {seq[i].lo, values_[i]};
    }
    for (std::size_t x = 0; x < n_; ++x) {
      std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[x]),
                adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[x + 1]),
                [](const AdjEntry& a, const AdjEntry& b) { return a.neighbor < b.neighbor; });
    }
  }

  std::size_t n_ = 0;
  DeltaParam delta_{1, 20};
  QueryLog log_;
  std::vector<Dist> values_;
  std::vector<PointId> safe_;
  std::vector<PointId> heavy_;
  std::vector<char> in_s_;
  std::vector<char> in_b_;
  std::vector<char> in_sb_;
  PointId p_hat_ = 0;
  PointId p_ = 0;
  std::size_t padding_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<AdjEntry> adj_;
};

inline FinalizedInstance Adversary::finalize(PointId p) {
  require_answering();
  check_point(p);
  if (log_.degree_of(p) != n_ - 1) {
    throw Error(ErrorKind::Precondition, "output " + std::to_string(p) +
                                             " is not fully queried; pad before finalizing");
  }
  const auto& deg = log_.degrees();
  std::vector<PointId> heavy_points;
  for (PointId x = 0; x < n_; ++x) {
    if (heavy(deg[x])) heavy_points.push_back(x);
  }
  // argmin over S of alpha, smallest index on ties (safe_ is sorted).
  PointId p_hat = safe_.front();
  for (PointId x : safe_) {
    if (deg[x] < deg[p_hat]) p_hat = x;
  }
  if (heavy(deg[p_hat])) {
    throw Error(ErrorKind::EmptySafeSet,
                "every point of S has alpha > delta n (" + std::to_string(heavy_points.size()) +
                    " heavy points, q=" + std::to_string(log_.size()) +
                    "); the query density is too high for this n");
  }

  FinalizedInstance inst;
  inst.n_ = n_;
  inst.delta_ = delta_;
  inst.safe_ = safe_;
  inst.in_s_ = in_s_;
  inst.in_b_.assign(n_, 0);
  for (PointId x : heavy_points) inst.in_b_[x] = 1;
  inst.in_sb_.resize(n_);
  for (std::size_t x = 0; x < n_; ++x) inst.in_sb_[x] = inst.in_s_[x] || inst.in_b_[x];
  inst.heavy_ = std::move(heavy_points);
  inst.p_hat_ = p_hat;
  inst.p_ = p;
  inst.padding_ = padding_;
  inst.log_ = std::move(log_);
  inst.values_ = std::move(values_);
  inst.build_adjacency();
  phase_ = Phase::Finalized;
  return inst;
}

/// Costs of the algorithm output and of p_hat, with the bounds they must obey.
struct InstanceReport {
  std::size_t n = 0;
  DeltaParam delta{1, 20};
  PointId p = 0;
  PointId p_hat = 0;
  Cost cost_p = 0;
  Cost cost_phat = 0;
  /// max(0, 4(n - 2 ceil(delta n) - 2))
  std::int64_t lower_bound_p = 0;
  /// n + 3 |S u B u N(p_hat)|
  std::int64_t upper_bound_phat = 0;
  std::size_t safe_union_size = 0;
  Ratio ratio_floor;
  Ratio measured_ratio;
  std::size_t b_size = 0;
  std::size_t q_total = 0;
  std::size_t padding_queries = 0;
  std::uint32_t alpha_phat = 0;
  std::uint64_t degree_sum = 0;
};

inline nlohmann::json to_json(const InstanceReport& r) {
  return {{"n", r.n},
          {"delta", r.delta.to_string()},
          {"p", r.p},
          {"p_hat", r.p_hat},
          {"cost_p", r.cost_p},
          {"cost_phat", r.cost_phat},
          {"lower_bound_p", r.lower_bound_p},
          {"upper_bound_phat", r.upper_bound_phat},
          {"safe_union_size", r.safe_union_size},
          {"ratio_floor", to_string(r.ratio_floor)},
          {"measured_ratio", to_string(r.measured_ratio)},
          {"b_size", r.b_size},
          {"q_total", r.q_total},
          {"padding_queries", r.padding_queries},
          {"alpha_phat", r.alpha_phat},
          {"degree_sum", r.degree_sum}};
}

/// Computes and audits the report. Any failed inequality raises
/// BoundViolation with a dump of the instance.
inline InstanceReport instance_report(const FinalizedInstance& inst) {
  const std::size_t n = inst.size();
  InstanceReport r;
  r.n = n;
  r.delta = inst.delta();
  r.p = inst.output();
  r.p_hat = inst.p_hat();
  r.cost_p = point_cost(inst, r.p);
  r.cost_phat = point_cost(inst, r.p_hat);
  r.b_size = inst.heavy_set().size();
  r.q_total = inst.q_total();
  r.padding_queries = inst.padding_queries();
  r.alpha_phat = inst.alpha_phat();

  const auto s = static_cast<std::int64_t>(inst.delta().ceil_times(n));
  r.lower_bound_p = std::max<std::int64_t>(0, 4 * (static_cast<std::int64_t>(n) - 2 * s - 2));

  std::vector<char> in_union(n, 0);
  for (PointId x : inst.safe_set()) in_union[x] = 1;
  for (PointId x : inst.heavy_set()) in_union[x] = 1;
  for (PointId x : inst.neighbors(inst.p_hat())) in_union[x] = 1;
  r.safe_union_size = static_cast<std::size_t>(std::count(in_union.begin(), in_union.end(), 1));
  r.upper_bound_phat = static_cast<std::int64_t>(n + 3 * r.safe_union_size);

  r.ratio_floor = Ratio(r.lower_bound_p, static_cast<std::int64_t>(r.cost_phat));
  r.measured_ratio = Ratio(static_cast<std::int64_t>(r.cost_p), static_cast<std::int64_t>(r.cost_phat));
  for (auto d : inst.log().degrees()) r.degree_sum += d;

  std::vector<std::string> failed;
  if (static_cast<std::int64_t>(r.cost_p) < r.lower_bound_p) failed.push_back("cost_p >= lower_bound_p");
  if (static_cast<std::int64_t>(r.cost_phat) > r.upper_bound_phat) {
    failed.push_back("cost_phat <= upper_bound_phat");
  }
  if (r.measured_ratio < r.ratio_floor) failed.push_back("measured_ratio >= ratio_floor");
  if (r.degree_sum != 2 * r.q_total) failed.push_back("degree sum == 2 q_total");
  if (static_cast<unsigned __int128>(r.b_size) * r.delta.num() * n >
      static_cast<unsigned __int128>(2) * r.q_total * r.delta.den()) {
    failed.push_back("|B| delta n <= 2 q_total");
  }
  if (!inst.in_safe_set(r.p_hat) || inst.in_heavy_set(r.p_hat)) failed.push_back("p_hat in S \\ B");
  if (inst.alpha(r.p) != n - 1) failed.push_back("alpha(p) == n - 1");
  if (!failed.empty()) {
    std::string what;
    for (const auto& f : failed) what += (what.empty() ? "" : ", ") + f;
    nlohmann::json dump{{"failed", failed},
                        {"report", to_json(r)},
                        {"instance", inst.to_json(inst.q_total() <= 100000)}};
    throw Error(ErrorKind::BoundViolation, what + "\n" + dump.dump());
  }
  return r;
}

}  // namespace madv
