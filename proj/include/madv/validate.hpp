#pragma once

// Metric validation. Full mode checks every ordered triple on a dense copy;
// structured mode is only defined for off-diagonal distances in {1,2,3,4}.
// There a triangle d(x,y) + d(x,z) < d(y,z) needs d(x,y) + d(x,z) <= 3, so one
// of the two legs at the apex x has length 1, and it suffices to inspect the
// rows at the endpoints of distance-1 entries.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "madv/metric_core.hpp"

namespace madv {

enum class ValidationMode { Full, Structured };

/// One failed check. Fields not meaningful for the check are empty.
struct Violation {
  std::string check;  // "symmetry", "diagonal", "positivity", "triangle"
  PointId x = 0;
  PointId y = 0;
  std::optional<PointId> z;
  Dist d_xy = 0;
  std::optional<Dist> d_yx;
  std::optional<Dist> d_xz;
  std::optional<Dist> d_yz;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline nlohmann::json to_json(const Violation& v) {
  nlohmann::json j{{"check", v.check}, {"x", v.x}, {"y", v.y}};
  if (v.z) j["z"] = *v.z;
  j["d_xy"] = v.d_xy;
  if (v.d_yx) j["d_yx"] = *v.d_yx;
  if (v.d_xz) j["d_xz"] = *v.d_xz;
  if (v.d_yz) j["d_yz"] = *v.d_yz;
  return j;
}

struct ValidationReport {
  ValidationMode mode = ValidationMode::Full;
  bool symmetric_ok = true;
  bool diagonal_ok = true;
  bool positivity_ok = true;
  bool triangle_ok = true;
  /// Lexicographically smallest violating (x, y, z) with d(x,y) + d(x,z) < d(y,z).
  std::optional<Violation> first_violation;
  /// First failure of each non-triangle check, in check order.
  std::vector<Violation> other_failures;

  bool ok() const { return symmetric_ok && diagonal_ok && positivity_ok && triangle_ok; }
};

inline nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json j{{"mode", r.mode == ValidationMode::Full ? "full" : "structured"},
                   {"ok", r.ok()},
                   {"symmetric_ok", r.symmetric_ok},
                   {"diagonal_ok", r.diagonal_ok},
                   {"positivity_ok", r.positivity_ok},
                   {"triangle_ok", r.triangle_ok}};
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& v : r.other_failures) failures.push_back(to_json(v));
  if (r.first_violation) failures.push_back(to_json(*r.first_violation));
  j["failures"] = failures;
  return j;
}

struct ValidateOptions {
  ValidationMode mode = ValidationMode::Full;
  /// Full mode refuses larger inputs (n^3 triples).
  std::size_t full_cap = 300;
  /// Edge length of the square tiles used by the structured symmetry pass.
  std::size_t tile = 512;
};

namespace detail {

inline Violation triangle_violation(PointId x, PointId y, PointId z, Dist xy, Dist xz, Dist yz) {
  Violation v{"triangle", x, y, z, xy};
  v.d_xz = xz;
  v.d_yz = yz;
  return v;
}

inline void keep_smallest(std::optional<Violation>& best, const Violation& v) {
  auto key = [](const Violation& w) { return std::array<PointId, 3>{w.x, w.y, *w.z}; };
  if (!best || key(v) < key(*best)) best = v;
}

inline ValidationReport validate_full(const MetricView& m, const ValidateOptions& opt) {
  const std::size_t n = m.size();
  if (n > opt.full_cap) {
    throw Error(ErrorKind::InvalidArgument, "full validation capped at n=" +
                                                std::to_string(opt.full_cap) +
                                                ", got n=" + std::to_string(n));
  }
  const DenseMetric* dense = dynamic_cast<const DenseMetric*>(&m);
  DenseMetric copy;
  if (dense == nullptr) {
    copy = DenseMetric::materialize(m);
    dense = &copy;
  }
  const DenseMetric& d = *dense;

  ValidationReport rep;
  rep.mode = ValidationMode::Full;
  for (PointId x = 0; x < n; ++x) {
    if (d.at(x, x) != 0 && rep.diagonal_ok) {
      rep.diagonal_ok = false;
      rep.other_failures.push_back({"diagonal", x, x, std::nullopt, d.at(x, x)});
    }
  }
  for (PointId x = 0; x < n; ++x) {
    for (PointId y = x + 1; y < n; ++y) {
      if (d.at(x, y) != d.at(y, x) && rep.symmetric_ok) {
        rep.symmetric_ok = false;
        Violation v{"symmetry", x, y, std::nullopt, d.at(x, y)};
        v.d_yx = d.at(y, x);
        rep.other_failures.push_back(v);
      }
    }
  }
  for (PointId x = 0; x < n && rep.positivity_ok; ++x) {
    for (PointId y = 0; y < n; ++y) {
      if (x != y && d.at(x, y) == 0) {
        rep.positivity_ok = false;
        rep.other_failures.push_back({"positivity", x, y, std::nullopt, 0});
        break;
      }
    }
  }
  for (PointId x = 0; x < n && rep.triangle_ok; ++x) {
    auto rx = d.row_view(x);
    for (PointId y = 0; y < n && rep.triangle_ok; ++y) {
      if (y == x) continue;
      auto ry = d.row_view(y);
      const int xy = rx[y];
      for (PointId z = 0; z < n; ++z) {
        if (z == x || z == y) continue;
        if (xy + rx[z] < ry[z]) {
          rep.triangle_ok = false;
          rep.first_violation = triangle_violation(x, y, z, rx[y], rx[z], ry[z]);
          break;
        }
      }
    }
  }
  return rep;
}

inline ValidationReport validate_structured(const MetricView& m, const ValidateOptions& opt) {
  const std::size_t n = m.size();
  const std::size_t tile = std::max<std::size_t>(1, opt.tile);
  ValidationReport rep;
  rep.mode = ValidationMode::Structured;

  // unit[x] = {y : d(x,y) = 1}, read off row x.
  std::vector<std::vector<PointId>> unit(n);

  auto check_entry = [&](PointId x, PointId y, Dist v) {
    if (v == 0) {
      if (rep.positivity_ok) {
        rep.positivity_ok = false;
        rep.other_failures.push_back({"positivity", x, y, std::nullopt, 0});
      }
      return;
    }
    if (v > 4) {
      throw Error(ErrorKind::RangeError, "d(" + std::to_string(x) + "," + std::to_string(y) +
                                             ")=" + std::to_string(v) + " outside {1,2,3,4}");
    }
    if (v == 1) unit[x].push_back(y);
  };
  auto check_symmetry = [&](PointId x, PointId y, Dist xy, Dist yx) {
    if (xy != yx && rep.symmetric_ok) {
      rep.symmetric_ok = false;
      Violation v{"symmetry", x, y, std::nullopt, xy};
      v.d_yx = yx;
      rep.other_failures.push_back(v);
    }
  };

  std::vector<Dist> a(tile * tile);
  std::vector<Dist> b(tile * tile);
  for (std::size_t r0 = 0; r0 < n; r0 += tile) {
    const std::size_t rl = std::min(tile, n - r0);
    for (std::size_t c0 = r0; c0 < n; c0 += tile) {
      const std::size_t cl = std::min(tile, n - c0);
      for (std::size_t i = 0; i < rl; ++i) {
        m.fill_row(static_cast<PointId>(r0 + i), static_cast<PointId>(c0),
                   std::span<Dist>(a.data() + i * tile, cl));
      }
      if (c0 == r0) {
        for (std::size_t i = 0; i < rl; ++i) {
          const auto x = static_cast<PointId>(r0 + i);
          for (std::size_t j = 0; j < cl; ++j) {
            const auto y = static_cast<PointId>(c0 + j);
            const Dist v = a[i * tile + j];
            if (x == y) {
              if (v != 0 && rep.diagonal_ok) {
                rep.diagonal_ok = false;
                rep.other_failures.push_back({"diagonal", x, x, std::nullopt, v});
              }
              continue;
            }
            check_entry(x, y, v);
            if (x < y) check_symmetry(x, y, v, a[j * tile + i]);
          }
        }
        continue;
      }
      for (std::size_t j = 0; j < cl; ++j) {
        m.fill_row(static_cast<PointId>(c0 + j), static_cast<PointId>(r0),
                   std::span<Dist>(b.data() + j * tile, rl));
      }
      for (std::size_t i = 0; i < rl; ++i) {
        const auto x = static_cast<PointId>(r0 + i);
        // Fast path: a row segment with only {2,3,4} entries that match the
        // transposed block needs no further bookkeeping.
        bool plain = true;
        for (std::size_t j = 0; j < cl; ++j) {
          const Dist xy = a[i * tile + j];
          plain &= (static_cast<Dist>(xy - 2) <= 2) & (xy == b[j * tile + i]);
        }
        if (plain) continue;
        for (std::size_t j = 0; j < cl; ++j) {
          const auto y = static_cast<PointId>(c0 + j);
          const Dist xy = a[i * tile + j];
          const Dist yx = b[j * tile + i];
          check_entry(x, y, xy);
          check_entry(y, x, yx);
          check_symmetry(x, y, xy, yx);
        }
      }
    }
  }
  for (auto& u : unit) std::sort(u.begin(), u.end());

  // Apex x, unit leg x->y, other leg x->z: violation iff 1 + d(x,z) < d(y,z).
  // With an asymmetric input the unit leg may also be x->z, which needs d(y,z)
  // read from column z instead of row y.
  std::vector<Dist> rx(n);
  std::vector<Dist> ry(n);
  for (PointId x = 0; x < n; ++x) {
    if (unit[x].empty()) continue;
    m.fill_row(x, 0, rx);
    for (PointId y : unit[x]) {
      m.fill_row(y, 0, ry);
      for (PointId z = 0; z < n; ++z) {
        if (z == x || z == y) continue;
        if (1 + rx[z] < ry[z]) {
          rep.triangle_ok = false;
          detail::keep_smallest(rep.first_violation,
                                triangle_violation(x, y, z, rx[y], rx[z], ry[z]));
          if (rep.symmetric_ok) {
            // Mirror image, same distances by symmetry.
            detail::keep_smallest(rep.first_violation,
                                  triangle_violation(x, z, y, rx[z], rx[y], ry[z]));
          }
        }
        if (!rep.symmetric_ok) {
          const Dist zy = m.at(z, y);
          if (rx[z] + 1 < zy) {
            rep.triangle_ok = false;
            detail::keep_smallest(rep.first_violation,
                                  triangle_violation(x, z, y, rx[z], rx[y], zy));
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace detail

inline ValidationReport validate_metric(const MetricView& m, const ValidateOptions& opt = {}) {
  return opt.mode == ValidationMode::Full ? detail::validate_full(m, opt)
                                          : detail::validate_structured(m, opt);
}

inline ValidationReport validate_metric(const MetricView& m, ValidationMode mode) {
  ValidateOptions opt;
  opt.mode = mode;
  return validate_metric(m, opt);
}

}  // namespace madv
