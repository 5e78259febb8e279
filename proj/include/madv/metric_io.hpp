#pragma once

// Dense metric text format: first line n, then n rows of n space-separated
// integers.

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "madv/metric_core.hpp"

namespace madv {

inline DenseMetric read_dense_metric(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> Error {
    return Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + msg);
  };
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw fail("missing point count");
  std::istringstream head(line);
  long long n = -1;
  std::string extra;
  if (!(head >> n) || n < 1 || (head >> extra)) throw fail("expected a positive point count");

  DenseMetric m(static_cast<std::size_t>(n));
  for (long long x = 0; x < n; ++x) {
    if (!next_line()) throw fail("expected " + std::to_string(n) + " matrix rows, found " +
                                 std::to_string(x));
    std::istringstream row(line);
    for (long long y = 0; y < n; ++y) {
      long long v = 0;
      if (!(row >> v)) throw fail("row has fewer than " + std::to_string(n) + " entries");
      if (v < 0 || v > std::numeric_limits<Dist>::max()) {
        throw fail("entry " + std::to_string(v) + " outside [0, 255]");
      }
      m.set(static_cast<PointId>(x), static_cast<PointId>(y), static_cast<Dist>(v));
    }
    if (row >> extra) throw fail("row has more than " + std::to_string(n) + " entries");
  }
  if (next_line()) throw fail("trailing content after matrix");
  return m;
}

inline void write_dense_metric(std::ostream& out, const MetricView& m) {
  const std::size_t n = m.size();
  out << n << '\n';
  std::vector<Dist> r(n);
  std::string buf;
  for (std::size_t x = 0; x < n; ++x) {
    m.fill_row(static_cast<PointId>(x), 0, r);
    buf.clear();
    for (std::size_t y = 0; y < n; ++y) {
      if (y) buf.push_back(' ');
      buf += std::to_string(r[y]);
    }
    buf.push_back('\n');
    out << buf;
  }
}

}  // namespace madv
