#ifndef MEP_MEPLOT_HPP
#define MEP_MEPLOT_HPP

// Empirical mean excess, the ME plot, and the regime-scaled point sets.

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mep/error.hpp"
#include "mep/format.hpp"
#include "mep/regime.hpp"
#include "mep/sample.hpp"
#include "mep/text.hpp"

namespace mep {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Sample mean of the strict excesses X_i - u over X_i > u.
inline double empirical_me(const SortedSample& s, double u) {
  const std::size_t m = s.count_above(u);
  if (m == 0) throw SampleError("no sample value exceeds threshold " + format_double(u));
  const auto v = s.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += v[i] - u;
  return sum / static_cast<double>(m);
}

/// (threshold, mean excess) pairs of the ME plot.
struct MePlotPoints {
  std::vector<Point> points;
};

namespace detail {

// Calls emit(i, threshold, mean_excess) for i = 2..last (1-based) once per
// distinct threshold below the maximum, using running sums.
template <class Emit>
void walk_me_plot(const SortedSample& s, std::size_t last, Emit&& emit) {
  const auto v = s.values();
  double running = v[0];  // sum of X_(1..i-1)
  for (std::size_t i = 2; i <= last; ++i) {
    const double u = v[i - 1];
    if (u < v[i - 2]) {
      const double m = static_cast<double>(i - 1);
      emit(i, u, (running - m * u) / m);
    }
    running += u;
  }
}

}  // namespace detail

/// Points (X_(i), M^(X_(i))) for i = 2..n; tied thresholds appear once and
/// thresholds equal to the maximum are skipped.
inline MePlotPoints me_plot(const SortedSample& s) {
  if (s.size() < 2) throw SampleError("me plot needs at least 2 values, got " + std::to_string(s.size()));
  const auto v = s.values();
  if (v.front() == v.back()) throw SampleError("degenerate sample: all values are identical");
  MePlotPoints out;
  detail::walk_me_plot(s, s.size(), [&](std::size_t, double u, double me) { out.points.push_back({u, me}); });
  return out;
}

/// Normalizer record of a scaled set: the points are ((X - offset)/scale, M^/scale).
struct ScaleMeta {
  std::string label;
  double scale = 1.0;
  double offset = 0.0;
};

/// Regime-scaled ME plot built from the top k order statistics.
struct ScaledSet {
  Regime regime = Regime::Frechet;
  std::vector<Point> points;
  std::size_t k = 0;
  ScaleMeta meta;
};

inline ScaledSet scaled_set(const SortedSample& s, std::size_t k, Regime regime) {
  const std::size_t n = s.size();
  if (k < 2 || k >= n)
    throw DomainError("scaled set needs 2 <= k < n (k = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");
  ScaledSet out;
  out.regime = regime;
  out.k = k;
  const double xk = s.order_stat(k);
  switch (regime) {
    case Regime::Frechet:
      if (!(xk > 0.0))
        throw SampleError("frechet scaling needs X_(" + std::to_string(k) + ") > 0, got " + format_double(xk));
      out.meta = {"X_(k)", xk, 0.0};
      break;
    case Regime::Weibull: {
      const double d = s.order_stat(1) - xk;
      if (!(d > 0.0))
        throw SampleError("weibull scaling needs X_(1) > X_(" + std::to_string(k) + "), both equal " + format_double(xk));
      out.meta = {"X_(1)-X_(k)", d, xk};
      break;
    }
    case Regime::Gumbel: {
      const std::size_t half = (k + 1) / 2;
      const double d = s.order_stat(half) - xk;
      if (!(d > 0.0))
        throw SampleError("gumbel scaling needs X_(" + std::to_string(half) + ") > X_(" + std::to_string(k) +
                          "), both equal " + format_double(xk));
      out.meta = {"X_(ceil(k/2))-X_(k)", d, xk};
      break;
    }
  }
  const double scale = out.meta.scale;
  const double offset = out.meta.offset;
  detail::walk_me_plot(s, k, [&](std::size_t, double u, double me) {
    out.points.push_back({(u - offset) / scale, me / scale});
  });
  if (out.points.empty()) throw SampleError("scaled set is empty: X_(1..k) are all tied");
  return out;
}

/// The point of minimal abscissa (ties: smallest ordinate).
inline Point extract_min_x_concomitant(const ScaledSet& set) {
  if (set.points.empty()) throw SampleError("cannot extract from an empty set");
  Point best = set.points.front();
  for (const Point& p : set.points)
    if (p.x < best.x || (p.x == best.x && p.y < best.y)) best = p;
  return best;
}

// ---------------------------------------------------------------------------
// CSV form: two '#' header lines (regime, normalizer) then "x,y" rows.

struct PointFile {
  std::string regime = "none";
  std::string normalizer = "none";
  std::vector<Point> points;
};

inline void write_points_csv(std::ostream& os, const PointFile& f) {
  os << "# regime=" << f.regime << "\n";
  os << "# normalizer=" << f.normalizer << "\n";
  for (const Point& p : f.points) os << format_double(p.x) << "," << format_double(p.y) << "\n";
}

inline PointFile to_point_file(const MePlotPoints& m) { return {"none", "none", m.points}; }

inline PointFile to_point_file(const ScaledSet& s) {
  std::string norm = s.meta.label + " scale=" + format_double(s.meta.scale);
  if (s.meta.offset != 0.0 || s.regime != Regime::Frechet) norm += " offset=" + format_double(s.meta.offset);
  norm += " k=" + std::to_string(s.k);
  return {std::string(to_string(s.regime)), norm, s.points};
}

inline PointFile read_points_csv(std::istream& is) {
  PointFile f;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# regime=", 0) == 0) f.regime = line.substr(9);
      else if (line.rfind("# normalizer=", 0) == 0) f.normalizer = line.substr(13);
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected x,y");
    double x = 0, y = 0;
    try {
      x = detail::parse_number(detail::trim(std::string_view(line).substr(0, comma)), "x");
      y = detail::parse_number(detail::trim(std::string_view(line).substr(comma + 1)), "y");
    } catch (const ParseError&) {
      throw ParseError("line " + std::to_string(lineno) + ": cannot parse '" + line + "'");
    }
    f.points.push_back({x, y});
  }
  return f;
}

}  // namespace mep

#endif  // MEP_MEPLOT_HPP
