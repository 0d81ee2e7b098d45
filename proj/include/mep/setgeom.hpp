#ifndef MEP_SETGEOM_HPP
#define MEP_SETGEOM_HPP

// Limit sets of the scaled ME plots and windowed Hausdorff distances between a
// finite point set and such a limit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mep/error.hpp"
#include "mep/format.hpp"
#include "mep/meplot.hpp"
#include "mep/regime.hpp"

namespace mep {

/// Truncation box [0,M]^2.
struct Window {
  double m = 5.0;

  /// Customary box per regime: 5 for the unbounded limits, 1 for Weibull.
  static Window default_for(Regime r) { return {r == Regime::Weibull ? 1.0 : 5.0}; }
};

/// Closed interval [lo, hi] of the line parameter t, possibly empty.
struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo <= hi); }
};

/// Parametric limit {(t, slope*t + intercept) : t_lo <= t <= t_hi}.
struct LimitSet {
  Regime regime = Regime::Frechet;
  /// xi/(1-xi) for Frechet and Weibull, 1 for Gumbel.
  double slope_param = 1.0;
  double slope = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0;
  double t_hi = std::numeric_limits<double>::infinity();

  Point at(double t) const { return {t, slope * t + intercept}; }

  /// Parameter range of the part of the set inside [0,M]^2.
  ParamRange clip(const Window& w) const {
    ParamRange r{std::max(t_lo, 0.0), std::min(t_hi, w.m)};
    if (slope > 0.0) {
      r.lo = std::max(r.lo, -intercept / slope);
      r.hi = std::min(r.hi, (w.m - intercept) / slope);
    } else if (slope < 0.0) {
      r.lo = std::max(r.lo, (w.m - intercept) / slope);
      r.hi = std::min(r.hi, -intercept / slope);
    } else if (intercept < 0.0 || intercept > w.m) {
      return {1.0, 0.0};
    }
    return r;
  }
};

inline LimitSet limit_set(Regime regime, double xi) {
  LimitSet s;
  s.regime = regime;
  switch (regime) {
    case Regime::Frechet:
      if (!(xi > 0.0 && xi < 1.0))
        throw DomainError("frechet limit needs 0 < xi < 1, got xi = " + format_double(xi));
      s.slope_param = xi / (1.0 - xi);
      s.slope = s.slope_param;
      s.intercept = 0.0;
      s.t_lo = 1.0;
      break;
    case Regime::Weibull:
      if (!(xi < 0.0)) throw DomainError("weibull limit needs xi < 0, got xi = " + format_double(xi));
      s.slope_param = xi / (1.0 - xi);
      s.slope = s.slope_param;
      s.intercept = -s.slope_param;
      s.t_lo = 0.0;
      s.t_hi = 1.0;
      break;
    case Regime::Gumbel:
      s.slope_param = 1.0;
      s.slope = 0.0;
      s.intercept = 1.0;
      s.t_lo = 0.0;
      break;
  }
  return s;
}

namespace detail {

inline void check_window(const Window& w, const LimitSet& limit) {
  if (!(w.m > 0.0) || !std::isfinite(w.m)) throw WindowError("window size must be positive and finite");
  if (limit.regime == Regime::Frechet && !(w.m > 1.0))
    throw WindowError("frechet window needs M > 1, got " + format_double(w.m));
}

inline double clamp_project(Point p, const LimitSet& limit, ParamRange r) {
  const double t = (p.x + limit.slope * (p.y - limit.intercept)) / (1.0 + limit.slope * limit.slope);
  return std::clamp(t, r.lo, r.hi);
}

inline double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Nearest-neighbour distance from q to points sorted by x.
inline double nearest_sorted(Point q, std::span<const Point> by_x) {
  const auto it = std::lower_bound(by_x.begin(), by_x.end(), q.x,
                                   [](const Point& p, double x) { return p.x < x; });
  double best = std::numeric_limits<double>::infinity();
  for (auto r = it; r != by_x.end() && r->x - q.x < best; ++r) best = std::min(best, dist(q, *r));
  for (auto l = it; l != by_x.begin();) {
    --l;
    if (q.x - l->x >= best) break;
    best = std::min(best, dist(q, *l));
  }
  return best;
}

inline std::vector<Point> sorted_by_x(std::span<const Point> pts) {
  std::vector<Point> out(pts.begin(), pts.end());
  std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  return out;
}

}  // namespace detail

/// Exact distance from p to the part of the limit inside the window.
inline double point_to_limit_distance(Point p, const LimitSet& limit, const Window& w) {
  detail::check_window(w, limit);
  const ParamRange r = limit.clip(w);
  if (r.empty()) throw WindowError("limit side is empty inside [0," + format_double(w.m) + "]^2");
  return detail::dist(p, limit.at(detail::clamp_project(p, limit, r)));
}

/// Both one-sided components of a windowed Hausdorff distance.
struct HausdorffResult {
  double value = 0.0;
  double point_side = 0.0;  // sup over points of distance to the limit
  double limit_side = 0.0;  // sup over the discretized limit of distance to the points
  double pitch = 0.0;       // arclength spacing of the limit discretization
  std::size_t points_used = 0;
};

/// Points of `pts` inside [0,M]^2.
inline std::vector<Point> clip_points(std::span<const Point> pts, const Window& w) {
  std::vector<Point> out;
  for (const Point& p : pts)
    if (p.x >= 0.0 && p.x <= w.m && p.y >= 0.0 && p.y <= w.m) out.push_back(p);
  return out;
}

/// Hausdorff distance between the clipped point set and the clipped limit.
/// The limit side is evaluated on a grid of arclength pitch M/divisions, so
/// that component is exact up to one pitch.
inline HausdorffResult hausdorff_windowed_detail(std::span<const Point> pts, const LimitSet& limit, const Window& w,
                                                 std::size_t divisions = 10000) {
  detail::check_window(w, limit);
  const ParamRange r = limit.clip(w);
  if (r.empty()) throw WindowError("limit side is empty inside [0," + format_double(w.m) + "]^2");
  const std::vector<Point> clipped = detail::sorted_by_x(clip_points(pts, w));
  if (clipped.empty()) throw WindowError("point side is empty inside [0," + format_double(w.m) + "]^2");

  HausdorffResult res;
  res.points_used = clipped.size();
  for (const Point& p : clipped)
    res.point_side = std::max(res.point_side, detail::dist(p, limit.at(detail::clamp_project(p, limit, r))));

  const double target_pitch = w.m / static_cast<double>(divisions);
  const double speed = std::sqrt(1.0 + limit.slope * limit.slope);
  const double length = (r.hi - r.lo) * speed;
  const auto steps = static_cast<std::size_t>(std::ceil(length / target_pitch));
  res.pitch = steps == 0 ? 0.0 : length / static_cast<double>(steps);
  for (std::size_t j = 0; j <= steps; ++j) {
    const double t = steps == 0 ? r.lo : r.lo + (r.hi - r.lo) * static_cast<double>(j) / static_cast<double>(steps);
    res.limit_side = std::max(res.limit_side, detail::nearest_sorted(limit.at(t), clipped));
  }
  res.value = std::max(res.point_side, res.limit_side);
  return res;
}

inline double hausdorff_windowed(const ScaledSet& set, const LimitSet& limit, const Window& w) {
  return hausdorff_windowed_detail(set.points, limit, w).value;
}

/// Hausdorff distance between two finite point sets (no window).
inline double hausdorff_points(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw WindowError("hausdorff distance of an empty point set");
  const auto sa = detail::sorted_by_x(a);
  const auto sb = detail::sorted_by_x(b);
  double h = 0.0;
  for (const Point& p : sa) h = std::max(h, detail::nearest_sorted(p, sb));
  for (const Point& p : sb) h = std::max(h, detail::nearest_sorted(p, sa));
  return h;
}

}  // namespace mep

#endif  // MEP_SETGEOM_HPP
