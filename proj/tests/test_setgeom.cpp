#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mep/setgeom.hpp"

using mep::LimitSet;
using mep::Point;
using mep::Regime;
using mep::Window;

namespace {

// Limit clipped to the window, sampled every `step` in t.
std::vector<Point> dense_limit(const LimitSet& l, const Window& w, double step) {
  const auto r = l.clip(w);
  std::vector<Point> out;
  const auto n = static_cast<int>(std::ceil((r.hi - r.lo) / step));
  for (int i = 0; i <= n; ++i) out.push_back(l.at(r.lo + (r.hi - r.lo) * i / n));
  return out;
}

double brute_hausdorff(const std::vector<Point>& pts, const LimitSet& l, const Window& w) {
  const auto lim = dense_limit(l, w, 1e-4);
  const auto in = mep::clip_points(pts, w);
  auto d = [](Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); };
  double h = 0.0;
  for (const auto& p : in) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : lim) best = std::min(best, d(p, q));
    h = std::max(h, best);
  }
  for (const auto& q : lim) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : in) best = std::min(best, d(p, q));
    h = std::max(h, best);
  }
  return h;
}

std::vector<Point> noisy_points(const LimitSet& l, int n, double noise, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> t(l.t_lo, std::isfinite(l.t_hi) ? l.t_hi : 6.0);
  std::normal_distribution<double> e(0.0, noise);
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) {
    const auto p = l.at(t(gen));
    out.push_back({p.x + e(gen), p.y + e(gen)});
  }
  return out;
}

}  // namespace

TEST(LimitSet, Examples) {
  const auto f = mep::limit_set(Regime::Frechet, 0.5);
  EXPECT_DOUBLE_EQ(f.slope, 1.0);
  EXPECT_EQ(f.t_lo, 1.0);
  EXPECT_TRUE(std::isinf(f.t_hi));

  const auto w = mep::limit_set(Regime::Weibull, -1.0);
  EXPECT_EQ(w.at(0.0), (Point{0.0, 0.5}));
  EXPECT_EQ(w.at(1.0), (Point{1.0, 0.0}));

  const auto g = mep::limit_set(Regime::Gumbel, 0.0);
  EXPECT_EQ(g.at(3.0), (Point{3.0, 1.0}));
  EXPECT_EQ(g.t_lo, 0.0);
}

TEST(LimitSet, RangeErrors) {
  EXPECT_THROW(mep::limit_set(Regime::Frechet, 0.0), mep::DomainError);
  EXPECT_THROW(mep::limit_set(Regime::Frechet, 1.0), mep::DomainError);
  EXPECT_THROW(mep::limit_set(Regime::Weibull, 0.0), mep::DomainError);
  EXPECT_THROW(mep::limit_set(Regime::Weibull, 0.3), mep::DomainError);
}

TEST(PointToLimit, Examples) {
  const auto f = mep::limit_set(Regime::Frechet, 0.5);
  EXPECT_NEAR(mep::point_to_limit_distance({1, 1}, f, {3}), 0.0, 1e-15);
  EXPECT_NEAR(mep::point_to_limit_distance({2, 0}, f, {3}), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(mep::point_to_limit_distance({0, 0}, mep::limit_set(Regime::Gumbel, 0.0), {2}), 1.0, 1e-15);
  // Projection beyond the clipped end is pulled back to (3,3).
  EXPECT_NEAR(mep::point_to_limit_distance({10, 10}, f, {3}), std::hypot(7.0, 7.0), 1e-12);
}

TEST(Hausdorff, SinglePointExample) {
  const auto f = mep::limit_set(Regime::Frechet, 0.5);
  const std::vector<Point> pts{{2, 0}};
  const auto r = mep::hausdorff_windowed_detail(pts, f, {3});
  EXPECT_NEAR(r.value, std::sqrt(10.0), r.pitch);
  EXPECT_NEAR(r.point_side, std::sqrt(2.0), 1e-12);
  EXPECT_LE(r.pitch, 3.0 / 1e4 + 1e-15);
}

TEST(Hausdorff, ZeroForDensePointsOnTheLimit) {
  for (const auto& [regime, xi, m] : {std::tuple{Regime::Frechet, 0.5, 5.0}, std::tuple{Regime::Weibull, -1.0, 1.0},
                                      std::tuple{Regime::Gumbel, 0.0, 5.0}, std::tuple{Regime::Frechet, 0.25, 2.0}}) {
    const auto l = mep::limit_set(regime, xi);
    const Window w{m};
    const auto pts = dense_limit(l, w, m / 1e4);
    const auto r = mep::hausdorff_windowed_detail(pts, l, w);
    EXPECT_LE(r.value, 2.0 * r.pitch) << to_string(regime);
  }
}

TEST(Hausdorff, MatchesBruteForce) {
  for (const auto& [regime, xi, m] : {std::tuple{Regime::Frechet, 0.5, 5.0}, std::tuple{Regime::Weibull, -0.5, 1.0},
                                      std::tuple{Regime::Gumbel, 0.0, 5.0}}) {
    const auto l = mep::limit_set(regime, xi);
    const Window w{m};
    for (unsigned seed = 1; seed <= 4; ++seed) {
      const auto pts = noisy_points(l, 60, 0.05 * m, seed);
      const double fast = mep::hausdorff_windowed_detail(pts, l, w).value;
      EXPECT_NEAR(fast, brute_hausdorff(pts, l, w), 2e-4 * m) << to_string(regime) << " seed " << seed;
    }
  }
}

TEST(Hausdorff, ComponentsBoundedByValueAndPointSideExact) {
  const auto l = mep::limit_set(Regime::Frechet, 0.4);
  const Window w{4};
  const auto pts = noisy_points(l, 200, 0.2, 9);
  const auto r = mep::hausdorff_windowed_detail(pts, l, w);
  EXPECT_LE(r.point_side, r.value);
  EXPECT_LE(r.limit_side, r.value);
  double worst = 0.0;
  for (const auto& p : mep::clip_points(pts, w)) worst = std::max(worst, mep::point_to_limit_distance(p, l, w));
  EXPECT_EQ(worst, r.point_side);
}

TEST(Hausdorff, ExactProjectionAgreesWithDiscretizationWithinPitch) {
  const auto l = mep::limit_set(Regime::Weibull, -2.0);
  const Window w{1};
  const auto grid = dense_limit(l, w, 1e-4);
  for (const auto& p : noisy_points(l, 50, 0.1, 4)) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : grid) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    EXPECT_NEAR(mep::point_to_limit_distance(p, l, w), best, 1e-4);
  }
}

TEST(Hausdorff, LimitSideGrowsWithWindow) {
  const auto l = mep::limit_set(Regime::Frechet, 0.5);
  const auto pts = noisy_points(l, 40, 0.02, 3);
  std::vector<Point> inside;
  for (const auto& p : pts)
    if (p.x >= 0 && p.y >= 0 && p.x <= 2.0 && p.y <= 2.0) inside.push_back(p);
  ASSERT_FALSE(inside.empty());
  double prev = 0.0;
  for (double m : {2.0, 3.0, 5.0, 8.0}) {
    const double ls = mep::hausdorff_windowed_detail(inside, l, {m}).limit_side;
    EXPECT_GE(ls, prev - 1e-12);
    prev = ls;
  }
}

TEST(Hausdorff, WindowErrors) {
  const auto f = mep::limit_set(Regime::Frechet, 0.5);
  const std::vector<Point> pts{{1, 1}};
  EXPECT_THROW(mep::hausdorff_windowed_detail(pts, f, {1.0}), mep::WindowError);
  EXPECT_THROW(mep::hausdorff_windowed_detail(pts, f, {0.0}), mep::WindowError);
  const std::vector<Point> far{{9, 9}};
  EXPECT_THROW(mep::hausdorff_windowed_detail(far, f, {5.0}), mep::WindowError);
  EXPECT_THROW(mep::hausdorff_windowed_detail(pts, mep::limit_set(Regime::Gumbel, 0.0), {0.5}), mep::WindowError);
}

TEST(HausdorffPoints, Symmetric) {
  const auto l = mep::limit_set(Regime::Gumbel, 0.0);
  const auto a = noisy_points(l, 80, 0.3, 1);
  const auto b = noisy_points(l, 50, 0.3, 2);
  EXPECT_EQ(mep::hausdorff_points(a, b), mep::hausdorff_points(b, a));
  EXPECT_EQ(mep::hausdorff_points(a, a), 0.0);
  const std::vector<Point> p{{0, 0}}, q{{3, 4}};
  EXPECT_DOUBLE_EQ(mep::hausdorff_points(p, q), 5.0);
}
