#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "curvewind/direct.hpp"
#include "curvewind/synth.hpp"
#include "support/oracle.hpp"

using namespace curvewind;

namespace {

double loop_winding(const std::vector<RationalBezierCurve>& curves, Point2 q, const DirectConfig& cfg = {}) {
  double w = 0.0;
  for (const auto& c : curves) w += curve_winding(q, c, cfg);
  return w;
}

// Minimum distance from q to a sampled curve; good enough to keep probes off boundaries.
double sampled_distance(const std::vector<RationalBezierCurve>& curves, Point2 q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : curves)
    for (int i = 0; i <= 400; ++i) best = std::min(best, distance(q, evaluate(c, i / 400.0)));
  return best;
}

Point2 rotate(Point2 p, double a) { return {std::cos(a) * p.x - std::sin(a) * p.y, std::sin(a) * p.x + std::cos(a) * p.y}; }

RationalBezierCurve transformed(const RationalBezierCurve& c, double angle, Point2 shift) {
  std::vector<Point2> pts;
  for (Point2 p : c.control_points()) pts.push_back(rotate(p, angle) + shift);
  return RationalBezierCurve(pts, std::vector<double>(c.weights().begin(), c.weights().end()), c.id());
}

}  // namespace

// The formula atan2(cross, dot) / 2pi gives a quarter turn here.
TEST(SegmentWinding, RightAngle) { EXPECT_DOUBLE_EQ(segment_winding({0, 0}, {1, 0}, {0, 1}), 0.25); }

TEST(SegmentWinding, ClockwiseSeenFromBelow) {
  const Point2 q{0, -1}, a{-1, 0}, b{1, 0};
  EXPECT_DOUBLE_EQ(segment_winding(q, a, b), -0.25);
  EXPECT_DOUBLE_EQ(segment_winding(q, a, b), oracle::swept_angle(q, a, b) / (2.0 * std::numbers::pi));
}

TEST(SegmentWinding, DegenerateCases) {
  EXPECT_EQ(segment_winding({1, 1}, {1, 1}, {2, 3}), 0.0);
  EXPECT_EQ(segment_winding({2, 3}, {1, 1}, {2, 3}), 0.0);
  EXPECT_EQ(segment_winding({0, 0}, {1, 1}, {1, 1}), 0.0);
  // q on the segment interior: half a turn, reported at the top of the range
  EXPECT_EQ(segment_winding({0, 0}, {-1, 0}, {1, 0}), 0.5);
  EXPECT_EQ(segment_winding({0, 0}, {1, 0}, {-1, 0}), 0.5);
}

TEST(SegmentWinding, MatchesAngleDifferenceOracle) {
  synth::Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const Point2 q{synth::uniform(rng, -1, 1), synth::uniform(rng, -1, 1)};
    const Point2 a{synth::uniform(rng, -1, 1), synth::uniform(rng, -1, 1)};
    const Point2 b{synth::uniform(rng, -1, 1), synth::uniform(rng, -1, 1)};
    const double w = segment_winding(q, a, b);
    EXPECT_GT(w, -0.5);
    EXPECT_LE(w, 0.5);
    EXPECT_NEAR(w, oracle::swept_angle(q, a, b) / (2.0 * std::numbers::pi), 1e-14);
  }
}

TEST(CurveWinding, HalfCircleFromCenter) {
  const auto half = synth::arc({0, 0}, 1.0, 0.0, std::numbers::pi, Point2{-1, 0});
  EXPECT_NEAR(loop_winding(half, {0, 0}), 0.5, 1e-12);
}

TEST(CurveWinding, UnitCircle) {
  const auto circle = synth::circle({0, 0}, 1.0);
  ASSERT_EQ(circle.size(), 4u);
  EXPECT_NEAR(loop_winding(circle, {0, 0}), 1.0, 1e-9);
  EXPECT_NEAR(loop_winding(circle, {3, 0}), 0.0, 1e-9);
  EXPECT_NEAR(oracle::polyline_winding({0, 0}, circle, 100000), 1.0, 1e-8);
}

TEST(CurveWinding, ChordEquivalenceOutsideHull) {
  synth::Rng rng(42);
  int checked = 0;
  while (checked < 100) {
    const auto c = synth::random_curve(rng, 4);
    const Point2 q{synth::uniform(rng, -2, 2), synth::uniform(rng, -2, 2)};
    if (aabb(c).inflated(1e-3).contains(q)) continue;
    const double chord = segment_winding(q, c.front(), c.back());
    EXPECT_NEAR(curve_winding(q, c, DirectConfig{}), chord, 1e-9);
    EXPECT_NEAR(oracle::polyline_winding(q, c, 2000), chord, 1e-9);
    ++checked;
  }
}

TEST(CurveWinding, AgreesWithPolylineOracleNearCurves) {
  synth::Rng rng(43);
  int checked = 0;
  while (checked < 40) {
    const auto c = synth::random_curve(rng, 4);
    const Aabb box = aabb(c);
    const Point2 q{synth::uniform(rng, box.min.x, box.max.x), synth::uniform(rng, box.min.y, box.max.y)};
    if (sampled_distance({c}, q) < 1e-3 * box.diagonal() * 5.0) continue;
    EXPECT_NEAR(curve_winding(q, c, DirectConfig::for_diagonal(box.diagonal())),
                oracle::polyline_winding(q, c, 100000), 1e-6);
    ++checked;
  }
}

TEST(CurveWinding, WatertightLoopsAreIntegral) {
  for (const auto& named : synth::constructed_shapes()) {
    if (!named.watertight) continue;
    const auto& s = named.shape;
    const auto cfg = DirectConfig::for_diagonal(s.diagonal());
    synth::Rng rng(44);
    int checked = 0;
    while (checked < 200) {
      const Aabb box = s.global_aabb.inflated(0.2 * s.diagonal());
      const Point2 q{synth::uniform(rng, box.min.x, box.max.x), synth::uniform(rng, box.min.y, box.max.y)};
      if (sampled_distance(s.curves, q) < 1e-3 * s.diagonal()) continue;
      const double w = loop_winding(s.curves, q, cfg);
      EXPECT_NEAR(w, std::round(w), 1e-8) << named.name;
      ++checked;
    }
  }
}

TEST(CurveWinding, SubdivisionAdditivity) {
  synth::Rng rng(45);
  for (int i = 0; i < 100; ++i) {
    const auto c = synth::random_curve(rng, 4);
    const double t = synth::uniform(rng, 0.05, 0.95);
    const auto [l, r] = subdivide(c, t);
    const Point2 q{synth::uniform(rng, -1, 1), synth::uniform(rng, -1, 1)};
    if (sampled_distance({c}, q) < 1e-3) continue;
    EXPECT_NEAR(curve_winding(q, c, {}), curve_winding(q, l, {}) + curve_winding(q, r, {}), 1e-10);
  }
}

TEST(CurveWinding, ReversalNegatesExactly) {
  synth::Rng rng(46);
  for (int i = 0; i < 100; ++i) {
    const auto c = synth::random_curve(rng, 4);
    const Point2 q{synth::uniform(rng, -1, 1), synth::uniform(rng, -1, 1)};
    EXPECT_EQ(curve_winding(q, c.reversed(), {}), -curve_winding(q, c, {}));
  }
}

TEST(CurveWinding, RigidMotionInvariance) {
  synth::Rng rng(47);
  for (int i = 0; i < 100; ++i) {
    const auto c = synth::random_curve(rng, 4);
    const Point2 q{synth::uniform(rng, -1, 1), synth::uniform(rng, -1, 1)};
    if (sampled_distance({c}, q) < 1e-3) continue;
    const double angle = synth::uniform(rng, 0, 2 * std::numbers::pi);
    const Point2 shift{synth::uniform(rng, -5, 5), synth::uniform(rng, -5, 5)};
    EXPECT_NEAR(curve_winding(rotate(q, angle) + shift, transformed(c, angle, shift), {}), curve_winding(q, c, {}),
                1e-10);
  }
}

TEST(CurveWinding, BoundaryQueriesTerminateAndAreFlagged) {
  const auto circle = synth::circle({0, 0}, 1.0);
  const auto cfg = DirectConfig::for_diagonal(2.0 * std::sqrt(2.0));
  DirectStats stats;
  const Point2 on = evaluate(circle[1], 0.3);
  double w = 0.0;
  for (const auto& c : circle) w += curve_winding(on, c, cfg, &stats);
  // A finite principal value from the deepest chords; no snapping to 1/2 is promised.
  EXPECT_TRUE(stats.on_boundary);
  EXPECT_TRUE(std::isfinite(w));
  EXPECT_LE(std::abs(w - 0.5), 0.5 + 1e-9);
  EXPECT_LE(stats.deepest, cfg.max_depth);

  DirectStats line_stats;
  curve_winding({0.5, 0}, RationalBezierCurve::segment({0, 0}, {1, 0}), cfg, &line_stats);
  EXPECT_TRUE(line_stats.on_boundary);

  DirectStats off;
  curve_winding({0, 0}, circle[0], cfg, &off);
  EXPECT_FALSE(off.on_boundary);
}

TEST(CurveWinding, DegenerateCurveContributesZero) {
  const auto point = RationalBezierCurve({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  EXPECT_EQ(curve_winding({0, 0}, point, {}), 0.0);
  EXPECT_EQ(curve_winding({1, 1}, point, DirectConfig::for_diagonal(1.0)), 0.0);
}

TEST(SubdivisionCache, MatchesUncachedEvaluation) {
  synth::Rng rng(48);
  std::vector<RationalBezierCurve> curves;
  for (std::uint32_t i = 0; i < 20; ++i) curves.push_back(synth::random_curve(rng, 4, i));
  SubdivisionCache cache;
  const DirectConfig cfg = DirectConfig::for_diagonal(2.0);
  for (int k = 0; k < 500; ++k) {
    const Point2 q{synth::uniform(rng, -1, 1), synth::uniform(rng, -1, 1)};
    for (const auto& c : curves) EXPECT_EQ(cache.winding(q, c, cfg), curve_winding(q, c, cfg));
  }
  EXPECT_GT(cache.pieces(), curves.size());
}

TEST(SubdivisionCache, ClearsWhenOverBudget) {
  SubdivisionCache cache(64);
  const auto circle = synth::circle({0, 0}, 1.0);
  std::vector<RationalBezierCurve> curves;
  for (std::uint32_t i = 0; i < circle.size(); ++i) curves.push_back(circle[i].with_id(i));
  for (int k = 0; k < 200; ++k) {
    const Point2 q = (0.9 + 0.001 * k) * Point2{std::cos(0.1 * k), std::sin(0.1 * k)};
    double w = 0.0;
    for (const auto& c : curves) w += cache.winding(q, c, {});
    EXPECT_NEAR(w, std::round(w), 1e-9);
  }
  EXPECT_LT(cache.pieces(), 64u + 2u * 30u * 4u);
}
