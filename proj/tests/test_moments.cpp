#include <gtest/gtest.h>

#include <random>

#include "curvewind/moments.hpp"
#include "curvewind/synth.hpp"
#include "support/oracle.hpp"

using namespace curvewind;

namespace {

double max_diff(const MomentSet& a, const MomentSet& b) {
  return std::max({(a.m0 - b.m0).max_abs(), (a.m1 - b.m1).max_abs(), (a.m2 - b.m2).max_abs()});
}

Point2 random_point(synth::Rng& rng, double lo = -2.0, double hi = 2.0) {
  return {synth::uniform(rng, lo, hi), synth::uniform(rng, lo, hi)};
}

}  // namespace

TEST(SegmentMoments, HorizontalSegment) {
  const auto m = segment_moments({0, 0}, {2, 0});
  EXPECT_EQ(m.m0(0), 0.0);
  EXPECT_EQ(m.m0(1), -2.0);
  EXPECT_EQ(m.m1(0, 0), 0.0);
  EXPECT_EQ(m.m1(0, 1), -2.0);
  EXPECT_EQ(m.m1(1, 0), 0.0);
  EXPECT_EQ(m.m1(1, 1), 0.0);
  EXPECT_FALSE(m.centered());
  EXPECT_EQ(m.weight_length, 2.0);
  EXPECT_EQ(m.weighted_centroid, (Point2{2, 0}));

  const auto q = oracle::quadrature_moments({0, 0}, {2, 0}, {0, 0}, 64);
  EXPECT_LT((m.m0 - q.m0).max_abs(), 1e-14);
  EXPECT_LT((m.m1 - q.m1).max_abs(), 1e-14);
}

TEST(SegmentMoments, ZeroLength) {
  const auto m = segment_moments({1.5, -2}, {1.5, -2});
  EXPECT_EQ(m.m0.max_abs(), 0.0);
  EXPECT_EQ(m.m1.max_abs(), 0.0);
  EXPECT_EQ(m.m2.max_abs(), 0.0);
  EXPECT_EQ(m.weight_length, 0.0);
}

TEST(SegmentMoments, SecondMomentSymmetricInFirstTwoIndices) {
  synth::Rng rng(21);
  for (int n = 0; n < 100; ++n) {
    const auto m = segment_moments(random_point(rng), random_point(rng));
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(m.m2(0, 1, k), m.m2(1, 0, k));
  }
}

TEST(CurveMoments, UseTheChord) {
  const auto cubic = RationalBezierCurve({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_EQ(max_diff(curve_moments(cubic), segment_moments({0, 0}, {1, 0})), 0.0);
  const auto line = RationalBezierCurve::segment({0.3, 1}, {-2, 4});
  EXPECT_EQ(max_diff(curve_moments(line), segment_moments({0.3, 1}, {-2, 4})), 0.0);
}

TEST(SumMoments, ClosedSquareHasNoNetNormal) {
  const auto square = synth::polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true);
  std::vector<MomentSet> parts;
  for (const auto& c : square) parts.push_back(curve_moments(c));
  const auto total = sum_moments(parts);
  EXPECT_LT(total.m0.max_abs(), 1e-14);
  EXPECT_EQ(centroid(total), (Point2{0.5, 0.5}));
}

TEST(SumMoments, LinearityAndEmpty) {
  const auto m = segment_moments({0.2, 0.1}, {1.7, -0.4});
  const std::vector<MomentSet> two{m, m};
  const auto sum = sum_moments(two);
  MomentSet doubled = m;
  doubled.m0 *= 2.0;
  doubled.m1 *= 2.0;
  doubled.m2 *= 2.0;
  EXPECT_EQ(max_diff(sum, doubled), 0.0);
  EXPECT_EQ(sum.weight_length, 2.0 * m.weight_length);
  const auto none = sum_moments({});
  EXPECT_EQ(none.m0.max_abs() + none.m1.max_abs() + none.m2.max_abs() + none.weight_length, 0.0);
}

TEST(SumMoments, RejectsCenteredParts) {
  const auto m = segment_moments({0, 0}, {1, 1});
  const std::vector<MomentSet> parts{m, center_moments(m, {1, 0})};
  EXPECT_THROW(sum_moments(parts), MixedCentering);
}

TEST(SumMoments, SubdividedPiecesTelescopeInZerothMoment) {
  synth::Rng rng(22);
  for (int n = 0; n < 20; ++n) {
    const auto c = synth::random_curve(rng, 4);
    std::vector<RationalBezierCurve> pieces{c};
    for (int level = 0; level < 3; ++level) {
      std::vector<RationalBezierCurve> next;
      for (const auto& p : pieces) {
        auto [l, r] = subdivide(p, 0.5);
        next.push_back(l);
        next.push_back(r);
      }
      pieces = next;
    }
    std::vector<MomentSet> parts;
    for (const auto& p : pieces) parts.push_back(curve_moments(p));
    EXPECT_LT((sum_moments(parts).m0 - curve_moments(c).m0).max_abs(), 1e-14);
  }
}

TEST(SumMoments, OrderIndependent) {
  synth::Rng rng(23);
  std::vector<MomentSet> parts;
  for (int n = 0; n < 50; ++n) parts.push_back(segment_moments(random_point(rng), random_point(rng)));
  const auto forward = sum_moments(parts);
  std::shuffle(parts.begin(), parts.end(), rng);
  const auto shuffled = sum_moments(parts);
  EXPECT_LT(max_diff(forward, shuffled), 1e-13);
}

TEST(CenterMoments, OriginIsIdentity) {
  const auto m = segment_moments({0.5, 2}, {-1, 3});
  const auto c = center_moments(m, {0, 0});
  EXPECT_EQ(max_diff(m, c), 0.0);
  EXPECT_TRUE(c.centered());
  EXPECT_THROW(center_moments(c, {0, 0}), AlreadyCentered);
}

TEST(CenterMoments, SymmetricSegmentAboutItsMidpoint) {
  const auto m = segment_moments({-1, 0}, {1, 0});
  const auto c = center_moments(m, {0, 0});
  EXPECT_EQ(c.m1(0, 0), 0.0);
  EXPECT_EQ(c.m1(0, 1), 0.0);
  const auto q = oracle::quadrature_moments({-1, 0}, {1, 0}, {0, 0}, 64);
  EXPECT_LT(max_diff(c, q), 1e-14);
}

TEST(CenterMoments, MatchesQuadratureOracle) {
  synth::Rng rng(24);
  for (int n = 0; n < 100; ++n) {
    const Point2 a = random_point(rng), b = random_point(rng), x0 = random_point(rng, -3.0, 3.0);
    const auto c = center_moments(segment_moments(a, b), x0);
    const auto q = oracle::quadrature_moments(a, b, x0, 64);
    EXPECT_LT(max_diff(c, q), 1e-12) << "case " << n;
    EXPECT_EQ(*c.centered_about, x0);
  }
}

TEST(CenterMoments, CommutesWithSummation) {
  synth::Rng rng(25);
  std::vector<MomentSet> parts;
  for (int n = 0; n < 30; ++n) parts.push_back(segment_moments(random_point(rng), random_point(rng)));
  const Point2 x0{0.4, -0.7};
  const auto whole = center_moments(sum_moments(parts), x0);
  MomentSet sum_of_centered;
  for (const auto& p : parts) {
    const auto c = center_moments(p, x0);
    sum_of_centered.m0 += c.m0;
    sum_of_centered.m1 += c.m1;
    sum_of_centered.m2 += c.m2;
  }
  EXPECT_LT(max_diff(whole, sum_of_centered), 1e-12);
}

TEST(Centroid, WeightedByChordLength) {
  EXPECT_EQ(centroid(segment_moments({0, 0}, {2, 0})), (Point2{1, 0}));
  const std::vector<MomentSet> two{segment_moments({-0.5, 0}, {0.5, 0}), segment_moments({2, 1.5}, {2, 2.5})};
  EXPECT_EQ(centroid(sum_moments(two)), (Point2{1, 1}));
  EXPECT_THROW(centroid(segment_moments({1, 1}, {1, 1})), ZeroMeasure);
}
