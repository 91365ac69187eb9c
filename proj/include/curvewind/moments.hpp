#pragma once

#include <optional>
#include <span>

#include "curvewind/errors.hpp"
#include "curvewind/geometry.hpp"

namespace curvewind {

// Far-field expansion coefficients of a curve or cluster.
//
//   m0[k]       = integral of n_k
//   m1[i][k]    = integral of (x - x0)_i n_k
//   m2[i][j][k] = integral of (x - x0)_i (x - x0)_j n_k
//
// with x0 = centered_about, or the origin when the set is uncentered. The normal is
// n = (t_y, -t_x) for tangent t, so counter-clockwise loops have outward normals.
// Only uncentered sets add.
struct MomentSet {
  Tensor2 m0;
  Tensor22 m1;
  Tensor222 m2;
  std::optional<Point2> centered_about;
  double weight_length = 0.0;
  Point2 weighted_centroid;

  bool centered() const { return centered_about.has_value(); }

  MomentSet& operator+=(const MomentSet& o) {
    if (centered() || o.centered()) throw MixedCentering();
    m0 += o.m0;
    m1 += o.m1;
    m2 += o.m2;
    weight_length += o.weight_length;
    weighted_centroid += o.weighted_centroid;
    return *this;
  }
};

// Exact uncentered moments of the straight segment a -> b.
inline MomentSet segment_moments(Point2 a, Point2 b) {
  MomentSet m;
  const Point2 d = b - a;
  const Point2 mid = 0.5 * (a + b);
  m.m0 = Tensor2{{d.y, -d.x}};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      m.m1(i, j) = mid[i] * m.m0(j);
      // integral over s in [0,1] of x_i(s) x_j(s), with x(s) = a + s d
      const double xx = a[i] * a[j] + 0.5 * (a[i] * d[j] + a[j] * d[i]) + d[i] * d[j] / 3.0;
      for (std::size_t k = 0; k < 2; ++k) m.m2(i, j, k) = xx * m.m0(k);
    }
  }
  m.weight_length = norm(d);
  m.weighted_centroid = m.weight_length * mid;
  return m;
}

// Moments of a curve's chord. Valid stand-in for the curve wherever the query lies
// outside the curve's hull, which the far-field test guarantees.
inline MomentSet curve_moments(const RationalBezierCurve& curve) {
  return segment_moments(curve.front(), curve.back());
}

inline MomentSet sum_moments(std::span<const MomentSet> parts) {
  MomentSet total;
  for (const auto& p : parts) total += p;
  return total;
}

inline MomentSet center_moments(const MomentSet& m, Point2 x0) {
  if (m.centered()) throw AlreadyCentered();
  MomentSet c = m;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) c.m1(i, j) = m.m1(i, j) - x0[i] * m.m0(j);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        // the bracket is symmetric in i and j, keeping m2 exactly symmetric
        c.m2(i, j, k) = m.m2(i, j, k) - (x0[i] * m.m1(j, k) + x0[j] * m.m1(i, k)) +
                        x0[i] * x0[j] * m.m0(k);
  c.centered_about = x0;
  return c;
}

// Chord-length weighted centroid.
inline Point2 centroid(const MomentSet& m) {
  if (!(m.weight_length > 0.0)) throw ZeroMeasure();
  return m.weighted_centroid / m.weight_length;
}

}  // namespace curvewind
