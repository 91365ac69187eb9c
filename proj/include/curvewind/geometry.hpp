#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace curvewind {

// -----------------------------------------------------------------------------
// POINTS AND BOXES
// -----------------------------------------------------------------------------

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr double operator[](std::size_t axis) const { return axis == 0 ? x : y; }
  constexpr double& operator[](std::size_t axis) { return axis == 0 ? x : y; }

  constexpr Point2& operator+=(Point2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Point2& operator-=(Point2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend constexpr Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
  friend constexpr Point2 operator/(Point2 p, double s) { return {p.x / s, p.y / s}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
constexpr double squared_norm(Point2 p) { return dot(p, p); }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

struct Aabb {
  Point2 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point2 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  static constexpr Aabb from_corners(Point2 lo, Point2 hi) { return Aabb{lo, hi}; }

  constexpr bool empty() const { return min.x > max.x || min.y > max.y; }

  constexpr void expand(Point2 p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
  }

  constexpr void expand(const Aabb& o) {
    if (o.empty()) return;
    expand(o.min);
    expand(o.max);
  }

  // Grows the box by `margin` on every side.
  constexpr Aabb inflated(double margin) const {
    return Aabb{{min.x - margin, min.y - margin}, {max.x + margin, max.y + margin}};
  }

  constexpr bool contains(Point2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }

  constexpr bool contains(const Aabb& o) const {
    return o.min.x >= min.x && o.max.x <= max.x && o.min.y >= min.y && o.max.y <= max.y;
  }

  constexpr Point2 center() const { return 0.5 * (min + max); }
  constexpr Point2 extent() const { return max - min; }
  double diagonal() const { return empty() ? 0.0 : norm(max - min); }

  friend constexpr bool operator==(const Aabb&, const Aabb&) = default;
};

// -----------------------------------------------------------------------------
// SMALL TENSORS
// -----------------------------------------------------------------------------

// Dense 2D tensor of the given rank, stored row-major (last index fastest).
template <std::size_t Rank>
struct Tensor {
  static constexpr std::size_t size = std::size_t{1} << Rank;
  std::array<double, size> data{};

  constexpr double& operator()(std::size_t i)
    requires(Rank == 1)
  {
    return data[i];
  }
  constexpr double operator()(std::size_t i) const
    requires(Rank == 1)
  {
    return data[i];
  }
  constexpr double& operator()(std::size_t i, std::size_t j)
    requires(Rank == 2)
  {
    return data[2 * i + j];
  }
  constexpr double operator()(std::size_t i, std::size_t j) const
    requires(Rank == 2)
  {
    return data[2 * i + j];
  }
  constexpr double& operator()(std::size_t i, std::size_t j, std::size_t k)
    requires(Rank == 3)
  {
    return data[4 * i + 2 * j + k];
  }
  constexpr double operator()(std::size_t i, std::size_t j, std::size_t k) const
    requires(Rank == 3)
  {
    return data[4 * i + 2 * j + k];
  }

  constexpr Tensor& operator+=(const Tensor& o) {
    for (std::size_t n = 0; n < size; ++n) data[n] += o.data[n];
    return *this;
  }
  constexpr Tensor& operator-=(const Tensor& o) {
    for (std::size_t n = 0; n < size; ++n) data[n] -= o.data[n];
    return *this;
  }
  constexpr Tensor& operator*=(double s) {
    for (auto& v : data) v *= s;
    return *this;
  }
  friend constexpr Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend constexpr Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend constexpr Tensor operator*(double s, Tensor a) { return a *= s; }
  friend constexpr bool operator==(const Tensor&, const Tensor&) = default;

  double max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
  }

  // Full contraction with a tensor of the same rank.
  constexpr double contract(const Tensor& o) const {
    double s = 0.0;
    for (std::size_t n = 0; n < size; ++n) s += data[n] * o.data[n];
    return s;
  }
};

using Tensor2 = Tensor<1>;
using Tensor22 = Tensor<2>;
using Tensor222 = Tensor<3>;

inline Tensor2 as_tensor(Point2 p) { return Tensor2{{p.x, p.y}}; }

// -----------------------------------------------------------------------------
// RATIONAL BEZIER CURVES
// -----------------------------------------------------------------------------

// Rational Bezier curve with unnormalized positive weights. Immutable once built.
class RationalBezierCurve {
 public:
  RationalBezierCurve(std::vector<Point2> control_points, std::vector<double> weights,
                      std::uint32_t id = 0)
      : points_(std::move(control_points)), weights_(std::move(weights)), id_(id) {
    if (points_.size() < 2) throw std::invalid_argument("a curve needs at least two control points");
    if (weights_.size() != points_.size())
      throw std::invalid_argument("weights and control points differ in length");
    for (double w : weights_)
      if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("curve weights must be positive");
    for (Point2 p : points_)
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw std::invalid_argument("control points must be finite");
  }

  // Polynomial curve (unit weights).
  RationalBezierCurve(std::vector<Point2> control_points, std::uint32_t id = 0)
      : RationalBezierCurve(control_points, std::vector<double>(control_points.size(), 1.0), id) {}

  static RationalBezierCurve segment(Point2 a, Point2 b, std::uint32_t id = 0) {
    return RationalBezierCurve({a, b}, {1.0, 1.0}, id);
  }

  std::size_t degree() const { return points_.size() - 1; }
  std::span<const Point2> control_points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  Point2 front() const { return points_.front(); }
  Point2 back() const { return points_.back(); }
  std::uint32_t id() const { return id_; }
  bool is_rational() const {
    return std::any_of(weights_.begin(), weights_.end(), [&](double w) { return w != weights_.front(); });
  }

  RationalBezierCurve with_id(std::uint32_t id) const {
    RationalBezierCurve c = *this;
    c.id_ = id;
    return c;
  }

  RationalBezierCurve reversed() const {
    return RationalBezierCurve(std::vector<Point2>(points_.rbegin(), points_.rend()),
                               std::vector<double>(weights_.rbegin(), weights_.rend()), id_);
  }

  friend bool operator==(const RationalBezierCurve&, const RationalBezierCurve&) = default;

 private:
  std::vector<Point2> points_;
  std::vector<double> weights_;
  std::uint32_t id_;
};

namespace detail {

struct Homogeneous {
  double wx, wy, w;
};

inline Homogeneous lerp(const Homogeneous& a, const Homogeneous& b, double t) {
  const double s = 1.0 - t;
  return {s * a.wx + t * b.wx, s * a.wy + t * b.wy, s * a.w + t * b.w};
}

inline Point2 project(const Homogeneous& h) { return {h.wx / h.w, h.wy / h.w}; }

}  // namespace detail

inline Point2 evaluate(const RationalBezierCurve& curve, double t) {
  if (t <= 0.0) return curve.front();
  if (t >= 1.0) return curve.back();
  const auto pts = curve.control_points();
  const auto ws = curve.weights();
  const std::size_t n = pts.size();
  std::array<detail::Homogeneous, 8> small{};
  std::vector<detail::Homogeneous> large;
  detail::Homogeneous* h = small.data();
  if (n > small.size()) {
    large.resize(n);
    h = large.data();
  }
  for (std::size_t i = 0; i < n; ++i) h[i] = {pts[i].x * ws[i], pts[i].y * ws[i], ws[i]};
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i) h[i] = detail::lerp(h[i], h[i + 1], t);
  return detail::project(h[0]);
}

// Splits a curve at parameter t with homogeneous de Casteljau, so rational pieces are exact.
// The shared split point is bitwise identical in both halves, and the outer endpoints are
// copied from the input.
inline std::pair<RationalBezierCurve, RationalBezierCurve> subdivide(const RationalBezierCurve& curve,
                                                                     double t) {
  const auto pts = curve.control_points();
  const auto ws = curve.weights();
  const std::size_t n = pts.size();
  std::vector<detail::Homogeneous> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = {pts[i].x * ws[i], pts[i].y * ws[i], ws[i]};

  std::vector<Point2> lp(n), rp(n);
  std::vector<double> lw(n), rw(n);
  auto store = [](std::vector<Point2>& p, std::vector<double>& w, std::size_t at,
                  const detail::Homogeneous& v) {
    p[at] = detail::project(v);
    w[at] = v.w;
  };
  store(lp, lw, 0, h[0]);
  store(rp, rw, n - 1, h[n - 1]);
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) h[i] = detail::lerp(h[i], h[i + 1], t);
    store(lp, lw, level, h[0]);
    store(rp, rw, n - 1 - level, h[n - 1 - level]);
  }
  lp.front() = curve.front();
  rp.back() = curve.back();
  rp.front() = lp.back();
  rw.front() = lw.back();
  return {RationalBezierCurve(std::move(lp), std::move(lw), curve.id()),
          RationalBezierCurve(std::move(rp), std::move(rw), curve.id())};
}

// Control-point box; contains the whole curve because all weights are positive.
inline Aabb aabb(const RationalBezierCurve& curve) {
  Aabb box;
  for (Point2 p : curve.control_points()) box.expand(p);
  return box;
}

}  // namespace curvewind
