#pragma once

#include <numbers>
#include <optional>
#include <string_view>

#include "curvewind/errors.hpp"
#include "curvewind/geometry.hpp"
#include "curvewind/moments.hpp"

namespace curvewind {

enum class ExpansionOrder : int { Zero = 0, One = 1, Two = 2 };

inline std::optional<ExpansionOrder> parse_order(int value) {
  if (value < 0 || value > 2) return std::nullopt;
  return static_cast<ExpansionOrder>(value);
}

inline int to_int(ExpansionOrder order) { return static_cast<int>(order); }

// Derivatives (with respect to x) of the 2D Laplace Green's function
// G(x; q) = ln|x - q| / (2 pi), evaluated at x0. `epsilon` is the smallest
// separation accepted before SingularEvaluation is raised.

namespace detail {

inline Point2 separation(Point2 x0, Point2 q, double epsilon, double& r2) {
  const Point2 d = x0 - q;
  r2 = squared_norm(d);
  if (!(r2 > epsilon * epsilon) || r2 == 0.0) throw SingularEvaluation(std::sqrt(r2));
  return d;
}

constexpr double inv_two_pi = 0.5 * std::numbers::inv_pi;

}  // namespace detail

inline Tensor2 grad_g(Point2 x0, Point2 q, double epsilon = 0.0) {
  double r2;
  const Point2 d = detail::separation(x0, q, epsilon, r2);
  const double s = detail::inv_two_pi / r2;
  return Tensor2{{s * d.x, s * d.y}};
}

inline Tensor22 grad2_g(Point2 x0, Point2 q, double epsilon = 0.0) {
  double r2;
  const Point2 d = detail::separation(x0, q, epsilon, r2);
  const double s = detail::inv_two_pi / (r2 * r2);
  Tensor22 h;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) h(i, j) = s * ((i == j ? r2 : 0.0) - 2.0 * d[i] * d[j]);
  return h;
}

inline Tensor222 grad3_g(Point2 x0, Point2 q, double epsilon = 0.0) {
  double r2;
  const Point2 d = detail::separation(x0, q, epsilon, r2);
  const double r4 = r2 * r2;
  const double a = -2.0 * detail::inv_two_pi / r4;
  const double b = 8.0 * detail::inv_two_pi / (r4 * r2);
  // The tensor is fully symmetric, so it only depends on how many indices are 0.
  // Computing each distinct entry once keeps the symmetry exact in floating point.
  const double by_x_count[4] = {
      a * 3.0 * d.y + b * d.y * d.y * d.y,  // (1,1,1)
      a * d.x + b * d.x * d.y * d.y,        // one x index
      a * d.y + b * d.x * d.x * d.y,        // two x indices
      a * 3.0 * d.x + b * d.x * d.x * d.x,  // (0,0,0)
  };
  Tensor222 t;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) t(i, j, k) = by_x_count[(i == 0) + (j == 0) + (k == 0)];
  return t;
}

// Truncated far-field expansion of the winding number of the cluster described by `m`
// (centered moments) at query q.
inline double approx_winding(const MomentSet& m, Point2 q, ExpansionOrder order,
                             double epsilon = 0.0) {
  const Point2 x0 = m.centered_about.value_or(Point2{});
  double w = m.m0.contract(grad_g(x0, q, epsilon));
  if (order == ExpansionOrder::Zero) return w;
  w += m.m1.contract(grad2_g(x0, q, epsilon));
  if (order == ExpansionOrder::One) return w;
  return w + 0.5 * m.m2.contract(grad3_g(x0, q, epsilon));
}

}  // namespace curvewind
