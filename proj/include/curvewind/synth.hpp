#pragma once

// Seeded generators for the constructed shapes used by experiments and tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "curvewind/geometry.hpp"
#include "curvewind/shape.hpp"

namespace curvewind::synth {

using Curves = std::vector<RationalBezierCurve>;
using Rng = std::mt19937_64;

constexpr double pi = std::numbers::pi;

inline void append(Curves& to, const Curves& from) { to.insert(to.end(), from.begin(), from.end()); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Circular arc as rational quadratics of at most a quarter turn each, counter-clockwise
// for positive sweep. `exact_end` overrides the computed final point (for closing loops).
inline Curves arc(Point2 center, double radius, double start, double sweep,
                  std::optional<Point2> exact_end = std::nullopt) {
  Curves out;
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / (0.5 * pi) - 1e-9)));
  const double step = sweep / pieces;
  const double w = std::cos(0.5 * step);
  auto at = [&](double a) { return center + radius * Point2{std::cos(a), std::sin(a)}; };
  Point2 from = at(start);
  for (int i = 0; i < pieces; ++i) {
    const double a0 = start + i * step;
    const double am = a0 + 0.5 * step;
    const Point2 to = (i + 1 == pieces && exact_end) ? *exact_end : at(a0 + step);
    const Point2 control = center + (radius / w) * Point2{std::cos(am), std::sin(am)};
    out.emplace_back(std::vector<Point2>{from, control, to}, std::vector<double>{1.0, w, 1.0});
    from = to;
  }
  return out;
}

inline Curves circle(Point2 center, double radius, bool ccw = true) {
  const Point2 start = center + Point2{radius, 0.0};
  return arc(center, radius, 0.0, ccw ? 2.0 * pi : -2.0 * pi, start);
}

inline Curves polyline(const std::vector<Point2>& pts, bool closed) {
  Curves out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) out.push_back(RationalBezierCurve::segment(pts[i], pts[i + 1]));
  if (closed && pts.size() > 2) out.push_back(RationalBezierCurve::segment(pts.back(), pts.front()));
  return out;
}

inline std::vector<Point2> regular_polygon_points(Point2 center, double radius, int sides, double rotation) {
  std::vector<Point2> pts;
  for (int i = 0; i < sides; ++i) {
    const double a = rotation + 2.0 * pi * i / sides;
    pts.push_back(center + radius * Point2{std::cos(a), std::sin(a)});
  }
  return pts;
}

inline Curves regular_polygon(Point2 center, double radius, int sides, double rotation = 0.0, bool ccw = true) {
  auto pts = regular_polygon_points(center, radius, sides, rotation);
  if (!ccw) std::reverse(pts.begin(), pts.end());
  return polyline(pts, true);
}

inline Curves star(Point2 center, double outer, double inner, int points, double rotation = 0.0) {
  std::vector<Point2> pts;
  for (int i = 0; i < 2 * points; ++i) {
    const double a = rotation + pi * i / points;
    pts.push_back(center + (i % 2 == 0 ? outer : inner) * Point2{std::cos(a), std::sin(a)});
  }
  return polyline(pts, true);
}

// Closed cubic loop through r(a) = radius (1 + amplitude cos(lobes a)), one cubic per
// `pieces`-th of a turn, built from Hermite data so the loop is exactly closed.
inline Curves flower(Point2 center, double radius, int lobes, double amplitude, int pieces) {
  auto pos = [&](double a) {
    const double r = radius * (1.0 + amplitude * std::cos(lobes * a));
    return center + r * Point2{std::cos(a), std::sin(a)};
  };
  auto vel = [&](double a) {
    const double r = radius * (1.0 + amplitude * std::cos(lobes * a));
    const double dr = -radius * amplitude * lobes * std::sin(lobes * a);
    return Point2{dr * std::cos(a) - r * std::sin(a), dr * std::sin(a) + r * std::cos(a)};
  };
  Curves out;
  const double h = 2.0 * pi / pieces;
  const Point2 first = pos(0.0);
  Point2 from = first;
  for (int i = 0; i < pieces; ++i) {
    const double a0 = i * h, a1 = (i + 1) * h;
    const Point2 to = i + 1 == pieces ? first : pos(a1);
    out.emplace_back(std::vector<Point2>{from, from + (h / 3.0) * vel(a0), to - (h / 3.0) * vel(a1), to});
    from = to;
  }
  return out;
}

// Rectangle with quarter-circle corners, counter-clockwise.
inline Curves rounded_rectangle(Point2 lo, Point2 hi, double corner) {
  Curves out;
  const Point2 c00 = lo + Point2{corner, corner};
  const Point2 c10{hi.x - corner, lo.y + corner};
  const Point2 c11 = hi - Point2{corner, corner};
  const Point2 c01{lo.x + corner, hi.y - corner};
  const Point2 bottom_start{lo.x + corner, lo.y};
  out.push_back(RationalBezierCurve::segment(bottom_start, {hi.x - corner, lo.y}));
  append(out, arc(c10, corner, -0.5 * pi, 0.5 * pi, Point2{hi.x, lo.y + corner}));
  out.push_back(RationalBezierCurve::segment({hi.x, lo.y + corner}, {hi.x, hi.y - corner}));
  append(out, arc(c11, corner, 0.0, 0.5 * pi, Point2{hi.x - corner, hi.y}));
  out.push_back(RationalBezierCurve::segment({hi.x - corner, hi.y}, {lo.x + corner, hi.y}));
  append(out, arc(c01, corner, 0.5 * pi, 0.5 * pi, Point2{lo.x, hi.y - corner}));
  out.push_back(RationalBezierCurve::segment({lo.x, hi.y - corner}, {lo.x, lo.y + corner}));
  append(out, arc(c00, corner, pi, 0.5 * pi, bottom_start));
  return out;
}

// Random rational Bezier curve of degree 1..max_degree inside [-1, 1]^2.
inline RationalBezierCurve random_curve(Rng& rng, int max_degree = 4, std::uint32_t id = 0) {
  const int degree = std::uniform_int_distribution<int>(1, max_degree)(rng);
  std::vector<Point2> pts;
  std::vector<double> ws;
  for (int i = 0; i <= degree; ++i) {
    pts.push_back({uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)});
    ws.push_back(i == 0 || i == degree ? 1.0 : uniform(rng, 0.5, 2.0));
  }
  return RationalBezierCurve(std::move(pts), std::move(ws), id);
}

// The named watertight / open / nested test shapes.
struct NamedShape {
  std::string name;
  Shape2D shape;
  bool watertight = true;
};

inline std::vector<NamedShape> constructed_shapes() {
  std::vector<NamedShape> out;
  auto add = [&](std::string name, Curves c, bool watertight) {
    out.push_back({name, Shape2D::renumbered(std::move(c), name), watertight});
  };
  add("circle", circle({0.0, 0.0}, 1.0), true);
  add("square", polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true), true);
  {
    Curves c = circle({0, 0}, 1.0);
    append(c, circle({0.1, 0.05}, 0.45, false));
    add("annulus", std::move(c), true);
  }
  add("flower", flower({0.0, 0.0}, 1.0, 5, 0.3, 20), true);
  {
    Curves c = polyline({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, true);
    append(c, circle({0.2, 0.1}, 0.5));
    add("nested", std::move(c), true);
  }
  add("star", star({0, 0}, 1.0, 0.45, 15, 0.1), true);
  add("rounded-rectangle", rounded_rectangle({-1.0, -0.6}, {1.0, 0.6}, 0.3), true);
  {
    Curves c = circle({-0.35, 0.0}, 0.6);
    append(c, circle({0.35, 0.1}, 0.6));
    add("overlapping-circles", std::move(c), true);
  }
  add("open-arc", arc({0, 0}, 1.0, 0.2, 1.4 * pi), false);
  {
    Rng rng(7);
    Curves c;
    for (int i = 0; i < 12; ++i) c.push_back(random_curve(rng, 3));
    add("open-curves", std::move(c), false);
  }
  return out;
}

// k closed, nearly coincident 15-gons.
inline Shape2D stacked_polygons(int k, std::uint64_t seed) {
  Rng rng(seed);
  Curves c;
  for (int i = 0; i < k; ++i) {
    const Point2 center{uniform(rng, -0.02, 0.02), uniform(rng, -0.02, 0.02)};
    append(c, regular_polygon(center, 1.0 + uniform(rng, -0.02, 0.02), 15, uniform(rng, -0.05, 0.05)));
  }
  return Shape2D::renumbered(std::move(c), "stacked-" + std::to_string(k) + "-gons");
}

// N short circular arcs scattered over the unit square. Arc radii shrink like
// N^(-1/2) so the covered fraction of the square stays roughly constant.
inline Shape2D random_arcs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Curves c;
  c.reserve(n);
  const double r = 0.5 / std::sqrt(static_cast<double>(n));
  while (c.size() < n) {
    const Point2 center{uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
    const double radius = r * uniform(rng, 0.5, 1.5);
    const double sweep = uniform(rng, 0.2 * pi, 0.5 * pi) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    append(c, arc(center, radius, uniform(rng, 0.0, 2.0 * pi), sweep));
  }
  return Shape2D::renumbered(std::move(c), "random-arcs-" + std::to_string(n));
}

// A random closed loop (cubic flower or circle/polygon mix) with 1-3 pieces removed.
inline Shape2D opened_loop(std::uint64_t seed) {
  Rng rng(seed);
  Curves loop;
  const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
  if (kind == 0) {
    loop = flower({0, 0}, 1.0, std::uniform_int_distribution<int>(2, 7)(rng), uniform(rng, 0.1, 0.4),
                  std::uniform_int_distribution<int>(10, 24)(rng));
  } else if (kind == 1) {
    loop = arc({0, 0}, 1.0, uniform(rng, 0.0, 2.0 * pi), 2.0 * pi);
    Curves refined;
    for (const auto& c : loop) {
      auto [a, b] = subdivide(c, 0.5);
      refined.push_back(a);
      refined.push_back(b);
    }
    loop = refined;
  } else {
    loop = star({0, 0}, 1.0, uniform(rng, 0.4, 0.8), std::uniform_int_distribution<int>(5, 12)(rng),
                uniform(rng, 0.0, pi));
  }
  const int removals = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int i = 0; i < removals && loop.size() > 2; ++i) {
    const auto at = std::uniform_int_distribution<std::size_t>(0, loop.size() - 1)(rng);
    loop.erase(loop.begin() + static_cast<std::ptrdiff_t>(at));
  }
  return Shape2D::renumbered(std::move(loop), "opened-loop-" + std::to_string(seed));
}

}  // namespace curvewind::synth
