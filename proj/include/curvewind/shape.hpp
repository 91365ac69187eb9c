#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "curvewind/geometry.hpp"

namespace curvewind {

// A flat collection of boundary curves. Curve ids are unique within a shape.
struct Shape2D {
  std::vector<RationalBezierCurve> curves;
  Aabb global_aabb;
  std::string source_name;
  // source_ids[i] is the id of the input curve that curves[i] was cut from.
  std::vector<std::uint32_t> source_ids;

  static Shape2D from_curves(std::vector<RationalBezierCurve> curves, std::string name = {}) {
    Shape2D shape;
    shape.curves = std::move(curves);
    shape.source_name = std::move(name);
    std::unordered_set<std::uint32_t> seen;
    shape.source_ids.reserve(shape.curves.size());
    for (const auto& c : shape.curves) {
      if (!seen.insert(c.id()).second)
        throw std::invalid_argument("duplicate curve id " + std::to_string(c.id()));
      shape.global_aabb.expand(aabb(c));
      shape.source_ids.push_back(c.id());
    }
    return shape;
  }

  // Renumbers curves 0..n-1 in order; useful when concatenating generated pieces.
  static Shape2D renumbered(std::vector<RationalBezierCurve> curves, std::string name = {}) {
    for (std::size_t i = 0; i < curves.size(); ++i)
      curves[i] = curves[i].with_id(static_cast<std::uint32_t>(i));
    return from_curves(std::move(curves), std::move(name));
  }

  std::size_t size() const { return curves.size(); }
  bool empty() const { return curves.empty(); }
  double diagonal() const { return global_aabb.diagonal(); }
};

// nx * ny cell-centred points covering `box`, row-major (x varies fastest).
inline std::vector<Point2> cell_centers(const Aabb& box, std::size_t nx, std::size_t ny) {
  std::vector<Point2> pts;
  if (nx == 0 || ny == 0) return pts;
  pts.reserve(nx * ny);
  const Point2 ext = box.extent();
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      pts.push_back({box.min.x + (static_cast<double>(i) + 0.5) * ext.x / static_cast<double>(nx),
                     box.min.y + (static_cast<double>(j) + 0.5) * ext.y / static_cast<double>(ny)});
  return pts;
}

}  // namespace curvewind
