#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "curvewind/geometry.hpp"
#include "curvewind/shape.hpp"

namespace curvewind {

struct SubdivisionConfig {
  double max_diag_fraction = 0.10;
  int max_depth = 20;

  void validate() const {
    if (!(max_diag_fraction > 0.0 && max_diag_fraction <= 1.0))
      throw std::invalid_argument("subdivision fraction must lie in (0, 1]");
    if (max_depth < 0) throw std::invalid_argument("subdivision depth must be non-negative");
  }
};

struct SubdivisionStats {
  std::size_t input_curves = 0;
  std::size_t output_curves = 0;
  std::size_t depth_cap_hits = 0;
  int deepest = 0;
};

namespace detail {

inline void bisect_until(const RationalBezierCurve& curve, double threshold, int depth, int max_depth,
                         std::uint32_t source, std::vector<RationalBezierCurve>& out,
                         std::vector<std::uint32_t>& sources, SubdivisionStats& stats) {
  if (aabb(curve).diagonal() <= threshold) {
    out.push_back(curve);
    sources.push_back(source);
    stats.deepest = std::max(stats.deepest, depth);
    return;
  }
  if (depth >= max_depth) {
    ++stats.depth_cap_hits;
    out.push_back(curve);
    sources.push_back(source);
    stats.deepest = std::max(stats.deepest, depth);
    return;
  }
  auto [left, right] = subdivide(curve, 0.5);
  bisect_until(left, threshold, depth + 1, max_depth, source, out, sources, stats);
  bisect_until(right, threshold, depth + 1, max_depth, source, out, sources, stats);
}

}  // namespace detail

// Bisects every curve until its box diagonal is at most max_diag_fraction of the input
// shape's diagonal. Output order follows input order and parameter order; output ids
// are fresh (0..n-1) and source_ids map them back to the input ids.
inline Shape2D adaptive_subdivide(const Shape2D& shape, const SubdivisionConfig& cfg,
                                  SubdivisionStats* stats_out = nullptr) {
  cfg.validate();
  SubdivisionStats stats;
  stats.input_curves = shape.size();
  const double global = shape.diagonal();
  if (!(global > 0.0)) {
    stats.output_curves = shape.size();
    if (stats_out) *stats_out = stats;
    return shape;
  }
  const double threshold = cfg.max_diag_fraction * global;

  std::vector<RationalBezierCurve> out;
  std::vector<std::uint32_t> sources;
  out.reserve(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const std::uint32_t source = shape.source_ids.empty() ? shape.curves[i].id() : shape.source_ids[i];
    detail::bisect_until(shape.curves[i], threshold, 0, cfg.max_depth, source, out, sources, stats);
  }

  Shape2D result = Shape2D::renumbered(std::move(out), shape.source_name);
  result.source_ids = std::move(sources);
  stats.output_curves = result.size();
  if (stats_out) *stats_out = stats;
  return result;
}

}  // namespace curvewind
