#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "curvewind/errors.hpp"
#include "curvewind/geometry.hpp"
#include "curvewind/moments.hpp"
#include "curvewind/shape.hpp"

namespace curvewind {

struct BvhNode {
  Aabb box;
  Point2 centroid;
  double radius = 0.0;
  MomentSet moments;  // centered at `centroid`
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t curve = -1;  // index into Bvh::curves for leaves
  int depth = 0;

  bool is_leaf() const { return curve >= 0; }
};

// Per-curve data the query loop touches before it needs the control points.
struct CurveRecord {
  Aabb box;
  Point2 first;
  Point2 last;
};

struct BvhOptions {
  // When > 0, every stored moment entry is rounded to this many significant digits.
  int truncate_digits = 0;
};

// Binary hierarchy over a shape's curves. Nodes are stored in depth-first order with
// the root at index 0; the tree owns a copy of the curves it indexes.
class Bvh {
 public:
  std::vector<BvhNode> nodes;
  std::vector<RationalBezierCurve> curves;
  std::vector<CurveRecord> records;
  std::size_t leaf_count = 0;
  int max_depth_reached = 0;
  std::size_t centroid_fallbacks = 0;

  static constexpr std::int32_t root = 0;

  const BvhNode& node(std::int32_t i) const { return nodes[static_cast<std::size_t>(i)]; }
};

inline bool is_far(const BvhNode& node, Point2 q, double beta) {
  const double reach = beta * node.radius;
  return squared_norm(q - node.centroid) > reach * reach;
}

namespace detail {

inline double round_significant(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
  return std::round(v * scale) / scale;
}

template <std::size_t R>
void round_tensor(Tensor<R>& t, int digits) {
  for (double& v : t.data) v = round_significant(v, digits);
}

class BvhBuilder {
 public:
  BvhBuilder(const Shape2D& shape, Bvh& bvh) : shape_(shape), bvh_(bvh) {
    centers_.reserve(shape.size());
    for (const auto& c : shape.curves) {
      const Aabb box = aabb(c);
      centers_.push_back(box.center());
      bvh_.records.push_back(CurveRecord{box, c.front(), c.back()});
    }
  }

  std::int32_t build(std::span<std::uint32_t> items, int depth) {
    const auto index = static_cast<std::int32_t>(bvh_.nodes.size());
    bvh_.nodes.emplace_back();
    bvh_.max_depth_reached = std::max(bvh_.max_depth_reached, depth);
    if (items.size() == 1) {
      BvhNode& leaf = bvh_.nodes.back();
      leaf.curve = static_cast<std::int32_t>(items[0]);
      leaf.box = bvh_.records[items[0]].box;
      leaf.moments = curve_moments(shape_.curves[items[0]]);
      leaf.depth = depth;
      ++bvh_.leaf_count;
      return index;
    }

    Aabb spread;
    for (auto i : items) spread.expand(centers_[i]);
    const Point2 ext = spread.extent();
    const std::size_t axis = ext.y > ext.x ? 1 : 0;
    const auto mid = items.begin() + static_cast<std::ptrdiff_t>(items.size() / 2);
    std::nth_element(items.begin(), mid, items.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double ca = centers_[a][axis];
      const double cb = centers_[b][axis];
      return ca < cb || (ca == cb && a < b);
    });
    const std::size_t split = items.size() / 2;
    const std::int32_t left = build(items.first(split), depth + 1);
    const std::int32_t right = build(items.subspan(split), depth + 1);

    BvhNode& node = bvh_.nodes[static_cast<std::size_t>(index)];
    node.left = left;
    node.right = right;
    node.depth = depth;
    node.box = bvh_.node(left).box;
    node.box.expand(bvh_.node(right).box);
    // Children still hold uncentered sums at this point.
    node.moments = bvh_.node(left).moments;
    node.moments += bvh_.node(right).moments;
    return index;
  }

 private:
  const Shape2D& shape_;
  Bvh& bvh_;
  std::vector<Point2> centers_;
};

}  // namespace detail

// Median-split hierarchy: leaves hold single curves, internal nodes accumulate the
// uncentered moments of their subtree, and every node is then centered about its
// chord-length centroid.
inline Bvh build_bvh(const Shape2D& shape, const BvhOptions& options = {}) {
  if (shape.empty()) throw EmptyShape();
  Bvh bvh;
  bvh.curves = shape.curves;
  bvh.nodes.reserve(2 * shape.size() - 1);
  std::vector<std::uint32_t> items(shape.size());
  std::iota(items.begin(), items.end(), 0u);
  detail::BvhBuilder builder(shape, bvh);
  builder.build(items, 0);

  for (BvhNode& node : bvh.nodes) {
    const bool measurable = node.moments.weight_length > 0.0;
    node.centroid = measurable ? centroid(node.moments) : node.box.center();
    node.radius = 0.5 * node.box.diagonal();
    if (!node.box.contains(node.centroid)) {
      ++bvh.centroid_fallbacks;
      double far = 0.0;
      for (Point2 corner : {node.box.min, node.box.max, Point2{node.box.min.x, node.box.max.y},
                            Point2{node.box.max.x, node.box.min.y}})
        far = std::max(far, distance(corner, node.centroid));
      node.radius = far;
    }
    if (measurable) {
      node.moments = center_moments(node.moments, node.centroid);
    } else {
      node.moments = MomentSet{};
      node.moments.centered_about = node.centroid;
    }
    if (options.truncate_digits > 0) {
      detail::round_tensor(node.moments.m0, options.truncate_digits);
      detail::round_tensor(node.moments.m1, options.truncate_digits);
      detail::round_tensor(node.moments.m2, options.truncate_digits);
    }
  }
  return bvh;
}

}  // namespace curvewind
