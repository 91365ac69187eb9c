#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "curvewind/geometry.hpp"

namespace curvewind {

struct DirectConfig {
  int max_depth = 30;
  // Absolute distance below which a query counts as lying on the curve.
  double edge_tolerance = 0.0;
  bool cache_enabled = true;

  static DirectConfig for_diagonal(double diagonal) {
    DirectConfig cfg;
    cfg.edge_tolerance = 1e-10 * diagonal;
    return cfg;
  }
};

struct DirectStats {
  std::uint64_t chords = 0;
  int deepest = 0;
  bool on_boundary = false;
};

// Signed angle subtended by segment a -> b at q, as a fraction of a full turn.
inline double segment_winding(Point2 q, Point2 a, Point2 b) {
  const Point2 u = a - q;
  const Point2 v = b - q;
  if (a == b || (u.x == 0.0 && u.y == 0.0) || (v.x == 0.0 && v.y == 0.0)) return 0.0;
  const double w = std::atan2(cross(u, v), dot(u, v)) * (0.5 * std::numbers::inv_pi);
  return w == -0.5 ? 0.5 : w;
}

namespace detail {

inline double distance_to_segment(Point2 q, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len2 = squared_norm(d);
  const double t = len2 > 0.0 ? std::clamp(dot(q - a, d) / len2, 0.0, 1.0) : 0.0;
  return distance(q, a + t * d);
}

}  // namespace detail

// Memoized binary subdivision trees of curves, one per curve id. A cache belongs to
// one worker and one set of curves (ids must identify curves uniquely).
class SubdivisionCache {
 public:
  explicit SubdivisionCache(std::size_t max_pieces = std::size_t{1} << 21) : max_pieces_(max_pieces) {}

  double winding(Point2 q, const RationalBezierCurve& curve, const DirectConfig& cfg,
                 DirectStats* stats = nullptr) {
    if (pieces_.size() >= max_pieces_) clear();
    auto [it, inserted] = roots_.try_emplace(curve.id(), static_cast<std::int32_t>(pieces_.size()));
    if (inserted) pieces_.push_back(Piece{curve, aabb(curve), -1});
    return recurse(q, it->second, 0, cfg, stats);
  }

  void clear() {
    roots_.clear();
    pieces_.clear();
  }

  std::size_t pieces() const { return pieces_.size(); }

 private:
  struct Piece {
    RationalBezierCurve curve;
    Aabb box;
    std::int32_t children;  // index of the left half; right half follows it
  };

  double recurse(Point2 q, std::int32_t index, int depth, const DirectConfig& cfg, DirectStats* stats) {
    const Piece& piece = pieces_[static_cast<std::size_t>(index)];
    const Point2 a = piece.curve.front();
    const Point2 b = piece.curve.back();
    const double tol = cfg.edge_tolerance;
    if (stats) {
      ++stats->chords;
      stats->deepest = std::max(stats->deepest, depth);
    }
    if (!piece.box.inflated(tol).contains(q)) return segment_winding(q, a, b);
    if (piece.curve.degree() == 1) {
      if (stats && detail::distance_to_segment(q, a, b) <= tol) stats->on_boundary = true;
      return segment_winding(q, a, b);
    }
    if (depth >= cfg.max_depth || piece.box.diagonal() <= tol) {
      if (stats) stats->on_boundary = true;
      return segment_winding(q, a, b);
    }
    std::int32_t child = piece.children;
    if (child < 0) {
      auto halves = subdivide(piece.curve, 0.5);
      child = static_cast<std::int32_t>(pieces_.size());
      // `piece` may dangle after these pushes.
      pieces_[static_cast<std::size_t>(index)].children = child;
      const Aabb lbox = aabb(halves.first);
      const Aabb rbox = aabb(halves.second);
      pieces_.push_back(Piece{std::move(halves.first), lbox, -1});
      pieces_.push_back(Piece{std::move(halves.second), rbox, -1});
    }
    const double left = recurse(q, child, depth + 1, cfg, stats);
    return left + recurse(q, child + 1, depth + 1, cfg, stats);
  }

  std::size_t max_pieces_;
  std::unordered_map<std::uint32_t, std::int32_t> roots_;
  std::vector<Piece> pieces_;
};

// Winding number of one curve at q by recursive bisection. Pieces whose box excludes q
// are replaced by their chords, which subtend the same angle.
inline double curve_winding(Point2 q, const RationalBezierCurve& curve, const DirectConfig& cfg,
                            DirectStats* stats = nullptr) {
  SubdivisionCache scratch(std::size_t{1} << 30);
  return scratch.winding(q, curve, cfg, stats);
}

}  // namespace curvewind
