#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "curvewind/bvh.hpp"
#include "curvewind/direct.hpp"
#include "curvewind/geometry.hpp"
#include "curvewind/parallel.hpp"
#include "curvewind/shape.hpp"
#include "curvewind/subdivision.hpp"
#include "curvewind/taylor.hpp"

namespace curvewind {

struct QueryConfig {
  // Far-field factor; std::numeric_limits<double>::infinity() disables approximation.
  double beta = 2.0;
  ExpansionOrder order = ExpansionOrder::Two;
  DirectConfig direct;
  // Smallest centroid-to-query distance at which the expansion may be evaluated.
  double singular_epsilon = 0.0;
  unsigned threads = 0;  // 0 = hardware concurrency

  // Tolerances scaled to a shape of the given diagonal.
  static QueryConfig for_diagonal(double diagonal) {
    QueryConfig cfg;
    cfg.direct = DirectConfig::for_diagonal(diagonal);
    cfg.singular_epsilon = 1e-12 * diagonal;
    return cfg;
  }

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (direct.max_depth < 1) throw std::invalid_argument("direct max depth must be at least 1");
    if (!(direct.edge_tolerance >= 0.0)) throw std::invalid_argument("edge tolerance must be non-negative");
  }
};

struct QueryStats {
  std::uint32_t leaves_visited = 0;
  std::uint32_t approximations_used = 0;
  bool on_boundary = false;
};

struct FieldResult {
  std::vector<double> values;
  std::vector<QueryStats> stats;
  double preprocessing_seconds = 0.0;
  double query_seconds = 0.0;

  double mean_leaves_visited() const {
    if (stats.empty()) return 0.0;
    double s = 0.0;
    for (const auto& st : stats) s += st.leaves_visited;
    return s / static_cast<double>(stats.size());
  }
  double mean_approximations() const {
    if (stats.empty()) return 0.0;
    double s = 0.0;
    for (const auto& st : stats) s += st.approximations_used;
    return s / static_cast<double>(stats.size());
  }
};

// Which nodes a single query summed, for checking the partition of curves.
struct TraversalTrace {
  std::vector<std::int32_t> direct_leaves;
  std::vector<std::int32_t> approximated_nodes;
};

struct Containment {
  bool inside = false;
  double confidence = 0.0;  // distance of the fractional part from 1/2
};

// Rounds to the nearest integer with halves away from zero; nonzero means inside.
inline Containment containment(double w) {
  const double rounded = std::round(w);
  const double fractional = w - std::floor(w);
  return {rounded != 0.0, std::abs(fractional - 0.5)};
}

inline double fractional_part(double w) { return w - std::floor(w); }

namespace detail {

inline double leaf_winding(Point2 q, const CurveRecord& record, const RationalBezierCurve& curve,
                           const DirectConfig& cfg, SubdivisionCache& cache, bool& on_boundary) {
  if (!record.box.inflated(cfg.edge_tolerance).contains(q))
    return segment_winding(q, record.first, record.last);
  DirectStats st;
  const double w = cfg.cache_enabled ? cache.winding(q, curve, cfg, &st) : curve_winding(q, curve, cfg, &st);
  on_boundary = on_boundary || st.on_boundary;
  return w;
}

}  // namespace detail

// Winding number at one query point by hierarchical traversal.
inline double evaluate_point(const Bvh& bvh, Point2 q, const QueryConfig& cfg, SubdivisionCache& cache,
                             QueryStats& stats, TraversalTrace* trace = nullptr) {
  double w = 0.0;
  std::array<std::int32_t, 128> stack;
  std::size_t top = 0;
  stack[top++] = Bvh::root;
  while (top > 0) {
    const std::int32_t index = stack[--top];
    const BvhNode& node = bvh.node(index);
    if (node.is_leaf()) {
      const auto c = static_cast<std::size_t>(node.curve);
      w += detail::leaf_winding(q, bvh.records[c], bvh.curves[c], cfg.direct, cache, stats.on_boundary);
      ++stats.leaves_visited;
      if (trace) trace->direct_leaves.push_back(index);
    } else if (is_far(node, q, cfg.beta)) {
      w += approx_winding(node.moments, q, cfg.order, cfg.singular_epsilon);
      ++stats.approximations_used;
      if (trace) trace->approximated_nodes.push_back(index);
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return w;
}

inline FieldResult evaluate_batch(const Bvh& bvh, std::span<const Point2> queries, const QueryConfig& cfg) {
  cfg.validate();
  FieldResult result;
  result.values.assign(queries.size(), 0.0);
  result.stats.assign(queries.size(), QueryStats{});
  const auto start = std::chrono::steady_clock::now();
  std::vector<SubdivisionCache> caches(resolve_threads(cfg.threads));
  parallel_chunks(queries.size(), cfg.threads, 256, [&](unsigned worker, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      result.values[i] = evaluate_point(bvh, queries[i], cfg, caches[worker], result.stats[i]);
  });
  result.query_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// Baseline: every curve of the shape evaluated exactly at every query.
inline FieldResult evaluate_direct(const Shape2D& shape, std::span<const Point2> queries, const QueryConfig& cfg) {
  cfg.validate();
  FieldResult result;
  result.values.assign(queries.size(), 0.0);
  result.stats.assign(queries.size(), QueryStats{});
  const auto start = std::chrono::steady_clock::now();
  std::vector<CurveRecord> records;
  records.reserve(shape.size());
  for (const auto& c : shape.curves) records.push_back(CurveRecord{aabb(c), c.front(), c.back()});
  std::vector<SubdivisionCache> caches(resolve_threads(cfg.threads));
  parallel_chunks(queries.size(), cfg.threads, 256, [&](unsigned worker, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double w = 0.0;
      QueryStats& st = result.stats[i];
      for (std::size_t c = 0; c < shape.size(); ++c)
        w += detail::leaf_winding(queries[i], records[c], shape.curves[c], cfg.direct, caches[worker],
                                  st.on_boundary);
      st.leaves_visited = static_cast<std::uint32_t>(shape.size());
      result.values[i] = w;
    }
  });
  result.query_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// Subdivided shape plus its hierarchy, with preprocessing timings.
struct PreparedShape {
  Shape2D shape;
  SubdivisionStats subdivision;
  Bvh bvh;
  double subdivide_seconds = 0.0;
  double build_seconds = 0.0;

  double preprocessing_seconds() const { return subdivide_seconds + build_seconds; }
};

inline PreparedShape prepare(const Shape2D& input, const SubdivisionConfig& subdivision = {},
                             const BvhOptions& options = {}) {
  PreparedShape out;
  auto t0 = std::chrono::steady_clock::now();
  out.shape = adaptive_subdivide(input, subdivision, &out.subdivision);
  auto t1 = std::chrono::steady_clock::now();
  out.bvh = build_bvh(out.shape, options);
  auto t2 = std::chrono::steady_clock::now();
  out.subdivide_seconds = std::chrono::duration<double>(t1 - t0).count();
  out.build_seconds = std::chrono::duration<double>(t2 - t1).count();
  return out;
}

struct Disagreement {
  std::size_t index = 0;
  Point2 point;
  double truth = 0.0;
  double approx = 0.0;
  double fractional = 0.0;  // fractional part of the ground truth
};

struct ErrorReport {
  FieldResult direct;
  FieldResult approx;
  std::vector<double> abs_error;
  double linf = 0.0;
  double l2 = 0.0;  // root mean square over the queries
  double median = 0.0;
  std::vector<Disagreement> disagreements;
};

inline ErrorReport summarize_errors(std::span<const Point2> queries, FieldResult direct, FieldResult approx) {
  if (direct.values.size() != approx.values.size() || direct.values.size() != queries.size())
    throw std::invalid_argument("field sizes differ");
  ErrorReport report;
  report.abs_error.resize(queries.size());
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const double truth = direct.values[i];
    const double approx_w = approx.values[i];
    const double e = std::abs(approx_w - truth);
    report.abs_error[i] = e;
    report.linf = std::max(report.linf, e);
    sum_sq += e * e;
    if (std::round(truth) != std::round(approx_w))
      report.disagreements.push_back({i, queries[i], truth, approx_w, fractional_part(truth)});
  }
  if (!queries.empty()) {
    report.l2 = std::sqrt(sum_sq / static_cast<double>(queries.size()));
    std::vector<double> sorted = report.abs_error;
    const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    report.median = *mid;
  }
  report.direct = std::move(direct);
  report.approx = std::move(approx);
  return report;
}

// Hierarchical result against the all-curve direct evaluation of `shape`.
inline ErrorReport compare_to_direct(const Bvh& bvh, const Shape2D& shape, std::span<const Point2> queries,
                                     const QueryConfig& cfg) {
  FieldResult direct = evaluate_direct(shape, queries, cfg);
  FieldResult approx = evaluate_batch(bvh, queries, cfg);
  return summarize_errors(queries, std::move(direct), std::move(approx));
}

}  // namespace curvewind
