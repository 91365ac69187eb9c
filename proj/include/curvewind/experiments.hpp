#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "curvewind/engine.hpp"
#include "curvewind/errors.hpp"
#include "curvewind/synth.hpp"

namespace curvewind {

// Numeric table keyed by the swept parameter. Columns ending in "_seconds" are timings.
struct ExperimentTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> summary;

  double at(std::size_t row, const std::string& column) const {
    const auto it = std::find(columns.begin(), columns.end(), column);
    if (it == columns.end()) throw std::out_of_range("no column " + column);
    return rows.at(row)[static_cast<std::size_t>(it - columns.begin())];
  }

  std::optional<double> summary_value(const std::string& key) const {
    for (const auto& [k, v] : summary)
      if (k == key) return v;
    return std::nullopt;
  }

  void write_csv(std::ostream& os) const {
    os << std::setprecision(17);
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << '\n';
    }
  }
};

struct ExperimentConfig {
  std::size_t nx = 500, ny = 500;
  // Unset values fall back to the experiment's own protocol.
  std::optional<double> beta;
  std::optional<ExpansionOrder> order;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  SubdivisionConfig subdivision;
  // Timings are the minimum over this many runs.
  int repeats = 1;
  // Shape for the single-shape sweeps; defaults to the constructed flower.
  std::optional<Shape2D> input;
  // Curve counts for the scaling study.
  std::vector<std::size_t> scaling_sizes{100, 300, 1000, 3000, 10000};
};

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace detail {

inline Shape2D default_sweep_shape() {
  for (auto& named : synth::constructed_shapes())
    if (named.name == "flower") return std::move(named.shape);
  throw std::logic_error("flower shape missing");
}

inline QueryConfig query_config(const Shape2D& shape, const ExperimentConfig& cfg, double beta, ExpansionOrder order) {
  QueryConfig q = QueryConfig::for_diagonal(shape.diagonal());
  q.beta = beta;
  q.order = order;
  q.threads = cfg.threads;
  return q;
}

inline FieldResult timed_batch(const Bvh& bvh, const std::vector<Point2>& queries, const QueryConfig& q,
                               int repeats) {
  FieldResult best = evaluate_batch(bvh, queries, q);
  for (int r = 1; r < repeats; ++r) {
    FieldResult again = evaluate_batch(bvh, queries, q);
    best.query_seconds = std::min(best.query_seconds, again.query_seconds);
  }
  return best;
}

inline FieldResult timed_direct(const Shape2D& shape, const std::vector<Point2>& queries, const QueryConfig& q,
                                int repeats) {
  FieldResult best = evaluate_direct(shape, queries, q);
  for (int r = 1; r < repeats; ++r) {
    FieldResult again = evaluate_direct(shape, queries, q);
    best.query_seconds = std::min(best.query_seconds, again.query_seconds);
  }
  return best;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

// Fixed beta, orders 0..2.
inline ExperimentTable run_order_sweep(const ExperimentConfig& cfg) {
  const Shape2D input = cfg.input.value_or(detail::default_sweep_shape());
  const PreparedShape prepared = prepare(input, cfg.subdivision);
  const auto queries = cell_centers(input.global_aabb, cfg.nx, cfg.ny);
  const double beta = cfg.beta.value_or(2.0);
  const FieldResult truth =
      evaluate_direct(prepared.shape, queries, detail::query_config(input, cfg, beta, ExpansionOrder::Two));

  ExperimentTable t{"order-sweep",
                    {"order", "beta", "linf", "l2", "median", "disagreements", "mean_leaves_visited",
                     "mean_approximations", "query_seconds"},
                    {},
                    {}};
  for (auto order : {ExpansionOrder::Zero, ExpansionOrder::One, ExpansionOrder::Two}) {
    const auto q = detail::query_config(input, cfg, beta, order);
    FieldResult approx = detail::timed_batch(prepared.bvh, queries, q, cfg.repeats);
    const double leaves = approx.mean_leaves_visited(), approximations = approx.mean_approximations();
    const double seconds = approx.query_seconds;
    const auto r = summarize_errors(queries, truth, std::move(approx));
    t.rows.push_back({static_cast<double>(to_int(order)), beta, r.linf, r.l2, r.median,
                      static_cast<double>(r.disagreements.size()), leaves, approximations, seconds});
  }
  return t;
}

// beta in {1, 2, 4, 8} crossed with orders 0..2 (or the configured order only).
inline ExperimentTable run_beta_sweep(const ExperimentConfig& cfg) {
  const Shape2D input = cfg.input.value_or(detail::default_sweep_shape());
  const PreparedShape prepared = prepare(input, cfg.subdivision);
  const auto queries = cell_centers(input.global_aabb, cfg.nx, cfg.ny);
  const FieldResult truth =
      evaluate_direct(prepared.shape, queries, detail::query_config(input, cfg, 2.0, ExpansionOrder::Two));

  std::vector<ExpansionOrder> orders{ExpansionOrder::Zero, ExpansionOrder::One, ExpansionOrder::Two};
  if (cfg.order) orders = {*cfg.order};
  ExperimentTable t{"beta-sweep",
                    {"order", "beta", "linf", "l2", "median", "disagreements", "mean_leaves_visited",
                     "query_seconds"},
                    {},
                    {}};
  for (auto order : orders) {
    for (double beta : {1.0, 2.0, 4.0, 8.0}) {
      const auto q = detail::query_config(input, cfg, beta, order);
      FieldResult approx = detail::timed_batch(prepared.bvh, queries, q, cfg.repeats);
      const double leaves = approx.mean_leaves_visited(), seconds = approx.query_seconds;
      const auto r = summarize_errors(queries, truth, std::move(approx));
      t.rows.push_back({static_cast<double>(to_int(order)), beta, r.linf, r.l2, r.median,
                        static_cast<double>(r.disagreements.size()), leaves, seconds});
    }
  }
  return t;
}

// Subdivision threshold fraction swept; ground truth is direct on the original shape.
inline ExperimentTable run_subdiv_sweep(const ExperimentConfig& cfg) {
  const Shape2D input = cfg.input.value_or(detail::default_sweep_shape());
  const auto queries = cell_centers(input.global_aabb, cfg.nx, cfg.ny);
  const double beta = cfg.beta.value_or(2.0);
  const ExpansionOrder order = cfg.order.value_or(ExpansionOrder::Two);
  const auto q = detail::query_config(input, cfg, beta, order);
  const FieldResult truth = evaluate_direct(input, queries, q);

  ExperimentTable t{"subdiv-sweep",
                    {"fraction", "curves", "nodes", "max_depth", "mean_leaves_visited", "mean_approximations",
                     "linf", "l2", "disagreements", "preprocessing_seconds", "query_seconds"},
                    {},
                    {}};
  for (double fraction : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const PreparedShape prepared = prepare(input, {fraction, cfg.subdivision.max_depth});
    FieldResult approx = detail::timed_batch(prepared.bvh, queries, q, cfg.repeats);
    const double leaves = approx.mean_leaves_visited(), approximations = approx.mean_approximations();
    const double seconds = approx.query_seconds;
    const auto r = summarize_errors(queries, truth, std::move(approx));
    t.rows.push_back({fraction, static_cast<double>(prepared.shape.size()),
                      static_cast<double>(prepared.bvh.nodes.size()),
                      static_cast<double>(prepared.bvh.max_depth_reached), leaves, approximations, r.linf, r.l2,
                      static_cast<double>(r.disagreements.size()), prepared.preprocessing_seconds(), seconds});
  }
  return t;
}

// k stacked 15-gons. Relative error is L-inf error over max |w| on the grid.
inline ExperimentTable run_overlap(const ExperimentConfig& cfg) {
  const double beta = cfg.beta.value_or(2.0);
  const ExpansionOrder order = cfg.order.value_or(ExpansionOrder::Zero);
  ExperimentTable t{"overlap", {"k", "curves", "linf", "linf_relative", "max_abs_w", "disagreements"}, {}, {}};
  std::vector<double> ks, errors;
  for (int k : {1, 2, 4, 8, 16}) {
    const Shape2D input = synth::stacked_polygons(k, cfg.seed);
    const PreparedShape prepared = prepare(input, cfg.subdivision);
    const auto queries = cell_centers(input.global_aabb, cfg.nx, cfg.ny);
    const auto r = compare_to_direct(prepared.bvh, prepared.shape, queries,
                                     detail::query_config(input, cfg, beta, order));
    const double scale = detail::max_abs(r.direct.values);
    t.rows.push_back({static_cast<double>(k), static_cast<double>(prepared.shape.size()), r.linf,
                      scale > 0.0 ? r.linf / scale : 0.0, scale, static_cast<double>(r.disagreements.size())});
    ks.push_back(k);
    errors.push_back(r.linf);
  }
  t.summary.emplace_back("linf_loglog_slope", loglog_slope(ks, errors));
  t.summary.emplace_back("beta", beta);
  t.summary.emplace_back("order", to_int(order));
  return t;
}

// Histogram of ground-truth fractional parts at rounding disagreements over
// randomly opened loops.
inline ExperimentTable run_disagreement(const ExperimentConfig& cfg, int shapes = 20, int bins = 20) {
  const double beta = cfg.beta.value_or(4.0);
  const ExpansionOrder order = cfg.order.value_or(ExpansionOrder::Two);
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  double total = 0.0, farthest = 0.0, queries_total = 0.0;
  for (int s = 0; s < shapes; ++s) {
    const Shape2D input = synth::opened_loop(cfg.seed + static_cast<std::uint64_t>(s));
    const PreparedShape prepared = prepare(input, cfg.subdivision);
    const auto queries = cell_centers(input.global_aabb, cfg.nx, cfg.ny);
    const auto r = compare_to_direct(prepared.bvh, prepared.shape, queries,
                                     detail::query_config(input, cfg, beta, order));
    queries_total += static_cast<double>(queries.size());
    for (const auto& d : r.disagreements) {
      const auto bin = std::min(static_cast<std::size_t>(d.fractional * bins), counts.size() - 1);
      counts[bin] += 1.0;
      total += 1.0;
      farthest = std::max(farthest, std::abs(d.fractional - 0.5));
    }
  }
  ExperimentTable t{"disagreement", {"bin_low", "bin_high", "count"}, {}, {}};
  for (int b = 0; b < bins; ++b)
    t.rows.push_back({static_cast<double>(b) / bins, static_cast<double>(b + 1) / bins,
                      counts[static_cast<std::size_t>(b)]});
  t.summary.emplace_back("shapes", shapes);
  t.summary.emplace_back("queries", queries_total);
  t.summary.emplace_back("disagreements", total);
  t.summary.emplace_back("max_distance_from_half", farthest);
  t.summary.emplace_back("beta", beta);
  t.summary.emplace_back("order", to_int(order));
  return t;
}

// Query time against curve count for random small arcs, direct and hierarchical.
inline ExperimentTable run_scaling(const ExperimentConfig& cfg) {
  const double beta = cfg.beta.value_or(2.0);
  const ExpansionOrder order = cfg.order.value_or(ExpansionOrder::Two);
  ExperimentTable t{"scaling",
                    {"n", "curves", "max_depth", "mean_leaves_visited", "linf", "preprocessing_seconds",
                     "direct_seconds", "agglomerated_seconds", "speedup"},
                    {},
                    {}};
  std::vector<double> ns, direct_times, tree_times;
  for (std::size_t n : cfg.scaling_sizes) {
    const Shape2D input = synth::random_arcs(n, cfg.seed);
    const PreparedShape prepared = prepare(input, cfg.subdivision);
    const auto queries = cell_centers(input.global_aabb, cfg.nx, cfg.ny);
    const auto q = detail::query_config(input, cfg, beta, order);
    FieldResult direct = detail::timed_direct(prepared.shape, queries, q, cfg.repeats);
    FieldResult approx = detail::timed_batch(prepared.bvh, queries, q, cfg.repeats);
    const double ds = direct.query_seconds, as = approx.query_seconds, leaves = approx.mean_leaves_visited();
    const auto r = summarize_errors(queries, std::move(direct), std::move(approx));
    t.rows.push_back({static_cast<double>(n), static_cast<double>(prepared.shape.size()),
                      static_cast<double>(prepared.bvh.max_depth_reached), leaves, r.linf,
                      prepared.preprocessing_seconds(), ds, as, ds / as});
    ns.push_back(static_cast<double>(n));
    direct_times.push_back(ds);
    tree_times.push_back(as);
  }
  if (ns.size() >= 2) {
    t.summary.emplace_back("direct_loglog_slope", loglog_slope(ns, direct_times));
    t.summary.emplace_back("agglomerated_loglog_slope", loglog_slope(ns, tree_times));
  }
  t.summary.emplace_back("beta", beta);
  t.summary.emplace_back("order", to_int(order));
  return t;
}

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"order-sweep", "beta-sweep", "subdiv-sweep",
                                              "overlap",     "disagreement", "scaling"};
  return names;
}

inline ExperimentTable run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "order-sweep") return run_order_sweep(cfg);
  if (name == "beta-sweep") return run_beta_sweep(cfg);
  if (name == "subdiv-sweep") return run_subdiv_sweep(cfg);
  if (name == "overlap") return run_overlap(cfg);
  if (name == "disagreement") return run_disagreement(cfg);
  if (name == "scaling") return run_scaling(cfg);
  throw UnknownExperiment(name);
}

}  // namespace curvewind
