// curvewind: winding-number fields for SVG shapes, plus the experiment sweeps.
//
// Exit codes: 0 ok, 1 parse failure, 2 invalid flags, 3 I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "curvewind/engine.hpp"
#include "curvewind/experiments.hpp"
#include "curvewind/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace curvewind;

namespace {

enum ExitCode { kOk = 0, kParse = 1, kFlags = 2, kIo = 3 };

struct ExitError {
  int code;
  std::string message;
};

// CURVEWIND_LOG=quiet|error|warn|info|debug
enum class Level { Quiet, Error, Warn, Info, Debug };

Level log_level() {
  static const Level level = [] {
    const char* env = std::getenv("CURVEWIND_LOG");
    const std::string v = env ? env : "warn";
    if (v == "quiet") return Level::Quiet;
    if (v == "error") return Level::Error;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Warn;
  }();
  return level;
}

void log(Level level, const std::string& msg) {
  static const char* names[] = {"", "error", "warn", "info", "debug"};
  if (level <= log_level() && level != Level::Quiet)
    std::cerr << "curvewind: " << names[static_cast<int>(level)] << ": " << msg << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Options {
  std::string input;
  std::string grid = "500x500";
  std::string method = "agglomerated";
  std::string beta = "2";
  int order = 2;
  double subdiv_frac = 0.1;
  int subdiv_max_depth = 20;
  unsigned threads = 0;
  bool compare = false;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string experiment;
  int truncate_moments = 0;
  bool no_image = false;
  bool dump_tree = false;
  bool dump_moments = false;
  bool dump_curves = false;
};

struct Grid {
  std::size_t nx = 0, ny = 0;
};

Grid parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  std::size_t nx = 0, ny = 0, used = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    nx = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    ny = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ExitError{kFlags, "--grid expects WxH, got '" + text + "'"};
  }
  if (nx == 0 || ny == 0) throw ExitError{kFlags, "--grid dimensions must be positive"};
  return {nx, ny};
}

double parse_beta(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double beta = 0.0;
  try {
    beta = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(beta > 0.0)) throw ExitError{kFlags, "--beta expects a positive number or inf"};
  return beta;
}

json beta_json(double beta) { return std::isinf(beta) ? json("inf") : json(beta); }

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ExitError{kIo, "cannot read " + path};
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) throw ExitError{kIo, "error reading " + path};
  return ss.str();
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw ExitError{kIo, "cannot write " + path.string()};
  return os;
}

void finish(std::ofstream& os, const fs::path& path) {
  os.close();
  if (!os) throw ExitError{kIo, "error writing " + path.string()};
  log(Level::Info, "wrote " + path.string());
}

// Linear 16-bit map of w over [round(min), round(max)], at least one unit wide;
// values outside the range are clamped.
void write_pgm(const fs::path& path, const std::vector<double>& values, Grid grid) {
  double lo = 0.0, hi = 1.0;
  if (!values.empty()) {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = std::round(*mn) + 0.0;  // no "-0" in the header
    hi = std::max(std::round(*mx), lo + 1.0);
  }
  auto os = open_output(path, std::ios::binary);
  os << "P5\n# curvewind winding number field, linear map w=" << format_double(lo) << " -> 0, w="
     << format_double(hi) << " -> 65535\n"
     << grid.nx << ' ' << grid.ny << "\n65535\n";
  // Row 0 is the smallest y, which is the top of an SVG viewport.
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double t = std::clamp((values[j * grid.nx + i] - lo) / (hi - lo), 0.0, 1.0);
      const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
      os.put(static_cast<char>(v >> 8));
      os.put(static_cast<char>(v & 0xff));
    }
  }
  finish(os, path);
}

json aabb_json(const Aabb& b) { return json::array({b.min.x, b.min.y, b.max.x, b.max.y}); }

void dump_tree(const fs::path& path, const Bvh& bvh) {
  json nodes = json::array();
  for (const auto& n : bvh.nodes) {
    json j{{"box", aabb_json(n.box)},
           {"depth", n.depth},
           {"centroid", json::array({n.centroid.x, n.centroid.y})},
           {"radius", n.radius}};
    if (n.is_leaf()) {
      j["curve_id"] = bvh.curves[static_cast<std::size_t>(n.curve)].id();
    } else {
      j["left"] = n.left;
      j["right"] = n.right;
    }
    nodes.push_back(std::move(j));
  }
  auto os = open_output(path);
  os << json{{"leaf_count", bvh.leaf_count}, {"max_depth", bvh.max_depth_reached}, {"nodes", nodes}}.dump(1)
     << '\n';
  finish(os, path);
}

void dump_moments(const fs::path& path, const Bvh& bvh) {
  auto os = open_output(path);
  os << "node,depth,cx,cy";
  for (int i = 0; i < 2; ++i) os << ",m0_" << i;
  for (int i = 0; i < 4; ++i) os << ",m1_" << i;
  for (int i = 0; i < 8; ++i) os << ",m2_" << i;
  os << '\n';
  for (std::size_t k = 0; k < bvh.nodes.size(); ++k) {
    const auto& n = bvh.nodes[k];
    os << k << ',' << n.depth << ',' << format_double(n.centroid.x) << ',' << format_double(n.centroid.y);
    for (double v : n.moments.m0.data) os << ',' << format_double(v);
    for (double v : n.moments.m1.data) os << ',' << format_double(v);
    for (double v : n.moments.m2.data) os << ',' << format_double(v);
    os << '\n';
  }
  finish(os, path);
}

int run_experiment_mode(const Options& opt, const Grid& grid, const std::optional<double> beta,
                        const std::optional<std::string>& input_text) {
  ExperimentConfig cfg;
  cfg.nx = grid.nx;
  cfg.ny = grid.ny;
  cfg.beta = beta;
  if (opt.order >= 0) cfg.order = parse_order(opt.order);
  cfg.threads = opt.threads;
  cfg.seed = opt.seed;
  cfg.subdivision = {opt.subdiv_frac, opt.subdiv_max_depth};
  if (input_text) {
    try {
      cfg.input = parse_svg(*input_text, opt.input).shape;
    } catch (const Error& e) {
      throw ExitError{kParse, e.what()};
    }
    if (cfg.input->empty()) throw ExitError{kParse, "no curves in " + opt.input};
  }

  const auto t0 = std::chrono::steady_clock::now();
  ExperimentTable table;
  try {
    table = run_experiment(opt.experiment, cfg);
  } catch (const UnknownExperiment& e) {
    throw ExitError{kFlags, e.what()};
  }
  const double elapsed = seconds_since(t0);

  const fs::path csv = fs::path(opt.out) / (opt.experiment + ".csv");
  auto os = open_output(csv);
  table.write_csv(os);
  finish(os, csv);

  json summary = json::object();
  for (const auto& [k, v] : table.summary) summary[k] = v;
  const json report{{"experiment", table.name},
                    {"input", opt.input.empty() ? json(nullptr) : json(opt.input)},
                    {"grid", {{"width", grid.nx}, {"height", grid.ny}}},
                    {"seed", opt.seed},
                    {"threads", resolve_threads(opt.threads)},
                    {"table", csv.filename().string()},
                    {"summary", summary},
                    {"elapsed_seconds", elapsed}};
  const fs::path jpath = fs::path(opt.out) / (opt.experiment + ".json");
  auto js = open_output(jpath);
  js << report.dump(2) << '\n';
  finish(js, jpath);
  return kOk;
}

int run_field_mode(const Options& opt, const Grid& grid, double beta, const std::string& text) {
  json report;
  report["input"] = opt.input == "-" ? "<stdin>" : opt.input;
  report["method"] = opt.method;

  auto t0 = std::chrono::steady_clock::now();
  SvgDocument doc;
  try {
    doc = parse_svg(text, opt.input);
  } catch (const Error& e) {
    throw ExitError{kParse, e.what()};
  }
  const double parse_seconds = seconds_since(t0);
  for (const auto& w : doc.warnings) log(Level::Warn, w);
  if (doc.shape.empty()) throw ExitError{kParse, "no curves in " + opt.input};
  const Shape2D& shape = doc.shape;
  log(Level::Info, std::to_string(shape.size()) + " curves parsed");

  SubdivisionConfig subdiv{opt.subdiv_frac, opt.subdiv_max_depth};
  QueryConfig cfg = QueryConfig::for_diagonal(shape.diagonal());
  cfg.beta = beta;
  cfg.order = *parse_order(opt.order);
  cfg.threads = opt.threads;

  t0 = std::chrono::steady_clock::now();
  SubdivisionStats sstats;
  const Shape2D subdivided = adaptive_subdivide(shape, subdiv, &sstats);
  const double subdivide_seconds = seconds_since(t0);

  // Per-curve moments as a separate pass; the tree build repeats them while summing upward.
  t0 = std::chrono::steady_clock::now();
  double checksum = 0.0;
  for (const auto& c : subdivided.curves) checksum += curve_moments(c).weight_length;
  const double moments_seconds = seconds_since(t0);
  log(Level::Debug, "total chord length " + format_double(checksum));

  const Aabb box = doc.viewbox.value_or(shape.global_aabb);
  const auto queries = cell_centers(box, grid.nx, grid.ny);

  const fs::path out(opt.out);
  double build_seconds = 0.0;
  FieldResult field;
  std::optional<Bvh> bvh;
  if (opt.method == "agglomerated" || opt.dump_tree || opt.dump_moments) {
    t0 = std::chrono::steady_clock::now();
    bvh = build_bvh(subdivided, BvhOptions{opt.truncate_moments});
    build_seconds = seconds_since(t0);
  }
  if (opt.method == "agglomerated")
    field = evaluate_batch(*bvh, queries, cfg);
  else
    field = evaluate_direct(subdivided, queries, cfg);
  log(Level::Info, "query time " + format_double(field.query_seconds) + " s");

  {
    const fs::path path = out / "field.csv";
    auto os = open_output(path);
    os << "x,y,w,inside,confidence\n";
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto c = containment(field.values[i]);
      os << format_double(queries[i].x) << ',' << format_double(queries[i].y) << ','
         << format_double(field.values[i]) << ',' << (c.inside ? 1 : 0) << ',' << format_double(c.confidence)
         << '\n';
    }
    finish(os, path);
  }
  if (!opt.no_image) write_pgm(out / "field.pgm", field.values, grid);
  if (opt.dump_tree) dump_tree(out / "tree.json", *bvh);
  if (opt.dump_moments) dump_moments(out / "moments.csv", *bvh);
  if (opt.dump_curves) {
    const fs::path path = out / "curves.csv";
    auto os = open_output(path);
    write_curves_csv(os, subdivided);
    finish(os, path);
  }

  json errors = nullptr;
  json misclassified = json::array();
  if (opt.compare) {
    // Ground truth: every original curve evaluated directly.
    FieldResult truth = evaluate_direct(shape, queries, cfg);
    const auto r = summarize_errors(queries, std::move(truth), field);
    const fs::path path = out / "errors.csv";
    auto os = open_output(path);
    os << "x,y,direct,value,abs_error\n";
    for (std::size_t i = 0; i < queries.size(); ++i)
      os << format_double(queries[i].x) << ',' << format_double(queries[i].y) << ','
         << format_double(r.direct.values[i]) << ',' << format_double(r.approx.values[i]) << ','
         << format_double(r.abs_error[i]) << '\n';
    finish(os, path);
    const fs::path mpath = out / "misclassified.csv";
    auto ms = open_output(mpath);
    ms << "index,x,y,direct,value,fractional\n";
    for (const auto& d : r.disagreements) {
      ms << d.index << ',' << format_double(d.point.x) << ',' << format_double(d.point.y) << ','
         << format_double(d.truth) << ',' << format_double(d.approx) << ',' << format_double(d.fractional) << '\n';
      misclassified.push_back({{"x", d.point.x}, {"y", d.point.y}, {"direct", d.truth}, {"value", d.approx},
                               {"fractional", d.fractional}});
    }
    finish(ms, mpath);
    errors = {{"linf", r.linf},
              {"l2_rms", r.l2},
              {"median", r.median},
              {"misclassified", r.disagreements.size()},
              {"direct_query_seconds", r.direct.query_seconds}};
  }

  std::size_t inside = 0, boundary = 0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    inside += containment(field.values[i]).inside;
    boundary += field.stats[i].on_boundary;
  }
  const auto [mn, mx] = std::minmax_element(field.values.begin(), field.values.end());

  report["grid"] = {{"width", grid.nx}, {"height", grid.ny}, {"box", aabb_json(box)}};
  report["beta"] = beta_json(beta);
  report["order"] = opt.order;
  report["threads"] = resolve_threads(opt.threads);
  report["seed"] = opt.seed;
  report["subdivision"] = {{"max_diag_fraction", opt.subdiv_frac},
                           {"max_depth", opt.subdiv_max_depth},
                           {"depth_cap_hits", sstats.depth_cap_hits},
                           {"deepest", sstats.deepest}};
  report["curves"] = {{"raw", shape.size()}, {"subdivided", subdivided.size()}};
  report["bvh"] = bvh ? json{{"depth", bvh->max_depth_reached},
                             {"nodes", bvh->nodes.size()},
                             {"leaves", bvh->leaf_count},
                             {"centroid_fallbacks", bvh->centroid_fallbacks},
                             {"truncate_moments", opt.truncate_moments}}
                      : json(nullptr);
  report["timings"] = {{"parse", parse_seconds},
                       {"subdivide", subdivide_seconds},
                       {"moments", moments_seconds},
                       {"build", build_seconds},
                       {"query", field.query_seconds}};
  report["field"] = {{"min", *mn},
                     {"max", *mx},
                     {"inside", inside},
                     {"on_boundary", boundary},
                     {"mean_leaves_visited", field.mean_leaves_visited()},
                     {"mean_approximations", field.mean_approximations()}};
  report["errors"] = errors;
  report["misclassifications"] = misclassified;
  report["warnings"] = doc.warnings;

  const fs::path path = out / "report.json";
  auto os = open_output(path);
  os << report.dump(2) << '\n';
  finish(os, path);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Generalized winding number fields for SVG curve shapes"};
  app.add_option("--input", opt.input, "SVG file, or - for stdin");
  app.add_option("--grid", opt.grid, "query grid WxH over the viewBox (or shape box)")->capture_default_str();
  app.add_option("--method", opt.method, "evaluator")
      ->check(CLI::IsMember({"direct", "agglomerated"}))
      ->capture_default_str();
  app.add_option("--beta", opt.beta, "far-field factor, or inf")->capture_default_str();
  auto* order = app.add_option("--order", opt.order, "Taylor order 0, 1 or 2")
                    ->check(CLI::Range(0, 2))
                    ->capture_default_str();
  app.add_option("--subdiv-frac", opt.subdiv_frac, "max piece diagonal as a fraction of the shape's")
      ->check(CLI::Range(std::numeric_limits<double>::min(), 1.0))
      ->capture_default_str();
  app.add_option("--subdiv-max-depth", opt.subdiv_max_depth, "bisection depth cap")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--threads", opt.threads, "worker count, 0 for all cores")->capture_default_str();
  app.add_flag("--compare", opt.compare, "also evaluate directly and write error files");
  app.add_option("--seed", opt.seed, "seed for synthesized experiment geometry")->capture_default_str();
  app.add_option("--out", opt.out, "output directory")->capture_default_str();
  app.add_option("--experiment", opt.experiment, "order-sweep|beta-sweep|subdiv-sweep|overlap|disagreement|scaling");
  app.add_option("--truncate-moments", opt.truncate_moments, "round stored moments to this many digits")
      ->check(CLI::Range(0, 17));
  app.add_flag("--no-image", opt.no_image, "skip the field.pgm image");
  app.add_flag("--dump-tree", opt.dump_tree, "write tree.json");
  app.add_flag("--dump-moments", opt.dump_moments, "write per-node moments.csv");
  app.add_flag("--dump-curves", opt.dump_curves, "write the subdivided curves to curves.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFlags;
  }

  try {
    const Grid grid = parse_grid(opt.grid);
    const bool beta_given = app.count("--beta") > 0;
    const double beta = parse_beta(opt.beta);
    if (opt.experiment.empty() && opt.input.empty()) throw ExitError{kFlags, "--input is required"};
    if (!opt.experiment.empty() && !order->count()) opt.order = -1;

    std::error_code ec;
    fs::create_directories(opt.out, ec);
    if (ec || !fs::is_directory(opt.out)) throw ExitError{kIo, "cannot create output directory " + opt.out};

    std::optional<std::string> text;
    if (!opt.input.empty()) text = read_input(opt.input);
    if (!opt.experiment.empty())
      return run_experiment_mode(opt, grid, beta_given ? std::optional<double>(beta) : std::nullopt, text);
    return run_field_mode(opt, grid, beta, *text);
  } catch (const ExitError& e) {
    log(Level::Error, e.message);
    return e.code;
  } catch (const std::invalid_argument& e) {
    log(Level::Error, e.what());
    return kFlags;
  } catch (const std::exception& e) {
    log(Level::Error, e.what());
    return kIo;
  }
}
