#pragma once

// Reads the outline geometry of SVG <path> elements into rational Bezier curves.
//
// Supported: path commands M L H V C S Q T A Z (absolute and relative), the
// transform functions matrix/translate/scale/rotate/skewX/skewY on the path and its
// ancestors, and the root viewBox. Elliptical arcs become exact rational quadratics
// spanning at most a quarter turn each. Styling, fill rules, <use> references and
// everything inside <defs>-like containers are ignored.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "curvewind/errors.hpp"
#include "curvewind/geometry.hpp"
#include "curvewind/shape.hpp"

namespace curvewind {

// x' = a x + c y + e,  y' = b x + d y + f
struct Affine {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  Point2 apply(Point2 p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }

  // (this * o)(p) == this(o(p))
  Affine operator*(const Affine& o) const {
    return {a * o.a + c * o.b, b * o.a + d * o.b, a * o.c + c * o.d,
            b * o.c + d * o.d, a * o.e + c * o.f + e, b * o.e + d * o.f + f};
  }

  bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1 && e == 0 && f == 0; }
};

struct SvgDocument {
  Shape2D shape;
  std::optional<Aabb> viewbox;
  std::vector<std::string> warnings;
};

namespace detail {

inline bool is_svg_space(char ch) { return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f'; }

// Cursor over a run of SVG number/flag syntax; offsets are reported relative to the
// whole document.
class SvgScanner {
 public:
  SvgScanner(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  void skip_separators() {
    while (pos_ < text_.size() && (is_svg_space(text_[pos_]) || text_[pos_] == ',')) ++pos_;
  }
  void skip_spaces() {
    while (pos_ < text_.size() && is_svg_space(text_[pos_])) ++pos_;
  }
  bool done() {
    skip_separators();
    return pos_ >= text_.size();
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void advance() { ++pos_; }
  std::size_t offset() const { return base_ + pos_; }

  bool at_number() {
    skip_separators();
    const char ch = peek();
    return ch == '+' || ch == '-' || ch == '.' || std::isdigit(static_cast<unsigned char>(ch));
  }

  double number() {
    skip_separators();
    std::size_t p = pos_;
    if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
    const std::size_t digits_start = p;
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
    if (p < text_.size() && text_[p] == '.') {
      ++p;
      while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
    }
    if (p == digits_start || (p == digits_start + 1 && text_[digits_start] == '.'))
      throw MalformedPath("expected a number", offset());
    if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        while (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) ++q;
        p = q;
      }
    }
    std::string token(text_.substr(pos_, p - pos_));
    if (!token.empty() && token.front() == '+') token.erase(0, 1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size())
      throw MalformedPath("bad number '" + token + "'", offset());
    pos_ = p;
    return value;
  }

  bool flag() {
    skip_separators();
    const char ch = peek();
    if (ch != '0' && ch != '1') throw MalformedPath("expected an arc flag", offset());
    ++pos_;
    return ch == '1';
  }

 private:
  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

inline Affine parse_transform(std::string_view text, std::size_t base) {
  Affine total;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && (is_svg_space(text[pos]) || text[pos] == ',')) ++pos;
  };
  while (true) {
    skip();
    if (pos >= text.size()) break;
    const std::size_t name_start = pos;
    while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::string_view name = text.substr(name_start, pos - name_start);
    while (pos < text.size() && is_svg_space(text[pos])) ++pos;
    if (name.empty() || pos >= text.size() || text[pos] != '(')
      throw MalformedPath("bad transform list", base + pos);
    const std::size_t close = text.find(')', pos);
    if (close == std::string_view::npos) throw MalformedPath("unterminated transform", base + pos);
    SvgScanner args(text.substr(pos + 1, close - pos - 1), base + pos + 1);
    std::vector<double> v;
    while (!args.done()) v.push_back(args.number());
    pos = close + 1;

    auto need = [&](std::size_t lo, std::size_t hi) {
      if (v.size() < lo || v.size() > hi)
        throw MalformedPath("wrong argument count for " + std::string(name), base + name_start);
    };
    Affine t;
    if (name == "matrix") {
      need(6, 6);
      t = {v[0], v[1], v[2], v[3], v[4], v[5]};
    } else if (name == "translate") {
      need(1, 2);
      t.e = v[0];
      t.f = v.size() > 1 ? v[1] : 0.0;
    } else if (name == "scale") {
      need(1, 2);
      t.a = v[0];
      t.d = v.size() > 1 ? v[1] : v[0];
    } else if (name == "rotate") {
      if (v.size() != 1 && v.size() != 3)
        throw MalformedPath("wrong argument count for rotate", base + name_start);
      const double r = v[0] * std::numbers::pi / 180.0;
      const Affine rot{std::cos(r), std::sin(r), -std::sin(r), std::cos(r), 0, 0};
      if (v.size() == 3) {
        t = Affine{1, 0, 0, 1, v[1], v[2]} * rot * Affine{1, 0, 0, 1, -v[1], -v[2]};
      } else {
        t = rot;
      }
    } else if (name == "skewX") {
      need(1, 1);
      t.c = std::tan(v[0] * std::numbers::pi / 180.0);
    } else if (name == "skewY") {
      need(1, 1);
      t.b = std::tan(v[0] * std::numbers::pi / 180.0);
    } else {
      throw MalformedPath("unknown transform '" + std::string(name) + "'", base + name_start);
    }
    total = total * t;
  }
  return total;
}

class PathBuilder {
 public:
  PathBuilder(const Affine& xf, std::vector<RationalBezierCurve>& out, std::vector<std::string>& warnings)
      : xf_(xf), out_(out), warnings_(warnings) {}

  void parse(std::string_view d, std::size_t base) {
    SvgScanner s(d, base);
    char cmd = '\0';
    while (!s.done()) {
      const char ch = s.peek();
      if (std::isalpha(static_cast<unsigned char>(ch))) {
        cmd = ch;
        s.advance();
        if (std::string_view("MmZzLlHhVvCcSsQqTtAa").find(cmd) == std::string_view::npos)
          throw MalformedPath(std::string("unknown path command '") + cmd + "'", s.offset() - 1);
        if (!started_ && cmd != 'M' && cmd != 'm')
          throw MalformedPath("path data must begin with a moveto", s.offset() - 1);
        if (cmd == 'Z' || cmd == 'z') {
          close_path();
          continue;
        }
      } else if (cmd == '\0' || cmd == 'Z' || cmd == 'z') {
        throw MalformedPath("expected a path command", s.offset());
      }
      command(cmd, s);
      // Coordinates after a moveto are implicit linetos.
      if (cmd == 'M') cmd = 'L';
      if (cmd == 'm') cmd = 'l';
    }
  }

 private:
  void command(char cmd, SvgScanner& s) {
    const bool rel = std::islower(static_cast<unsigned char>(cmd)) != 0;
    const Point2 origin = rel ? current_ : Point2{};
    auto point = [&] {
      const double x = s.number();
      const double y = s.number();
      return origin + Point2{x, y};
    };
    const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
    char kind = upper;
    switch (upper) {
      case 'M':
        current_ = start_ = point();
        started_ = true;
        break;
      case 'L': {
        const Point2 p = point();
        emit({current_, p});
        current_ = p;
        break;
      }
      case 'H': {
        const Point2 p{s.number() + (rel ? current_.x : 0.0), current_.y};
        emit({current_, p});
        current_ = p;
        break;
      }
      case 'V': {
        const Point2 p{current_.x, s.number() + (rel ? current_.y : 0.0)};
        emit({current_, p});
        current_ = p;
        break;
      }
      case 'C': {
        const Point2 c1 = point(), c2 = point(), p = point();
        emit({current_, c1, c2, p});
        last_control_ = c2;
        current_ = p;
        break;
      }
      case 'S': {
        const Point2 c1 = previous_ == 'C' ? 2.0 * current_ - last_control_ : current_;
        const Point2 c2 = point(), p = point();
        emit({current_, c1, c2, p});
        last_control_ = c2;
        current_ = p;
        kind = 'C';
        break;
      }
      case 'Q': {
        const Point2 c1 = point(), p = point();
        emit({current_, c1, p});
        last_control_ = c1;
        current_ = p;
        break;
      }
      case 'T': {
        const Point2 c1 = previous_ == 'Q' ? 2.0 * current_ - last_control_ : current_;
        const Point2 p = point();
        emit({current_, c1, p});
        last_control_ = c1;
        current_ = p;
        kind = 'Q';
        break;
      }
      case 'A': {
        const double rx = s.number();
        const double ry = s.number();
        const double rotation = s.number();
        const bool large = s.flag();
        const bool sweep = s.flag();
        const Point2 p = point();
        arc(current_, p, rx, ry, rotation, large, sweep);
        current_ = p;
        break;
      }
      default:
        break;
    }
    previous_ = kind;
  }

  void close_path() {
    if (!(current_ == start_)) emit({current_, start_});
    current_ = start_;
    previous_ = 'Z';
  }

  void emit(std::vector<Point2> pts, std::vector<double> weights = {}) {
    if (weights.empty()) weights.assign(pts.size(), 1.0);
    for (auto& p : pts) p = xf_.apply(p);
    out_.emplace_back(std::move(pts), std::move(weights), 0);
  }

  // Endpoint-parameterized elliptical arc to rational quadratic conic pieces.
  void arc(Point2 p0, Point2 p1, double rx, double ry, double rotation_deg, bool large, bool sweep) {
    if (p0 == p1) return;
    rx = std::abs(rx);
    ry = std::abs(ry);
    if (rx == 0.0 || ry == 0.0) {
      warnings_.push_back("UnsupportedFeature: zero-radius arc drawn as a line");
      emit({p0, p1});
      return;
    }
    const double phi = rotation_deg * std::numbers::pi / 180.0;
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const Point2 h = 0.5 * (p0 - p1);
    const Point2 hp{cphi * h.x + sphi * h.y, -sphi * h.x + cphi * h.y};
    const double lambda = (hp.x * hp.x) / (rx * rx) + (hp.y * hp.y) / (ry * ry);
    if (lambda > 1.0) {
      rx *= std::sqrt(lambda);
      ry *= std::sqrt(lambda);
    }
    const double rx2 = rx * rx, ry2 = ry * ry;
    const double num = rx2 * ry2 - rx2 * hp.y * hp.y - ry2 * hp.x * hp.x;
    const double den = rx2 * hp.y * hp.y + ry2 * hp.x * hp.x;
    const double coef = (large != sweep ? 1.0 : -1.0) * std::sqrt(std::max(0.0, num / den));
    const Point2 cp{coef * rx * hp.y / ry, -coef * ry * hp.x / rx};
    const Point2 mid = 0.5 * (p0 + p1);
    const Point2 center{cphi * cp.x - sphi * cp.y + mid.x, sphi * cp.x + cphi * cp.y + mid.y};

    auto angle = [](Point2 u, Point2 v) { return std::atan2(cross(u, v), dot(u, v)); };
    const Point2 u{(hp.x - cp.x) / rx, (hp.y - cp.y) / ry};
    const Point2 v{(-hp.x - cp.x) / rx, (-hp.y - cp.y) / ry};
    const double theta0 = angle({1.0, 0.0}, u);
    double sweep_angle = angle(u, v);
    if (!sweep && sweep_angle > 0.0) sweep_angle -= 2.0 * std::numbers::pi;
    if (sweep && sweep_angle < 0.0) sweep_angle += 2.0 * std::numbers::pi;

    const int pieces =
        std::max(1, static_cast<int>(std::ceil(std::abs(sweep_angle) / (0.5 * std::numbers::pi) - 1e-9)));
    const double step = sweep_angle / pieces;
    const double w = std::cos(0.5 * step);
    auto on_ellipse = [&](Point2 unit) {
      const Point2 scaled{rx * unit.x, ry * unit.y};
      return Point2{cphi * scaled.x - sphi * scaled.y + center.x, sphi * scaled.x + cphi * scaled.y + center.y};
    };
    Point2 from = p0;
    for (int i = 0; i < pieces; ++i) {
      const double a0 = theta0 + i * step;
      const double a1 = a0 + step;
      const double am = a0 + 0.5 * step;
      const Point2 control = on_ellipse(Point2{std::cos(am), std::sin(am)} / w);
      const Point2 to = i + 1 == pieces ? p1 : on_ellipse({std::cos(a1), std::sin(a1)});
      emit({from, control, to}, {1.0, w, 1.0});
      from = to;
    }
  }

  Affine xf_;
  std::vector<RationalBezierCurve>& out_;
  std::vector<std::string>& warnings_;
  Point2 current_;
  Point2 start_;
  Point2 last_control_;
  char previous_ = '\0';
  bool started_ = false;
};

struct Attribute {
  std::string_view value;
  std::size_t offset;
};

inline std::optional<Attribute> find_attribute(std::string_view tag, std::size_t tag_offset, std::string_view name) {
  std::size_t pos = 0;
  while (pos < tag.size()) {
    while (pos < tag.size() && !std::isalpha(static_cast<unsigned char>(tag[pos]))) {
      if (tag[pos] == '"' || tag[pos] == '\'') {
        const std::size_t close = tag.find(tag[pos], pos + 1);
        if (close == std::string_view::npos) return std::nullopt;
        pos = close;
      }
      ++pos;
    }
    const std::size_t key_start = pos;
    while (pos < tag.size() && !is_svg_space(tag[pos]) && tag[pos] != '=' && tag[pos] != '>' && tag[pos] != '/')
      ++pos;
    const std::string_view key = tag.substr(key_start, pos - key_start);
    while (pos < tag.size() && is_svg_space(tag[pos])) ++pos;
    if (pos >= tag.size() || tag[pos] != '=') continue;
    ++pos;
    while (pos < tag.size() && is_svg_space(tag[pos])) ++pos;
    if (pos >= tag.size() || (tag[pos] != '"' && tag[pos] != '\'')) continue;
    const char quote = tag[pos];
    const std::size_t close = tag.find(quote, pos + 1);
    if (close == std::string_view::npos) return std::nullopt;
    if (key == name) return Attribute{tag.substr(pos + 1, close - pos - 1), tag_offset + pos + 1};
    pos = close + 1;
  }
  return std::nullopt;
}

inline bool is_hidden_container(std::string_view name) {
  return name == "defs" || name == "clipPath" || name == "mask" || name == "symbol" || name == "pattern" ||
         name == "marker";
}

}  // namespace detail

// Parses every <path> of an SVG document (or a bare path-data string) into curves.
inline SvgDocument parse_svg(std::string_view text, std::string name = {}) {
  SvgDocument doc;
  std::vector<RationalBezierCurve> curves;

  if (text.find('<') == std::string_view::npos) {
    // Bare path data.
    detail::PathBuilder builder(Affine{}, curves, doc.warnings);
    builder.parse(text, 0);
    doc.shape = Shape2D::renumbered(std::move(curves), std::move(name));
    return doc;
  }

  struct Open {
    std::string name;
    Affine transform;
  };
  std::vector<Open> open{{"", Affine{}}};
  int hidden = 0;
  bool warned_shapes = false;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string_view::npos) {
    auto skip_to = [&](std::string_view terminator) {
      const std::size_t end = text.find(terminator, pos);
      pos = end == std::string_view::npos ? text.size() : end + terminator.size();
    };
    const std::string_view rest = text.substr(pos);
    if (rest.starts_with("<!--")) {
      skip_to("-->");
      continue;
    }
    if (rest.starts_with("<![CDATA[")) {
      skip_to("]]>");
      continue;
    }
    if (rest.starts_with("<?")) {
      skip_to("?>");
      continue;
    }
    if (rest.starts_with("<!")) {
      skip_to(">");
      continue;
    }
    if (rest.starts_with("</")) {
      const std::size_t end = text.find('>', pos);
      if (open.size() > 1) {
        if (detail::is_hidden_container(open.back().name)) --hidden;
        open.pop_back();
      }
      pos = end == std::string_view::npos ? text.size() : end + 1;
      continue;
    }

    // Start tag; find its end while respecting quoted attribute values.
    std::size_t end = pos + 1;
    char quote = '\0';
    for (; end < text.size(); ++end) {
      const char ch = text[end];
      if (quote) {
        if (ch == quote) quote = '\0';
      } else if (ch == '"' || ch == '\'') {
        quote = ch;
      } else if (ch == '>') {
        break;
      }
    }
    if (end >= text.size()) throw MalformedPath("unterminated element", pos);
    const std::string_view tag = text.substr(pos + 1, end - pos - 1);
    const bool self_closing = !tag.empty() && tag.back() == '/';
    std::size_t name_end = 0;
    while (name_end < tag.size() && !detail::is_svg_space(tag[name_end]) && tag[name_end] != '/') ++name_end;
    std::string element(tag.substr(0, name_end));
    if (const auto colon = element.find(':'); colon != std::string::npos) element.erase(0, colon + 1);
    const std::size_t tag_offset = pos + 1;

    Affine xf = open.back().transform;
    if (auto t = detail::find_attribute(tag, tag_offset, "transform"))
      xf = xf * detail::parse_transform(t->value, t->offset);

    if (element == "svg" && !doc.viewbox) {
      if (auto vb = detail::find_attribute(tag, tag_offset, "viewBox")) {
        detail::SvgScanner s(vb->value, vb->offset);
        double v[4];
        for (double& x : v) x = s.number();
        if (v[2] < 0 || v[3] < 0) throw MalformedPath("negative viewBox size", vb->offset);
        doc.viewbox = Aabb{{v[0], v[1]}, {v[0] + v[2], v[1] + v[3]}};
      }
    } else if (element == "path" && hidden == 0) {
      if (auto d = detail::find_attribute(tag, tag_offset, "d")) {
        detail::PathBuilder builder(xf, curves, doc.warnings);
        builder.parse(d->value, d->offset);
      }
    } else if (!warned_shapes && (element == "rect" || element == "circle" || element == "ellipse" ||
                                  element == "line" || element == "polyline" || element == "polygon" ||
                                  element == "use" || element == "text")) {
      doc.warnings.push_back("UnsupportedFeature: <" + element + "> elements are ignored; only <path> is read");
      warned_shapes = true;
    }

    if (!self_closing) {
      if (detail::is_hidden_container(element)) ++hidden;
      open.push_back({std::move(element), xf});
    }
    pos = end + 1;
  }

  doc.shape = Shape2D::renumbered(std::move(curves), std::move(name));
  return doc;
}

inline Shape2D parse_svg_paths(std::string_view text) { return parse_svg(text).shape; }

// Cell-centred query grid over the document's viewBox, or the shape's box without one.
inline std::vector<Point2> viewbox_grid(std::string_view text, std::size_t nx, std::size_t ny) {
  const SvgDocument doc = parse_svg(text);
  return cell_centers(doc.viewbox.value_or(doc.shape.global_aabb), nx, ny);
}

// One curve per line: id, degree, x0, y0, ..., xn, yn, w0, ..., wn
inline void write_curves_csv(std::ostream& os, const Shape2D& shape) {
  os << "# id,degree,control points (x,y)...,weights...\n";
  os << std::setprecision(17);
  for (const auto& c : shape.curves) {
    os << c.id() << ',' << c.degree();
    for (Point2 p : c.control_points()) os << ',' << p.x << ',' << p.y;
    for (double w : c.weights()) os << ',' << w;
    os << '\n';
  }
}

}  // namespace curvewind
