#include "fanforge/svg.hpp"

#include "fanforge/errors.hpp"
#include "fanforge/geometry.hpp"

namespace fanforge {

namespace {

std::string num(const Rational& q) { return to_decimal(q, 12); }

std::string pt(const Rational& u, const Rational& v) { return num(u) + " " + num(v); }

std::string header(const std::string& style) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-0.05 -0.05 1.1 1.1\" width=\"660\" height=\"660\" "
         "data-style=\"" + style + "\">\n<g fill=\"none\" stroke=\"black\" stroke-width=\"0.002\">\n";
}

constexpr const char* kFooter = "</g>\n</svg>\n";

std::string blade_path(const std::string& cls, const std::string& d, const std::string& extra = "") {
  return "<path class=\"" + cls + "\"" + extra + " d=\"" + d + "\"/>\n";
}

std::string base_line() { return blade_path("base", "M " + pt(0, 1) + " L " + pt(1, 1)); }

}  // namespace

RenderStyle parse_style(const std::string& s) {
  if (s == "comb") return RenderStyle::Comb;
  if (s == "fan") return RenderStyle::Fan;
  if (s == "spatial") return RenderStyle::Spatial;
  throw ArgumentError("unknown style '" + s + "' (comb|fan|spatial)");
}

std::string to_string(RenderStyle s) {
  switch (s) {
    case RenderStyle::Comb: return "comb";
    case RenderStyle::Fan: return "fan";
    default: return "spatial";
  }
}

std::string render_svg(const Comb& c, RenderStyle style) {
  if (style == RenderStyle::Spatial) throw ArgumentError("spatial style needs a spatial model");
  std::string out = header(to_string(style));
  if (style == RenderStyle::Comb) {
    out += base_line();
    for (const auto& b : c.blades()) out += blade_path("blade", "M " + pt(b.x, 1) + " L " + pt(b.x, 1 - b.tip));
  } else {
    Point3 a = apex();
    for (const auto& b : c.blades()) {
      Point3 e = embed_cone(Point3{b.x, b.tip, 0});
      out += blade_path("blade", "M " + pt(a.x, a.y) + " L " + pt(e.x, e.y));
    }
  }
  return out + kFooter;
}

std::string render_svg(const SpatialModel& m) {
  auto proj = [](const Point3& p) { return pt(p.x + p.z / 2, 1 - p.y - p.z / 4); };
  std::string out = header("spatial");
  out += base_line();
  for (const auto& b : m.base.blades()) out += blade_path("blade", "M " + pt(b.x, 1) + " L " + pt(b.x, 1 - b.tip));
  for (const auto& s : m.sheets) {
    std::string width = " data-sheet=\"" + std::to_string(s.n) + "\" stroke-width=\"" + num(frac(2, 1000 * (s.n + 1))) + "\"";
    for (const auto& b : s.blades) {
      if (b.polyline.empty()) continue;
      std::string d = "M " + proj(b.polyline.front());
      for (std::size_t i = 1; i < b.polyline.size(); ++i) d += " L " + proj(b.polyline[i]);
      out += blade_path("sheet-blade", d, width);
    }
  }
  return out + kFooter;
}

}  // namespace fanforge
