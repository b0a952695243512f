#include "fanforge/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "fanforge/errors.hpp"

namespace fanforge {

namespace {

Rational sq_norm(const Rational& x, const Rational& y, const Rational& z) { return x * x + y * y + z * z; }

Rational sq_dist(const Point3& a, const Point3& b) { return sq_norm(a.x - b.x, a.y - b.y, a.z - b.z); }

Point3 lerp(const Point3& a, const Point3& b, const Rational& t) {
  return Point3{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
}

Rational sq_dist_segment(const Point3& p, const Point3& a, const Point3& b) {
  Rational dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
  Rational len = sq_norm(dx, dy, dz);
  if (len == 0) return sq_dist(p, a);
  Rational t = ((p.x - a.x) * dx + (p.y - a.y) * dy + (p.z - a.z) * dz) / len;
  if (t < 0) t = 0;
  if (t > 1) t = 1;
  return sq_dist(p, lerp(a, b, t));
}

struct Segment {
  Point3 a, b;
};

std::vector<Segment> segments(const EmbeddedArc& arc) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < arc.points.size(); ++i) out.push_back({arc.points[i], arc.points[i + 1]});
  if (out.empty() && !arc.points.empty()) out.push_back({arc.points[0], arc.points[0]});
  return out;
}

// per-target-segment squared distances at one point
std::vector<Rational> profile(const Point3& p, const std::vector<Segment>& target) {
  std::vector<Rational> d;
  d.reserve(target.size());
  for (const auto& s : target) d.push_back(sq_dist_segment(p, s.a, s.b));
  return d;
}

// Bounds on sup over arc `a` of the squared distance to arc `b`. Each distance to a
// single segment is convex along a segment, so on a piece it is at most the larger
// endpoint value; the minimum over target segments inherits that bound.
void directed_sup(const EmbeddedArc& a, const EmbeddedArc& b, const Rational& sq_tol, Rational& lo, Rational& hi) {
  auto target = segments(b);
  struct Piece {
    Point3 p, q;
    std::vector<Rational> dp, dq;
    Rational upper;
  };
  auto make = [&](const Point3& p, const Point3& q, std::vector<Rational> dp, std::vector<Rational> dq) {
    Piece pc{p, q, std::move(dp), std::move(dq), 0};
    bool first = true;
    for (std::size_t k = 0; k < target.size(); ++k) {
      Rational m = rmax(pc.dp[k], pc.dq[k]);
      if (first || m < pc.upper) pc.upper = m;
      first = false;
    }
    return pc;
  };
  auto minv = [](const std::vector<Rational>& v) { return *std::min_element(v.begin(), v.end()); };

  lo = 0;
  std::vector<Piece> open;
  for (const auto& s : segments(a)) {
    auto dp = profile(s.a, target), dq = profile(s.b, target);
    lo = rmax(lo, rmax(minv(dp), minv(dq)));
    open.push_back(make(s.a, s.b, std::move(dp), std::move(dq)));
  }
  for (int round = 0; round < 60; ++round) {
    std::vector<Piece> next;
    for (auto& pc : open) {
      if (pc.upper <= lo + sq_tol) continue;
      Point3 mid = lerp(pc.p, pc.q, Rational(1, 2));
      auto dm = profile(mid, target);
      lo = rmax(lo, minv(dm));
      next.push_back(make(pc.p, mid, pc.dp, dm));
      next.push_back(make(mid, pc.q, std::move(dm), std::move(pc.dq)));
    }
    open.clear();
    for (auto& pc : next)
      if (pc.upper > lo + sq_tol) open.push_back(std::move(pc));
    if (open.empty()) break;
  }
  hi = lo + sq_tol;
  for (const auto& pc : open) hi = rmax(hi, pc.upper);
}

double down(const Rational& q) { return std::nextafter(to_double(q), -INFINITY); }
double up(const Rational& q) { return std::nextafter(to_double(q), INFINITY); }

std::vector<int> padded_digits(const Rational& x, std::size_t len) {
  std::vector<int> d;
  finite_ternary(x, d);
  d.resize(std::max(d.size(), len), 0);
  return d;
}

}  // namespace

std::string to_string(const SpatialPoint& p) {
  if (std::holds_alternative<SpatialPoint::Top>(p.v)) return "top";
  if (auto* b = std::get_if<SpatialPoint::Base>(&p.v)) return "base" + to_string(b->index) + "@" + to_string(b->height);
  const auto& s = std::get<SpatialPoint::OnSheet>(p.v);
  return "sheet" + std::to_string(s.sheet) + "[" + std::to_string(s.blade) + "]@" + to_string(s.s);
}

Point3 apex() { return Point3{Rational(1, 2), 0, 0}; }

Point3 embed_cone(const Point3& raw) { return Point3{(1 - raw.y) / 2 + raw.y * raw.x, raw.y, raw.z}; }

Point3 embed_cone(const Comb& c, const FanPoint& p) {
  check_point(c, p);
  if (p.is_top()) return apex();
  const auto& ob = p.blade();
  return embed_cone(Point3{c.at(ob.index).x, ob.height, 0});
}

namespace {

const Sheet& sheet_of(const SpatialModel& m, int n) {
  for (const auto& s : m.sheets)
    if (s.n == n) return s;
  throw InvalidPointError("no sheet " + std::to_string(n));
}

// raw (pre-cone) vertices from the base up to p
std::vector<Point3> raw_path(const SpatialModel& m, const SpatialPoint& p) {
  if (std::holds_alternative<SpatialPoint::Top>(p.v)) return {};
  if (auto* b = std::get_if<SpatialPoint::Base>(&p.v)) {
    const Blade* bl = m.base.find(b->index);
    if (!bl || b->height < 0 || b->height > 1) throw InvalidPointError("point not on a base blade: " + to_string(p));
    if (b->height == 0) return {};
    return {Point3{bl->x, b->height, 0}};
  }
  const auto& os = std::get<SpatialPoint::OnSheet>(p.v);
  const Sheet& sh = sheet_of(m, os.sheet);
  if (os.blade >= sh.blades.size() || os.s < 0 || os.s > 2) throw InvalidPointError("point not on a sheet blade: " + to_string(p));
  const auto& poly = sh.blades[os.blade].polyline;
  if (os.s == 0) return {};
  if (os.s <= 1) return {lerp(poly[0], poly[1], os.s)};
  return {poly[1], lerp(poly[1], poly[2], os.s - 1)};
}

}  // namespace

Point3 embed_spatial(const SpatialModel& m, const SpatialPoint& p) {
  auto path = raw_path(m, p);
  return path.empty() ? apex() : embed_cone(path.back());
}

EmbeddedArc arc_from_top(const Comb& c, const FanPoint& p) {
  Point3 e = embed_cone(c, p);
  if (p.is_top() || p.blade().height == 0) return EmbeddedArc{{apex()}};
  return EmbeddedArc{{apex(), e}};
}

EmbeddedArc arc_from_top(const SpatialModel& m, const SpatialPoint& p) {
  EmbeddedArc arc{{apex()}};
  for (const auto& q : raw_path(m, p)) arc.points.push_back(embed_cone(q));
  return arc;
}

Rational default_resolution() { return Rational(1, 10000); }

DistanceBounds hausdorff_arc_distance(const EmbeddedArc& a, const EmbeddedArc& b, const Rational& resolution) {
  if (a.points.empty() || b.points.empty()) throw ArgumentError("empty arc");
  if (a == b) return {0, 0};
  // squared tolerance small enough that the square roots differ by < resolution/2
  Rational sq_tol = resolution * resolution / 4;
  Rational l1, h1, l2, h2;
  directed_sup(a, b, sq_tol, l1, h1);
  directed_sup(b, a, sq_tol, l2, h2);
  Rational lo = rmax(l1, l2), hi = rmax(h1, h2);
  Rational slo, shi, tlo, thi;
  sqrt_bounds(lo, slo, shi);
  sqrt_bounds(hi, tlo, thi);
  // sqrt(lo + sq_tol) - sqrt(lo) <= resolution/2
  return {down(slo), up(thi)};
}

namespace {

SmoothnessReport finish(std::vector<std::pair<std::string, EmbeddedArc>> seq, const EmbeddedArc& target,
                        const Rational& resolution) {
  if (seq.size() < 3) throw NoSequenceError("sequence rule selected fewer than 3 points");
  SmoothnessReport r;
  for (const auto& [name, arc] : seq) {
    r.sequence.push_back(name);
    r.gaps.push_back(hausdorff_arc_distance(arc, target, resolution));
  }
  r.converges = r.gaps.back().upper <= to_double(resolution);
  // liminf over the tail of the finite sequence
  double w = INFINITY;
  for (std::size_t i = r.gaps.size() / 2; i < r.gaps.size(); ++i) w = std::min(w, r.gaps[i].lower);
  r.witness_gap = r.converges ? r.gaps.back().upper : w;
  return r;
}

}  // namespace

SmoothnessReport smoothness_scan(const Comb& c, const FanPoint& target, const std::string& rule,
                                 const Rational& resolution) {
  if (rule != "nearest-tips") throw ArgumentError("unknown sequence rule: " + rule);
  check_point(c, target);
  Point3 t = embed_cone(c, target);
  struct Cand {
    Rational d;
    FanPoint p;
  };
  std::vector<Cand> cands;
  if (target.is_top()) {
    for (const auto& b : c.blades())
      for (int j = 1; j <= 24; ++j) {
        FanPoint p = FanPoint::on(b.index, b.tip * pow(Rational(1, 2), j));
        cands.push_back({sq_dist(embed_cone(c, p), t), p});
      }
  } else {
    const auto& tb = target.blade();
    for (const auto& b : c.blades()) {
      if (b.index == tb.index) continue;
      FanPoint p = FanPoint::on(b.index, rmin(tb.height, b.tip));
      cands.push_back({sq_dist(embed_cone(c, p), t), p});
    }
    if (tb.height > 0)
      for (int j = 1; j <= 24; ++j) {
        FanPoint p = FanPoint::on(tb.index, tb.height * (1 - pow(Rational(1, 2), j)));
        cands.push_back({sq_dist(embed_cone(c, p), t), p});
      }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d > b.d; });
  // keep only strictly approaching points, at most the closest 40
  std::vector<Cand> kept;
  for (auto& cd : cands)
    if (cd.d > 0 && (kept.empty() || cd.d < kept.back().d)) kept.push_back(std::move(cd));
  if (kept.size() > 40) kept.erase(kept.begin(), kept.end() - 40);
  std::vector<std::pair<std::string, EmbeddedArc>> seq;
  for (const auto& cd : kept) seq.emplace_back(to_string(cd.p), arc_from_top(c, cd.p));
  return finish(std::move(seq), arc_from_top(c, target), resolution);
}

SmoothnessReport smoothness_scan(const SpatialModel& m, const SpatialPoint& target, const std::string& rule,
                                 const Rational& resolution) {
  Point3 t = embed_spatial(m, target);
  EmbeddedArc tarc = arc_from_top(m, target);
  std::vector<std::pair<std::string, EmbeddedArc>> seq;
  auto push = [&](const SpatialPoint& p) { seq.emplace_back(to_string(p), arc_from_top(m, p)); };
  bool top = std::holds_alternative<SpatialPoint::Top>(target.v);

  if (rule == "sheet-descent") {
    std::vector<int> tdigits;
    if (!top) {
      const auto* b = std::get_if<SpatialPoint::Base>(&target.v);
      if (!b) throw ArgumentError("sheet-descent targets the apex or a base blade");
      tdigits = padded_digits(m.base.at(b->index).x, 0);
    }
    std::vector<const Sheet*> order;
    for (const auto& s : m.sheets) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](const Sheet* a, const Sheet* b) { return a->n < b->n; });
    for (const Sheet* s : order) {
      if (s->blades.empty()) continue;
      if (top) {
        push(SpatialPoint{SpatialPoint::OnSheet{s->n, 0, pow(Rational(1, 4), s->n)}});
        continue;
      }
      auto d = tdigits;
      d.resize(std::max(d.size(), s->cell.size()), 0);
      bool inside = true;
      for (std::size_t i = 0; i < s->cell.size(); ++i) inside = inside && d[i] == s->cell[i] - '0';
      if (!inside) continue;
      std::size_t best = 0;
      Rational bd = -1;
      for (std::size_t j = 0; j < s->blades.size(); ++j) {
        Rational dd = sq_dist(embed_cone(s->blades[j].polyline.back()), t);
        if (bd < 0 || dd < bd) bd = dd, best = j;
      }
      push(SpatialPoint{SpatialPoint::OnSheet{s->n, best, 2}});
    }
  } else if (rule == "nearest-tips") {
    struct Cand {
      Rational d;
      SpatialPoint p;
    };
    std::vector<Cand> cands;
    for (const auto& s : m.sheets)
      for (std::size_t j = 0; j < s.blades.size(); ++j) {
        SpatialPoint p{SpatialPoint::OnSheet{s.n, j, 2}};
        cands.push_back({sq_dist(embed_spatial(m, p), t), p});
      }
    for (const auto& b : m.base.blades()) {
      SpatialPoint p{SpatialPoint::Base{b.index, 1}};
      cands.push_back({sq_dist(embed_spatial(m, p), t), p});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d > b.d; });
    std::vector<Cand> kept;
    for (auto& cd : cands)
      if (cd.d > 0 && (kept.empty() || cd.d < kept.back().d)) kept.push_back(std::move(cd));
    if (kept.size() > 40) kept.erase(kept.begin(), kept.end() - 40);
    for (const auto& cd : kept) push(cd.p);
  } else {
    throw ArgumentError("unknown sequence rule: " + rule);
  }
  return finish(std::move(seq), tarc, resolution);
}

}  // namespace fanforge
