#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <tuple>

#include "fanforge/construct.hpp"
#include "fanforge/errors.hpp"
#include "fanforge/geometry.hpp"
#include "gen.hpp"

using namespace fanforge;

namespace {

// dense sampling of both arcs, doubles only
double sampled_hausdorff(const EmbeddedArc& a, const EmbeddedArc& b, int per_segment) {
  auto sample = [&](const EmbeddedArc& arc) {
    std::vector<std::array<double, 3>> pts;
    if (arc.points.size() == 1)
      pts.push_back({to_double(arc.points[0].x), to_double(arc.points[0].y), to_double(arc.points[0].z)});
    for (std::size_t i = 0; i + 1 < arc.points.size(); ++i)
      for (int k = 0; k <= per_segment; ++k) {
        double t = static_cast<double>(k) / per_segment;
        const auto &p = arc.points[i], &q = arc.points[i + 1];
        pts.push_back({to_double(p.x) + t * (to_double(q.x) - to_double(p.x)),
                       to_double(p.y) + t * (to_double(q.y) - to_double(p.y)),
                       to_double(p.z) + t * (to_double(q.z) - to_double(p.z))});
      }
    return pts;
  };
  auto A = sample(a), B = sample(b);
  auto directed = [](const auto& P, const auto& Q) {
    double worst = 0;
    for (const auto& p : P) {
      double best = INFINITY;
      for (const auto& q : Q)
        best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(A, B), directed(B, A));
}

}  // namespace

TEST_CASE("embed_cone") {
  auto c = maximal_comb(1);
  CHECK(embed_cone(c, FanPoint::top()) == Point3{Rational(1, 2), 0, 0});
  CHECK(embed_cone(c, FanPoint::on(BladeIndex{}, 1)) == Point3{0, 1, 0});
  CHECK(embed_cone(c, FanPoint::on(BladeIndex{{1}, {}}, Rational(1, 2))) == Point3{Rational(7, 12), Rational(1, 2), 0});
  CHECK_THROWS_AS(embed_cone(c, FanPoint::on(BladeIndex{{2}, {}}, Rational(1, 2))), InvalidPointError);
}

TEST_CASE("arc_from_top") {
  auto c = build_epg_comb(parse_set_expr("pt(0)+pt(1/2)+pt(3/4)"), 2, 3);
  auto a = arc_from_top(c, FanPoint::on(BladeIndex{}, 1));
  CHECK(a.points == std::vector<Point3>{{Rational(1, 2), 0, 0}, {0, 1, 0}});
  BladeIndex i1{{1}, {}};
  auto full = arc_from_top(c, FanPoint::on(i1, Rational(3, 4)));
  auto half = arc_from_top(c, FanPoint::on(i1, Rational(3, 8)));
  CHECK(half.points.back().y * 2 == full.points.back().y);
  CHECK(half.points.back().x - Rational(1, 2) == (full.points.back().x - Rational(1, 2)) / 2);

  auto sm = build_nonsmooth_3d(3, 2, 3);
  auto s = arc_from_top(sm, SpatialPoint{SpatialPoint::OnSheet{2, 1, Rational(3, 2)}});
  CHECK(s.points.size() >= 3);
  CHECK(s.points.front() == apex());
  CHECK_THROWS_AS(arc_from_top(sm, SpatialPoint{SpatialPoint::OnSheet{9, 0, 1}}), InvalidPointError);
}

TEST_CASE("hausdorff examples") {
  auto c = maximal_comb(1);
  auto a = arc_from_top(c, FanPoint::on(BladeIndex{}, 1));
  auto d0 = hausdorff_arc_distance(a, a);
  CHECK(d0.lower == 0);
  CHECK(d0.upper == 0);

  auto b = arc_from_top(c, FanPoint::on(BladeIndex{{1}, {}}, 1));
  auto d = hausdorff_arc_distance(a, b);
  CHECK(d.upper >= 1.0 / 3);
  CHECK(d.upper <= 2.0 / 3);
  CHECK(d.upper - d.lower <= 1e-4);
  double oracle = sampled_hausdorff(a, b, 1000);
  CHECK(std::abs(oracle - d.upper) <= 1e-3);

  auto h = arc_from_top(c, FanPoint::on(BladeIndex{}, Rational(1, 2)));
  auto dh = hausdorff_arc_distance(a, h);
  double half_len = std::hypot(0.25, 0.5);
  CHECK(dh.lower <= half_len);
  CHECK(dh.upper >= half_len);
}

TEST_CASE("hausdorff on polylines matches sampling") {
  auto sm = build_nonsmooth_3d(4, 2, 3);
  testgen::Rng r(11);
  for (int it = 0; it < 30; ++it) {
    auto pick = [&]() {
      const auto& s = sm.sheets[r.below(sm.sheets.size())];
      std::size_t j = r.below(s.blades.size());
      return SpatialPoint{SpatialPoint::OnSheet{s.n, j, frac(r.below(17), 8)}};
    };
    auto a = arc_from_top(sm, pick()), b = arc_from_top(sm, pick());
    auto d = hausdorff_arc_distance(a, b);
    CHECK(d.upper - d.lower <= 1e-4 + 1e-12);
    double o = sampled_hausdorff(a, b, 400);
    CHECK(o <= d.upper + 5e-3);
    CHECK(o >= d.lower - 5e-3);
  }
}

TEST_CASE("property: hausdorff is a pseudometric on sampled triples") {
  auto c = build_epg_comb(parse_set_expr("pt(0)+iv(1/4,1/2)"), 3, 3);
  testgen::Rng r(5);
  auto pick = [&]() {
    const auto& b = c.blades()[r.below(c.size())];
    return arc_from_top(c, FanPoint::on(b.index, b.tip * frac(1 + r.below(8), 8)));
  };
  for (int it = 0; it < 60; ++it) {
    auto a = pick(), b = pick(), d = pick();
    auto ab = hausdorff_arc_distance(a, b), ba = hausdorff_arc_distance(b, a);
    CHECK(ab.lower == ba.lower);
    CHECK(ab.upper == ba.upper);
    auto ad = hausdorff_arc_distance(a, d), db = hausdorff_arc_distance(d, b);
    CHECK(ab.lower <= ad.upper + db.upper + 2e-4);
  }
}

TEST_CASE("property: embed_cone is injective on a comb") {
  auto c = build_epg_comb(parse_set_expr("pt(0)+pt(1/2)+pt(3/4)"), 3, 3);
  std::set<std::tuple<Rational, Rational>> seen;
  std::size_t n = 0;
  for (const auto& b : c.blades())
    for (int k = 1; k <= 4; ++k) {
      auto e = embed_cone(c, FanPoint::on(b.index, b.tip * frac(k, 4)));
      seen.insert({e.x, e.y});
      ++n;
    }
  CHECK(seen.size() == n);
}

TEST_CASE("smoothness of constructed plane fans") {
  auto c = build_epg_comb(parse_set_expr("pt(0)+pt(1/2)+pt(3/4)"), 3, 4);
  testgen::Rng r(3);
  for (int it = 0; it < 50; ++it) {
    const auto& b = c.blades()[r.below(c.size())];
    FanPoint t = it == 0 ? FanPoint::top() : FanPoint::on(b.index, b.tip * frac(1 + r.below(8), 8));
    auto rep = smoothness_scan(c, t);
    CAPTURE(to_string(t));
    CHECK(rep.converges);
  }
  CHECK_THROWS_AS(smoothness_scan(c, FanPoint::top(), "bogus"), ArgumentError);
}

TEST_CASE("spatial model has a non-smooth witness") {
  auto sm = build_nonsmooth_3d(15, 3, 4);
  SpatialPoint target{SpatialPoint::Base{BladeIndex{}, Rational(3, 4)}};
  CHECK(sm.base.at(BladeIndex{}).kind == BladeKind::TypeI);
  auto rep = smoothness_scan(sm, target, "sheet-descent");
  CHECK(rep.sequence.size() >= 3);
  CHECK_FALSE(rep.converges);
  CHECK(rep.witness_gap >= 0.2);

  auto top = smoothness_scan(sm, SpatialPoint{SpatialPoint::Top{}}, "sheet-descent");
  CHECK(top.converges);

  auto small = build_nonsmooth_3d(2, 2, 2);
  CHECK_THROWS_AS(smoothness_scan(small, SpatialPoint{SpatialPoint::Base{BladeIndex{}, Rational(3, 4)}}, "sheet-descent"),
                  NoSequenceError);
}
