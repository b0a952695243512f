#include <doctest.h>

#include <set>

#include "fanforge/comb.hpp"
#include "fanforge/construct.hpp"
#include "fanforge/errors.hpp"

using namespace fanforge;

namespace {

const char* kFig = "pt(0)+pt(1/2)+pt(3/4)";

std::vector<std::string> battery() {
  return {kFig, "pt(0)+har(0,1,above,2)", "pt(0)+iv(1/4,1/2)", "pt(0)+biseq(0,1/2,1/2)+pt(3/4)",
          "pt(0)+geo(0,1/2,1/3,above)+iv(2/3,4/5)"};
}

// independent formula evaluation
Rational oracle_tip(const ClosedSetDesc& X, const std::vector<int>& path) {
  Rational M = max_value(X), t = 1;
  int S = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    t *= dense_sequence(X, path[i]);
    if (i + 1 < path.size()) S += path[i];
  }
  for (int i = 0; i < S; ++i) t *= M;
  return t;
}

}  // namespace

TEST_CASE("build_epg_comb reproduces the figure") {
  auto X = parse_set_expr(kFig);
  auto c = build_epg_comb(X, 2, 3);
  const auto& b1 = c.at(BladeIndex{{1}, {}});
  CHECK(b1.x == Rational(2, 3));
  CHECK(b1.tip == Rational(3, 4));
  const auto& b11 = c.at(BladeIndex{{1, 1}, {}});
  CHECK(b11.x == Rational(8, 9));
  CHECK(b11.tip == Rational(27, 64));
  const auto& b12 = c.at(BladeIndex{{1, 2}, {}});
  CHECK(b12.x == Rational(2, 3) + Rational(2, 27));
  CHECK(b12.tip == Rational(9, 32));
  const auto& b21 = c.at(BladeIndex{{2, 1}, {}});
  CHECK(b21.tip == Rational(3, 4) * Rational(3, 4) * Rational(1, 2) * Rational(3, 4));
  CHECK(c.at(BladeIndex{{2}, {}}).x == Rational(2, 9));
  CHECK(c.at(BladeIndex{{3}, {}}).x == Rational(2, 27));
  CHECK(c.at(BladeIndex{{3}, {}}).tip == Rational(3, 4));
}

TEST_CASE("build_epg_comb preconditions") {
  CHECK_THROWS_AS(build_epg_comb(parse_set_expr("pt(0)+pt(1)"), 2, 2), HypothesisError);
  CHECK_THROWS_AS(build_epg_comb(parse_set_expr("pt(1/2)"), 2, 2), HypothesisError);
  CHECK_THROWS_AS(build_epg_comb(parse_set_expr("pt(0)"), 2, 2), HypothesisError);
}

TEST_CASE("property: constructed combs are valid and match the formulas") {
  for (const auto& e : battery()) {
    auto X = parse_set_expr(e);
    Rational M = max_value(X);
    for (int K = 1; K <= 4; ++K)
      for (int N : {1, 3, 5}) {
        if (K == 4 && N == 5) continue;
        auto c = build_epg_comb(X, K, N);
        CAPTURE(e);
        CAPTURE(K);
        CAPTURE(N);
        if (c.size() >= 3) CHECK(validate_comb(c).empty());
        std::size_t expect = 1, lvl = 1;
        for (int k = 1; k <= K; ++k) expect += (lvl *= N);
        CHECK(c.size() == expect);
        for (const auto& b : c.blades()) {
          int k = static_cast<int>(b.index.length());
          if (k >= 1) CHECK(b.tip <= pow(M, k - 1));
          CHECK(b.tip == oracle_tip(X, b.index.path));
          CHECK(*b.trace_scale * M < b.tip);
          if (k >= 1) {
            // the child sits inside the parent's cell
            BladeIndex parent{std::vector<int>(b.index.path.begin(), b.index.path.end() - 1), {}};
            const auto& p = c.at(parent);
            CHECK(b.x > p.x);
            CHECK(b.x < p.x + pow3_inv(parent.sum()));
          }
        }
      }
  }
  CHECK(validate_comb(build_epg_comb(parse_set_expr(kFig), 5, 8)).empty());
}

TEST_CASE("build_product") {
  auto p = build_product(parse_set_expr("pt(0)+pt(1)"), 2, 4, 1);
  CHECK(p.base.meta().provenance == Provenance::Canonical);
  CHECK(p.base.size() == 5);
  CHECK(p.flatten().size() == 10);
  auto q = build_product(parse_set_expr("pt(0)+pt(1/2)+pt(1)"), 2, 3, 2);
  CHECK(q.size() == q.base.size() * 4);
  auto f = q.flatten();
  CHECK(f.size() == q.base.size() * 4);
  CHECK(validate_comb(f).empty());
  for (const auto& b : f.blades()) {
    auto [bx, w] = deinterleave_x(b.x, 2);
    CHECK(w == b.index.word);
    const auto& base = q.base.at(BladeIndex{b.index.path, {}});
    CHECK(bx == base.x);
    CHECK(b.tip == base.tip);
  }
  auto z = build_product(parse_set_expr("pt(0)+pt(1/2)+pt(1)"), 2, 3, 0);
  auto fz = z.flatten();
  REQUIRE(fz.size() == z.base.size());
  for (std::size_t i = 0; i < fz.size(); ++i) {
    CHECK(fz.blades()[i].x == z.base.blades()[i].x);
    CHECK(fz.blades()[i].tip == z.base.blades()[i].tip);
  }
  auto back = unflatten(f);
  CHECK(back.base.blades() == q.base.blades());
  CHECK_THROWS_AS(build_product(parse_set_expr("pt(0)+pt(1/2)"), 2, 2, 1), HypothesisError);
}

TEST_CASE("interleaving") {
  CHECK(interleave_x(Rational(2, 3), "2") == Rational(8, 9));
  CHECK(interleave_x(Rational(2, 3), "0") == Rational(2, 3));
  CHECK(interleave_x(0, "02") == Rational(2, 81));
  auto [x, w] = deinterleave_x(Rational(2, 81) + Rational(2, 3), 2);
  CHECK(x == Rational(2, 3));
  CHECK(w == "02");
}

TEST_CASE("build_canonical") {
  auto nod = build_canonical({CanonicalKind::Nod, 3}, 1, 1);
  CHECK(nod.size() == 3);
  for (const auto& b : nod.blades()) CHECK(b.tip == 1);
  CHECK_THROWS_AS(build_canonical({CanonicalKind::Nod, 2}, 1, 1), ArgumentError);

  auto star = build_canonical({CanonicalKind::Star}, 1, 4);
  std::set<Rational> ts;
  for (const auto& b : star.blades()) ts.insert(b.tip);
  CHECK(ts == std::set<Rational>{1, Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 16)});
  CHECK(star.at(BladeIndex{{3}, {}}).x == Rational(2, 27));

  auto cantor = build_canonical({CanonicalKind::Cantor}, 3, 1);
  CHECK(cantor.size() == 8);
  for (const auto& b : cantor.blades()) CHECK(b.tip == 1);

  auto lelek = build_canonical({CanonicalKind::Lelek}, 2, 4);
  CHECK(lelek.size() == 21);
  CHECK(validate_comb(lelek).empty());
  CHECK(lelek.at(BladeIndex{{2}, {}}).tip == Rational(1, 2));
  CHECK(lelek.at(BladeIndex{{2, 3}, {}}).tip == Rational(1, 8));
}

TEST_CASE("lelek tips get denser as the truncation grows") {
  // largest distance from a grid of comb points to the nearest tip
  auto eps = [](const Comb& c) {
    Rational worst = 0;
    for (const auto& b : c.blades()) {
      if (b.index.length() > 1) continue;
      for (int k = 1; k <= 8; ++k) {
        Rational y = b.tip * frac(k, 8);
        Rational best = 2;
        for (const auto& o : c.blades())
          if (o.index.path.size() >= 1 && o.index.extends(b.index) && o.index != b.index)
            best = rmin(best, rmax(o.x - b.x, rabs(o.tip - y)));
        worst = rmax(worst, best);
      }
    }
    return worst;
  };
  Rational e1 = eps(build_canonical({CanonicalKind::Lelek}, 2, 4));
  Rational e2 = eps(build_canonical({CanonicalKind::Lelek}, 2, 8));
  CHECK(e2 < e1);
  CHECK(e2 <= Rational(1, 8));
}

TEST_CASE("basic cells and sheet maps") {
  CHECK(basic_cell(1) == "");
  CHECK(basic_cell(2) == "0");
  CHECK(basic_cell(3) == "2");
  CHECK(basic_cell(4) == "00");
  CHECK(basic_cell(7) == "22");
  CHECK(basic_cell(8) == "000");
  CHECK(cell_left("2") == Rational(2, 3));
  CHECK(sheet_phi("", 0) == Rational(8, 9));
  CHECK(sheet_phi("0", Rational(2, 3)) == Rational(8, 27) + Rational(2, 3 * 3 * 3 * 3 * 3));
  for (int n = 1; n <= 7; ++n)
    for (const auto& x : {Rational(0), Rational(2, 3), Rational(8, 9), Rational(2, 27)}) {
      auto cell = basic_cell(n);
      Rational y = sheet_phi(cell, x);
      CHECK(in_sheet_ground_set(cell, y));
      CHECK(y >= cell_left(cell));
      CHECK(y < cell_left(cell) + pow3_inv(static_cast<long>(cell.size())));
    }
  CHECK_FALSE(in_sheet_ground_set("", Rational(2, 3)));
}

TEST_CASE("sheet ground sets are nowhere dense and pairwise disjoint") {
  // inside K_n every length-2 continuation after the marker forbids digit 2 at odd offsets
  for (int n = 1; n <= 7; ++n) {
    auto cell = basic_cell(n);
    Rational probe = cell_left(cell) + pow3_inv(static_cast<long>(cell.size()) + 2) * 8 +
                     2 * pow3_inv(static_cast<long>(cell.size()) + 3);
    CHECK_FALSE(in_sheet_ground_set(cell, probe));
  }
  auto lel = build_canonical({CanonicalKind::Lelek}, 2, 3);
  for (int a = 1; a <= 7; ++a)
    for (int b = 1; b <= 7; ++b) {
      if (a == b) continue;
      for (const auto& bl : lel.blades()) CHECK_FALSE(in_sheet_ground_set(basic_cell(b), sheet_phi(basic_cell(a), bl.x)));
    }
}

TEST_CASE("build_nonsmooth_3d") {
  auto sm = build_nonsmooth_3d(4, 3, 4);
  CHECK(sm.sheets.size() == 4);
  CHECK(sm.base.size() == 8);
  for (const auto& s : sm.sheets)
    for (const auto& b : s.blades) {
      REQUIRE(b.polyline.size() == 3);
      const auto& tip = b.polyline.back();
      CHECK(tip.z <= Rational(1, 2 * s.n));
      CHECK(tip.y >= Rational(1, 2));
      CHECK(tip.y <= 1);
      CHECK(tip.y == 1 - b.tip / 2);
      CHECK(tip.z == b.tip / (2 * s.n));
      CHECK(tip.x == sheet_phi(s.cell, b.x));
    }
  int typeI = 0;
  for (const auto& b : sm.base.blades()) typeI += b.kind == BladeKind::TypeI;
  CHECK(typeI >= 1);
}

TEST_CASE("selected sheet tips are dense at complete cell levels") {
  for (int m : {1, 3, 7, 15}) {
    auto sm = build_nonsmooth_3d(m, 2, 2);
    int levels = 0;
    while ((1 << (levels + 1)) - 1 <= m) ++levels;
    Rational delta = pow3_inv(levels - 1);
    auto cantor = maximal_comb(5);
    for (const auto& b : cantor.blades()) {
      Rational best = 2;
      for (const auto& s : sm.sheets) best = rmin(best, rabs(s.blades.front().polyline.front().x - b.x));
      CHECK(best <= delta);
    }
  }
}
