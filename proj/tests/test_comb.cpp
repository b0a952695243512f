#include <doctest.h>

#include "fanforge/comb.hpp"
#include "fanforge/construct.hpp"
#include "fanforge/errors.hpp"

using namespace fanforge;

namespace {

Comb fig(int K, int N) { return build_epg_comb(parse_set_expr("pt(0)+pt(1/2)+pt(3/4)"), K, N); }

bool has_clause(const std::vector<Violation>& v, const std::string& c) {
  for (const auto& x : v)
    if (x.clause == c) return true;
  return false;
}

}  // namespace

TEST_CASE("index coordinates") {
  CHECK(index_x({1}) == Rational(2, 3));
  CHECK(index_x({1, 1}) == Rational(8, 9));
  CHECK(index_x({1, 2}) == Rational(2, 3) + Rational(2, 27));
  CHECK(index_x({}) == 0);
  CHECK(path_from_x(Rational(2, 3) + Rational(2, 27)) == std::vector<int>{1, 2});
  CHECK_THROWS_AS(path_from_x(Rational(1, 3)), ArgumentError);
}

TEST_CASE("validate_comb") {
  CHECK(validate_comb(maximal_comb(3)).empty());
  std::vector<Blade> two{Blade{{}, 0, 1, {}, BladeKind::Plain}, Blade{{{1}, {}}, Rational(2, 3), 1, {}, BladeKind::Plain}};
  CHECK(has_clause(validate_comb(Comb(two, {})), "clause-4"));
  auto dup = two;
  dup.push_back(Blade{{{2}, {}}, Rational(2, 3), 1, {}, BladeKind::Plain});
  CHECK(has_clause(validate_comb(Comb(dup, {})), "distinctness"));
  auto bad = two;
  bad.push_back(Blade{{{5}, {}}, Rational(1, 3), 1, {}, BladeKind::Plain});
  CHECK(has_clause(validate_comb(Comb(bad, {})), "clause-2"));
  auto low = two;
  low.push_back(Blade{{{2}, {}}, Rational(2, 9), 0, {}, BladeKind::Plain});
  CHECK(has_clause(validate_comb(Comb(low, {})), "clause-3"));
}

TEST_CASE("maximal_comb") {
  auto c1 = maximal_comb(1);
  CHECK(c1.size() == 2);
  CHECK(c1.blades()[1].x == Rational(2, 3));
  auto c2 = maximal_comb(2);
  std::vector<Rational> xs;
  for (const auto& b : c2.blades()) xs.push_back(b.x);
  CHECK(xs == std::vector<Rational>{0, Rational(2, 9), Rational(2, 3), Rational(8, 9)});
  CHECK(maximal_comb(3).size() == 8);
  auto c3 = maximal_comb(3);
  for (const auto& b : c3.blades()) CHECK(b.tip == 1);
  CHECK(c2.meta().provenance == Provenance::Maximal);
}

TEST_CASE("level_set") {
  CHECK(level_set(maximal_comb(2), 1).size() == 4);
  auto c = fig(2, 2);
  auto ls = level_set(c, Rational(1, 2));
  CHECK(std::count(ls.begin(), ls.end(), Rational(0)) == 1);
  CHECK(std::count(ls.begin(), ls.end(), Rational(2, 3)) == 1);
  CHECK(std::count(ls.begin(), ls.end(), Rational(8, 9)) == 0);
  Rational top = 0;
  for (const auto& b : c.blades())
    if (!b.index.path.empty()) top = rmax(top, b.tip);
  CHECK(level_set(c, top + Rational(1, 1000)) == std::vector<Rational>{0});
}

TEST_CASE("level_set is antitone") {
  auto c = fig(3, 4);
  std::vector<Rational> ys{Rational(1, 100), Rational(1, 10), Rational(1, 4), Rational(1, 2), Rational(3, 4), 1};
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    auto a = level_set(c, ys[i]), b = level_set(c, ys[i + 1]);
    CHECK(std::includes(a.begin(), a.end(), b.begin(), b.end()));
  }
}

TEST_CASE("phi_blade") {
  auto c = fig(2, 4);
  auto id = phi_blade(c, BladeIndex{});
  CHECK(id.is_identity());
  auto f = phi_blade(c, BladeIndex{{1}, {}});
  CHECK(c.at(BladeIndex{{1}, {}}).trace_scale == Rational(9, 16));
  CHECK(f(Rational(3, 4)) == Rational(27, 64));
  CHECK(f(1) == Rational(3, 4));
  CHECK_THROWS_AS(phi_blade(maximal_comb(2), BladeIndex{}), MetadataError);
  for (const auto& b : c.blades()) {
    auto g = phi_blade(c, b.index);
    CHECK(g(0) == 0);
    CHECK(g(1) == b.tip);
    CHECK(g.breakpoints().size() <= 3);
    for (const auto& u : {Rational(0), Rational(1, 2), Rational(3, 4)}) CHECK(g(u) == *b.trace_scale * u);
  }
}

TEST_CASE("tips") {
  auto t = tips(maximal_comb(1));
  CHECK(t == std::vector<std::pair<Rational, Rational>>{{0, 1}, {Rational(2, 3), 1}});
  auto c = fig(1, 2);
  auto tt = tips(c);
  std::sort(tt.begin(), tt.end());
  CHECK(tt == std::vector<std::pair<Rational, Rational>>{
                  {0, 1}, {Rational(2, 9), Rational(1, 2)}, {Rational(2, 3), Rational(3, 4)}});
  CHECK(tips(fig(3, 3)).size() == fig(3, 3).size());
}

TEST_CASE("check_point") {
  auto c = fig(1, 2);
  CHECK_NOTHROW(check_point(c, FanPoint::top()));
  CHECK_NOTHROW(check_point(c, FanPoint::on(BladeIndex{{1}, {}}, Rational(3, 4))));
  CHECK_THROWS_AS(check_point(c, FanPoint::on(BladeIndex{{1}, {}}, Rational(4, 5))), InvalidPointError);
  CHECK_THROWS_AS(check_point(c, FanPoint::on(BladeIndex{{7}, {}}, Rational(1, 5))), InvalidPointError);
  CHECK_THROWS_AS(check_point(c, FanPoint::on(BladeIndex{}, 0)), InvalidPointError);
}
