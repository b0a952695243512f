#include <doctest.h>

#include <algorithm>
#include <set>

#include "fanforge/analyze.hpp"
#include "fanforge/errors.hpp"
#include "fanforge/homeo.hpp"
#include "gen.hpp"

using namespace fanforge;

namespace {

const char* kFig = "pt(0)+pt(1/2)+pt(3/4)";

Comb fig(int K, int N) { return build_epg_comb(parse_set_expr(kFig), K, N); }

BladeIndex idx(std::vector<int> p) { return BladeIndex{std::move(p), {}}; }

FanPoint tip_of(const Comb& c, const BladeIndex& i) { return FanPoint::on(i, c.at(i).tip); }

std::set<std::pair<BladeIndex, Rational>> tip_set(const Comb& c) {
  std::set<std::pair<BladeIndex, Rational>> s;
  for (const auto& b : c.blades()) s.emplace(b.index, b.tip);
  return s;
}

// Points of blades with index length <= 2, at the images of pullbacks us.
std::vector<FanPoint> battery(const Comb& c, const std::vector<Rational>& us) {
  Evaluator ev(c);
  std::vector<FanPoint> pts;
  for (const auto& b : c.blades()) {
    if (b.index.length() > 2) continue;
    auto phi = ev.phi(b.index.path);
    for (const auto& u : us) pts.push_back(FanPoint::on(b.index, phi(u)));
    pts.push_back(FanPoint::on(b.index, b.tip));
  }
  pts.push_back(FanPoint::top());
  return pts;
}

}  // namespace

TEST_CASE("self-similar map on the figure comb") {
  auto c = fig(4, 5);
  Evaluator ev(c);
  CHECK(c.at(idx({1, 1})).x == frac(8, 9));
  CHECK(c.at(idx({1, 1})).tip == frac(27, 64));
  CHECK(ev.self_similar_inverse(idx({1}), ev.self_similar(idx({1}), tip_of(c, idx({1, 1})))) ==
        tip_of(c, idx({1, 1})));
  CHECK(self_similar_map(c, idx({1}), tip_of(c, idx({1, 1}))) == FanPoint::on(idx({1}), frac(3, 4)));
  CHECK(self_similar_map(c, idx({1}), FanPoint::on(idx({1}), frac(27, 64))) == FanPoint::on(idx({}), frac(3, 4)));
  CHECK(self_similar_map(c, idx({1}), FanPoint::on(idx({1}), frac(3, 4))) == FanPoint::on(idx({}), 1));
  CHECK_THROWS_AS(self_similar_map(c, idx({1}), FanPoint::on(idx({2}), frac(1, 8))), DomainError);
  CHECK(self_similar_map(c, idx({1}), FanPoint::top()) == FanPoint::top());
}

TEST_CASE("seam consistency of the self-similar map") {
  auto c = fig(4, 5);
  Evaluator ev(c);
  const auto& e = ev.engine();
  for (const auto& b : c.blades()) {
    if (b.index.path.empty() || b.index.length() > 2) continue;
    Rational m = e.m(b.index.path), tip = e.tip(b.index.path);
    // lower formula at y = m and the upper formula's limit agree on (0, M)
    CHECK(ev.self_similar(b.index, FanPoint::on(b.index, m)) == FanPoint::on(idx({}), e.M()));
    Rational upper_at_m = e.M() + (1 - e.M()) / (tip - m) * (m - m);
    CHECK(upper_at_m == e.M());
    CHECK(m < tip);
  }
}

TEST_CASE("tip-shift identity") {
  auto c = fig(4, 5);
  auto r = verify_tip_shift_identity(c, idx({1}), 5);
  CHECK(r.pass);
  CHECK(r.checked > 0);
  auto c2 = fig(3, 4);
  CHECK(verify_tip_shift_identity(c2, idx({2}), 4).pass);
  auto c3 = build_epg_comb(parse_set_expr("pt(0)+har(0,1/2,above,2)"), 4, 5);
  for (const auto& b : c3.blades())
    if (b.index.length() >= 1 && b.index.length() <= 2) CHECK(verify_tip_shift_identity(c3, b.index, 5).pass);

  // corrupt one tip
  std::vector<Blade> blades = c.blades();
  for (auto& b : blades)
    if (b.index == idx({1, 3})) b.tip += frac(1, 1 << 20);
  Comb bad(blades, c.meta());
  auto rb = verify_tip_shift_identity(bad, idx({1}), 5);
  CHECK_FALSE(rb.pass);
  REQUIRE(rb.counterexample);
  CHECK(*rb.counterexample == idx({1, 3}));
}

TEST_CASE("endpoint swap of (1) and (2)") {
  auto c = fig(3, 5);
  Evaluator ev(c);
  CHECK_THROWS_AS(endpoint_swap(c, idx({1}), idx({1})), ArgumentError);
  auto d = endpoint_swap(c, idx({1}), idx({2}));
  CHECK(d.kind == CellMapDescriptor::Kind::EndpointSwap);
  CHECK(d.params.at("m1") < d.params.at("e1"));
  for (int j = 1; j <= 5; ++j) CHECK(ev.apply(d, tip_of(c, idx({1, j}))) == tip_of(c, idx({2, j})));
  CHECK(ev.apply(d, tip_of(c, idx({1}))) == tip_of(c, idx({2})));

  auto tips = tip_set(c);
  std::set<std::pair<BladeIndex, Rational>> image;
  for (const auto& [i, t] : tips) {
    auto z = ev.apply(d, FanPoint::on(i, t));
    CHECK(ev.apply(d, z) == FanPoint::on(i, t));
    if (!in_swap_domain(d, i) && !in_swap_image(d, i)) CHECK(z == FanPoint::on(i, t));
    image.emplace(z.blade().index, z.blade().height);
  }
  CHECK(image == tips);
}

TEST_CASE("endpoint swap of nested cells") {
  auto c = fig(3, 4);
  Evaluator ev(c);
  auto d = endpoint_swap(c, idx({1}), idx({1, 2}));
  REQUIRE(d.split);
  CHECK(ev.apply(d, tip_of(c, idx({1}))) == tip_of(c, idx({1, 2})));
  CHECK(ev.apply(d, tip_of(c, idx({1, 2}))) == tip_of(c, idx({1})));
  CHECK_THROWS_AS(endpoint_swap(build_epg_comb(parse_set_expr(kFig), 2, 3), idx({1}), idx({4})), CellOverlapError);
}

TEST_CASE("property: random equal-length swaps are tip bijections and involutions") {
  auto c = fig(3, 4);
  Evaluator ev(c);
  auto tips = tip_set(c);
  std::vector<BladeIndex> len2;
  for (const auto& b : c.blades())
    if (b.index.length() == 2) len2.push_back(b.index);
  testgen::Rng rng(17);
  for (int t = 0; t < 6; ++t) {
    auto i1 = len2[static_cast<std::size_t>(rng.below(static_cast<long>(len2.size())))];
    auto i2 = len2[static_cast<std::size_t>(rng.below(static_cast<long>(len2.size())))];
    if (i1 == i2) continue;
    auto d = endpoint_swap(c, i1, i2);
    std::set<std::pair<BladeIndex, Rational>> image;
    for (const auto& [i, h] : tips) {
      auto z = ev.apply(d, FanPoint::on(i, h));
      CHECK(ev.apply(d, z) == FanPoint::on(i, h));
      image.emplace(z.blade().index, z.blade().height);
    }
    CHECK(image == tips);
  }
}

TEST_CASE("endpoint swap preserves partition labels") {
  PartitionScheme s{PartitionScheme::Odd, 2};
  auto c = build_epg_comb(scheme_set(s), 3, 5);
  Evaluator ev(c);
  auto pts = battery(c, {frac(1, 6), frac(1, 3), frac(1, 2), frac(2, 3), frac(5, 6)});
  for (auto [a, b] : std::vector<std::pair<BladeIndex, BladeIndex>>{{idx({1}), idx({2})}, {idx({3}), idx({1, 1})}}) {
    auto d = endpoint_swap(c, a, b);
    for (const auto& p : pts) CHECK(ev.label(ev.apply(d, p), s) == ev.label(p, s));
  }
}

TEST_CASE("vertical adjust") {
  PartitionScheme s{PartitionScheme::Odd, 1};
  auto c = build_epg_comb(scheme_set(s), 4, 10);
  Evaluator ev(c);
  auto id = vertical_adjust(c, idx({}), frac(2, 3), frac(2, 3), frac(1, 100));
  CHECK(id.kind == CellMapDescriptor::Kind::Identity);

  // D(1) on the leftmost blade: pullbacks above a_1 = 1/2
  auto d = vertical_adjust(c, idx({}), frac(3, 5), frac(4, 5), frac(1, 20));
  CHECK(d.kind == CellMapDescriptor::Kind::VerticalAdjust);
  CHECK(ev.apply(d, FanPoint::on(idx({}), frac(3, 5))) == FanPoint::on(idx({}), frac(4, 5)));
  CHECK(ev.apply(d, FanPoint::on(idx({}), frac(1, 2))) == FanPoint::on(idx({}), frac(1, 2)));
  CHECK(ev.apply(d, FanPoint::on(idx({}), frac(9, 10))) == FanPoint::on(idx({}), frac(9, 10)));
  // strictly increasing along the blade
  Rational prev = 0;
  for (int k = 1; k < 64; ++k) {
    auto z = ev.apply(d, FanPoint::on(idx({}), frac(k, 64)));
    CHECK(z.blade().height > prev);
    prev = z.blade().height;
  }
  CHECK_THROWS_AS(vertical_adjust(c, idx({}), frac(2, 5), frac(3, 5), frac(1, 50)), TraceCollisionError);
  CHECK_THROWS_AS(vertical_adjust(c, idx({}), frac(3, 5), frac(4, 5), frac(1, 4)), TraceCollisionError);
}

TEST_CASE("blade shift on the even comb") {
  PartitionScheme s{PartitionScheme::Even, 1};
  auto c = build_epg_comb(scheme_set(s), 4, 10);
  Evaluator ev(c);
  BiSeq run{0, frac(1, 2), frac(1, 2)};
  for (long shift : {1L, 2L}) {
    auto d = blade_shift(c, 0, shift);
    CHECK(ev.apply(d, FanPoint::on(idx({}), run.term(0))) == FanPoint::on(idx({}), run.term(shift)));
    for (long k = -6; k <= 6; ++k) CHECK(d.map(run.term(k)) == run.term(k + shift));
    // fixes [a_1, 1] on the leftmost blade
    for (int t = 0; t <= 16; ++t) {
      Rational y = frac(1, 2) + frac(t, 32);
      CHECK(ev.apply(d, FanPoint::on(idx({}), y)) == FanPoint::on(idx({}), y));
    }
    // order preserving on touched blades
    for (int n = 1; n <= 4; ++n) {
      Rational tip = c.at(idx({n})).tip, prev = 0;
      BladeIndex to;
      for (int t = 1; t <= 32; ++t) {
        auto z = ev.apply(d, FanPoint::on(idx({n}), tip * frac(t, 32)));
        if (t == 1) to = z.blade().index;
        CHECK(z.blade().index == to);
        CHECK(z.blade().height > prev);
        prev = z.blade().height;
      }
      CHECK(to == idx({static_cast<int>(ev.psi(d, n))}));
    }
  }
  CHECK(blade_shift(c, 2, 2).kind == CellMapDescriptor::Kind::Identity);
  CHECK_THROWS_AS(blade_shift(c, 0, 7), WindowError);
  CHECK_THROWS_AS(blade_shift(fig(3, 4), 0, 1), SchemeMismatchError);
}

TEST_CASE("blade shift ψ sends Y_k to Y_{k+s}") {
  PartitionScheme s{PartitionScheme::Even, 1};
  auto c = build_epg_comb(scheme_set(s), 4, 10);
  Evaluator ev(c);
  auto d = blade_shift(c, -1, 1);
  std::set<long> seen;
  for (long n = 1; n <= 64; ++n) {
    long p = ev.psi(d, n);
    CHECK(seen.insert(p).second);
    CHECK(ev.engine().y(p) == d.map(ev.engine().y(n)));
  }
}

TEST_CASE("blade shift continuity report") {
  PartitionScheme s{PartitionScheme::Even, 1};
  auto c = build_epg_comb(scheme_set(s), 4, 10);
  for (long shift : {1L, 2L}) {
    auto r = blade_shift_continuity(c, blade_shift(c, 0, shift), 9);
    REQUIRE(r.scale_max.size() == 9);
    for (std::size_t j = 1; j < r.scale_max.size(); ++j) CHECK(r.scale_max[j] < r.scale_max[j - 1]);
    for (std::size_t j = 2; j < r.scale_max.size(); ++j) CHECK(r.scale_max[j] * 2 <= r.scale_max[j - 2]);
  }
}

TEST_CASE("orbit witness examples") {
  PartitionScheme odd{PartitionScheme::Odd, 1};
  auto c = build_epg_comb(scheme_set(odd), 4, 10);
  Evaluator ev(c);
  auto e = orbit_witness(c, tip_of(c, idx({1})), tip_of(c, idx({2, 1})), odd);
  REQUIRE(e.steps.size() == 1);
  CHECK(e.steps[0].kind == CellMapDescriptor::Kind::EndpointSwap);
  CHECK(orbit_witness(c, FanPoint::top(), FanPoint::top(), odd).steps.empty());

  auto v = orbit_witness(c, FanPoint::on(idx({}), frac(3, 5)), FanPoint::on(idx({}), frac(4, 5)), odd);
  REQUIRE(v.steps.size() == 1);
  CHECK(v.steps[0].kind == CellMapDescriptor::Kind::VerticalAdjust);
  CHECK_THROWS_AS(orbit_witness(c, FanPoint::on(idx({}), frac(1, 2)), FanPoint::on(idx({}), frac(3, 5)), odd),
                  RefusalError);
  CHECK_THROWS_AS(orbit_witness(c, FanPoint::top(), tip_of(c, idx({1})), odd), RefusalError);

  PartitionScheme even{PartitionScheme::Even, 1};
  auto ce = build_epg_comb(scheme_set(even), 4, 10);
  BiSeq run{0, frac(1, 2), frac(1, 2)};
  auto l = orbit_witness(ce, FanPoint::on(idx({}), run.term(0)), FanPoint::on(idx({}), run.term(2)), even);
  REQUIRE(l.steps.size() == 1);
  CHECK(l.steps[0].kind == CellMapDescriptor::Kind::BladeShift);
  CHECK(l.steps[0].j - l.steps[0].i == 2);
}

TEST_CASE("property: orbit witness recipes preserve labels") {
  for (auto s : {PartitionScheme{PartitionScheme::Odd, 2}, PartitionScheme{PartitionScheme::Even, 1}}) {
    auto c = build_epg_comb(scheme_set(s), 4, 8);
    Evaluator ev(c);
    auto cut = scheme_cutpoints(c, s);
    std::vector<Rational> us(cut.begin(), cut.end());
    for (auto u : {frac(5, 8), frac(7, 8), frac(3, 4)}) us.push_back(u);
    if (s.parity == PartitionScheme::Even) {
      BiSeq run{0, frac(1, 2), frac(1, 2)};
      for (long k = -1; k <= 2; ++k) {
        us.push_back(run.term(k));
        us.push_back((run.term(k) + run.term(k + 1)) / 2);
      }
    }
    auto pts = battery(c, us);
    std::vector<FanPoint> sample;
    for (const auto& p : pts)
      if (p.is_top() || p.blade().index.length() <= 1) sample.push_back(p);
    testgen::Rng rng(5);
    int built = 0;
    for (int t = 0; t < 400 && built < 10; ++t) {
      const auto& p = pts[static_cast<std::size_t>(rng.below(static_cast<long>(pts.size())))];
      const auto& q = pts[static_cast<std::size_t>(rng.below(static_cast<long>(pts.size())))];
      if (!(ev.label(p, s) == ev.label(q, s))) continue;
      auto r = orbit_witness(c, p, q, s);
      ++built;
      CHECK(ev.apply(r, p) == q);
      for (const auto& z : sample) CHECK(ev.label(ev.apply(r, z), s) == ev.label(z, s));
    }
    CHECK(built == 10);
  }
}
