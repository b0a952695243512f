#include "fanforge/homeo.hpp"

#include <algorithm>
#include <cmath>

#include "fanforge/analyze.hpp"
#include "fanforge/errors.hpp"
#include "fanforge/geometry.hpp"

namespace fanforge {

std::string to_string(CellMapDescriptor::Kind k) {
  switch (k) {
    case CellMapDescriptor::Kind::Identity: return "identity";
    case CellMapDescriptor::Kind::SelfSimilar: return "self_similar";
    case CellMapDescriptor::Kind::EndpointSwap: return "endpoint_swap";
    case CellMapDescriptor::Kind::VerticalAdjust: return "vertical_adjust";
    default: return "blade_shift";
  }
}

std::string Recipe::describe() const {
  if (steps.empty()) return "identity";
  std::string s;
  for (const auto& d : steps) {
    if (!s.empty()) s += " ; ";
    s += to_string(d.kind);
    switch (d.kind) {
      case CellMapDescriptor::Kind::EndpointSwap: s += " " + to_string(d.idx1) + "<->" + to_string(d.idx2); break;
      case CellMapDescriptor::Kind::VerticalAdjust:
        s += " " + to_string(d.idx1) + " " + to_string(d.y1) + "->" + to_string(d.y2);
        break;
      case CellMapDescriptor::Kind::BladeShift: s += " " + std::to_string(d.i) + "->" + std::to_string(d.j); break;
      case CellMapDescriptor::Kind::SelfSimilar: s += " " + to_string(d.idx1); break;
      default: break;
    }
  }
  return s;
}

namespace {

EpgEngine engine_checked(const Comb& c) {
  if (c.meta().provenance != Provenance::EpgConstruction)
    throw MetadataError("homeomorphisms need a comb from the self-similar construction");
  return engine_for(c);
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r(a);
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

const BiSeq& run_of(const Comb& c) {
  const auto& src = c.meta().source;
  const BiSeq* run = nullptr;
  if (src)
    for (const auto& a : src->atoms())
      if (const auto* b = std::get_if<BiSeq>(&a)) {
        if (run) throw SchemeMismatchError("source has more than one two-sided run");
        run = b;
      }
  if (!run || run->lo != 0) throw SchemeMismatchError("blade shift needs a two-sided run accumulating at 0");
  return *run;
}

// exactness range of the stored φ
constexpr long kPhiRange = 40;

}  // namespace

Evaluator::Evaluator(const Comb& c) : comb_(&c), engine_(engine_checked(c)) {}

void Evaluator::check(const FanPoint& p) const {
  if (p.is_top()) return;
  const auto& ob = p.blade();
  if (!ob.index.word.empty()) throw InvalidPointError("product points are not supported here");
  for (int n : ob.index.path)
    if (n < 1) throw InvalidPointError("index entries must be positive");
  if (ob.height <= 0 || ob.height > tip(ob.index.path))
    throw InvalidPointError("height outside (0, tip] on blade " + to_string(ob.index));
}

PiecewiseLinearMap Evaluator::phi(const std::vector<int>& path) const {
  Rational M = engine_.M(), s = engine_.scale(path), e = engine_.tip(path);
  if (M == 0) return PiecewiseLinearMap({{0, 0}, {1, e}});
  return PiecewiseLinearMap({{0, 0}, {M, s * M}, {1, e}});
}

Rational Evaluator::pullback(const FanPoint& p) const {
  check(p);
  if (p.is_top()) return 0;
  return phi(p.blade().index.path).inverse_eval(p.blade().height);
}

PartitionLabel Evaluator::label(const FanPoint& p, const PartitionScheme& s) const {
  scheme_cutpoints(*comb_, s);
  check(p);
  if (p.is_top()) return {PartitionLabel::T, 0};
  if (p.blade().height == tip(p.blade().index.path)) return {PartitionLabel::E, 0};
  return label_pullback(*comb_, pullback(p), s);
}

FanPoint Evaluator::self_similar(const BladeIndex& idx, const FanPoint& p) const {
  check(p);
  if (p.is_top()) return p;
  const auto& ob = p.blade();
  if (!ob.index.extends(idx)) throw DomainError("point " + to_string(p) + " is outside the cell of " + to_string(idx));
  Rational M = engine_.M(), m = engine_.m(idx.path), e = engine_.tip(idx.path);
  std::vector<int> rest(ob.index.path.begin() + static_cast<long>(idx.length()), ob.index.path.end());
  const Rational& h = ob.height;
  if (!rest.empty() || h <= m) return FanPoint::on(BladeIndex{rest, {}}, M * h / m);
  return FanPoint::on(BladeIndex{}, M + (1 - M) / (e - m) * (h - m));
}

FanPoint Evaluator::self_similar_inverse(const BladeIndex& idx, const FanPoint& p) const {
  check(p);
  if (p.is_top()) return p;
  const auto& ob = p.blade();
  Rational M = engine_.M(), m = engine_.m(idx.path), e = engine_.tip(idx.path);
  const Rational& z = ob.height;
  BladeIndex to{concat(idx.path, ob.index.path), {}};
  if (!ob.index.path.empty() || z <= M) return FanPoint::on(to, z * m / M);
  return FanPoint::on(to, m + (z - M) * (e - m) / (1 - M));
}

bool in_swap_domain(const CellMapDescriptor& d, const BladeIndex& idx) {
  if (!idx.extends(d.idx1)) return false;
  return !d.split || idx.length() == d.idx1.length() || idx.path[d.idx1.length()] > *d.split;
}

bool in_swap_image(const CellMapDescriptor& d, const BladeIndex& idx) {
  if (!idx.extends(d.idx2)) return false;
  return !d.split || idx.length() == d.idx2.length() || idx.path[d.idx2.length()] > *d.split;
}

long Evaluator::psi(const CellMapDescriptor& d, long n) const {
  auto key = std::make_pair(d.j - d.i, n);
  if (auto it = psi_cache_.find(key); it != psi_cache_.end()) return it->second;
  long r = psi_uncached(d, n);
  psi_cache_.emplace(key, r);
  return r;
}

long Evaluator::psi_uncached(const CellMapDescriptor& d, long n) const {
  const auto& sched = *engine_.schedule();
  std::size_t t = sched.slot(n);
  const Rational& v = sched.enumeration().element(t);
  auto k = run_of(*comb_).index_of(v);
  if (!k) return n;
  Rational target = run_of(*comb_).term(*k + d.j - d.i);
  auto t2 = sched.enumeration().position(target);
  if (!t2) throw WindowError("p_" + std::to_string(*k + d.j - d.i) + " is not enumerated within the search limit");
  return sched.occurrence(*t2, sched.rank(n));
}

FanPoint Evaluator::apply(const CellMapDescriptor& d, const FanPoint& p) const {
  check(p);
  if (p.is_top()) return p;
  const auto& ob = p.blade();
  switch (d.kind) {
    case CellMapDescriptor::Kind::Identity: return p;
    case CellMapDescriptor::Kind::SelfSimilar: return self_similar(d.idx1, p);
    case CellMapDescriptor::Kind::EndpointSwap:
      if (in_swap_domain(d, ob.index)) return self_similar_inverse(d.idx2, self_similar(d.idx1, p));
      if (in_swap_image(d, ob.index)) return self_similar_inverse(d.idx1, self_similar(d.idx2, p));
      return p;
    case CellMapDescriptor::Kind::VerticalAdjust: {
      bool in = ob.index.extends(d.idx1) &&
                (ob.index.length() == d.idx1.length() || ob.index.path[d.idx1.length()] > d.column);
      return in ? FanPoint::on(ob.index, d.map(ob.height)) : p;
    }
    case CellMapDescriptor::Kind::BladeShift: {
      if (ob.index.path.empty()) return FanPoint::on(ob.index, d.map(ob.height));
      long n = ob.index.path[0];
      long pn = psi(d, n);
      if (pn > 1000000) throw WindowError("ψ(" + std::to_string(n) + ") is out of range");
      std::vector<int> to(ob.index.path);
      to[0] = static_cast<int>(pn);
      Rational cn = engine_.m({static_cast<int>(n)}), cp = engine_.m({static_cast<int>(pn)});
      if (ob.index.length() == 1 && ob.height >= cn) {
        Rational yn = engine_.y(n), yp = engine_.y(pn);
        Rational l = yn * (ob.height - cn) / (yn - cn);
        Rational v = d.map(l);
        return FanPoint::on(BladeIndex{to, {}}, cp + v * (yp - cp) / yp);
      }
      return FanPoint::on(BladeIndex{to, {}}, ob.height * cp / cn);
    }
  }
  return p;
}

FanPoint Evaluator::apply(const Recipe& r, const FanPoint& p) const {
  FanPoint q = p;
  for (const auto& d : r.steps) q = apply(d, q);
  return q;
}

FanPoint self_similar_map(const Comb& c, const BladeIndex& idx, const FanPoint& p) {
  return Evaluator(c).self_similar(idx, p);
}

TipShiftResult verify_tip_shift_identity(const Comb& c, const BladeIndex& k_index, int depth_limit) {
  Evaluator ev(c);
  TipShiftResult r;
  for (const auto& b : c.blades()) {
    if (!b.index.extends(k_index) || static_cast<int>(b.index.length()) > depth_limit) continue;
    ++r.checked;
    BladeIndex rest = b.index.suffix(k_index.length());
    const Blade* target = c.find(rest);
    bool ok = false;
    try {
      FanPoint img = ev.self_similar(k_index, FanPoint::on(b.index, b.tip));
      ok = target && !img.is_top() && img.blade().index == rest && img.blade().height == target->tip;
    } catch (const Error&) {
      ok = false;
    }
    if (!ok && r.pass) {
      r.pass = false;
      r.counterexample = b.index;
    }
  }
  return r;
}

CellMapDescriptor endpoint_swap(const Comb& c, const BladeIndex& idx1, const BladeIndex& idx2) {
  if (idx1 == idx2) throw ArgumentError("endpoint swap needs two distinct blades");
  Evaluator ev(c);
  for (const auto* idx : {&idx1, &idx2})
    if (!c.find(*idx)) {
      int need = static_cast<int>(idx->length()), branch = 0;
      for (int n : idx->path) branch = std::max(branch, n);
      throw CellOverlapError("blade " + to_string(*idx) + " is outside the truncation; needs depth >= " +
                             std::to_string(need) + " and branch >= " + std::to_string(branch));
    }
  CellMapDescriptor d;
  d.kind = CellMapDescriptor::Kind::EndpointSwap;
  d.idx1 = idx1;
  d.idx2 = idx2;
  // nested cells: keep only the part of the larger cell past the other index
  if (idx2.extends(idx1)) d.split = idx2.path[idx1.length()];
  else if (idx1.extends(idx2)) d.split = idx1.path[idx2.length()];
  if (in_swap_domain(d, idx2) || in_swap_image(d, idx1)) throw CellOverlapError("W meets its image");
  const auto& e = ev.engine();
  d.params["M"] = e.M();
  d.params["x1"] = index_x(idx1.path);
  d.params["x2"] = index_x(idx2.path);
  d.params["m1"] = e.m(idx1.path);
  d.params["m2"] = e.m(idx2.path);
  d.params["e1"] = e.tip(idx1.path);
  d.params["e2"] = e.tip(idx2.path);
  return d;
}

CellMapDescriptor vertical_adjust(const Comb& c, const BladeIndex& blade, const Rational& y1, const Rational& y2,
                                  const Rational& eps) {
  Evaluator ev(c);
  CellMapDescriptor d;
  d.idx1 = blade;
  d.y1 = y1;
  d.y2 = y2;
  d.eps = eps;
  if (y1 == y2) return d;
  if (eps <= 0) throw ArgumentError("eps must be positive");
  Rational tip = ev.tip(blade.path);
  Rational lo = rmin(y1, y2) - eps, hi = rmax(y1, y2) + eps;
  if (lo <= 0) throw ArgumentError("adjustment band reaches the top");
  if (hi >= tip) throw TraceCollisionError("adjustment band [" + to_string(lo) + ", " + to_string(hi) + "] reaches the tip");
  auto phi = ev.phi(blade.path);
  for (const auto& [a, b] : image_pieces(phi, *c.meta().source, eps / 64))
    if (a <= hi && b >= lo)
      throw TraceCollisionError("band meets the trace at [" + to_string(a) + ", " + to_string(b) + "]");
  if (c.find(blade))
    for (const auto& [a, b] : trace_extract(c, blade).heights)
      if (a <= hi && b >= lo)
        throw TraceCollisionError("band meets the approximate trace at [" + to_string(a) + ", " + to_string(b) + "]");
  Rational s = ev.engine().scale(blade.path), M = ev.engine().M();
  int r = 0;
  while (s * pow(M, r + 1) >= lo) ++r;
  d.kind = CellMapDescriptor::Kind::VerticalAdjust;
  d.column = r;
  d.map = PiecewiseLinearMap({{0, 0}, {lo, lo}, {y1, y2}, {hi, hi}, {1, 1}});
  d.params["scale"] = s;
  d.params["lo"] = lo;
  d.params["hi"] = hi;
  return d;
}

CellMapDescriptor blade_shift(const Comb& c, long i, long j, long window) {
  Evaluator ev(c);
  const BiSeq& run = run_of(c);
  if (window < 0 || window > kPhiRange / 2) throw WindowError("window must lie in [0, " + std::to_string(kPhiRange / 2) + "]");
  if (std::abs(i) > window || std::abs(j) > window)
    throw WindowError("shift " + std::to_string(i) + " -> " + std::to_string(j) + " exceeds the window " + std::to_string(window));
  CellMapDescriptor d;
  d.i = i;
  d.j = j;
  d.window = window;
  if (i == j) return d;
  d.kind = CellMapDescriptor::Kind::BladeShift;
  long s = j - i;
  std::vector<PiecewiseLinearMap::Point> pts{{0, 0}};
  for (long k = -kPhiRange; k <= kPhiRange; ++k) pts.emplace_back(run.term(k), run.term(k + s));
  pts.emplace_back(run.hi, run.hi);
  if (run.hi < 1) pts.emplace_back(1, 1);
  d.map = PiecewiseLinearMap(std::move(pts));
  int N = c.meta().branch;
  for (long n = 1; n <= N; ++n) {
    long p = ev.psi(d, n);
    if (p != n) d.psi.emplace_back(n, p);
    if (p > N) d.unmatched.push_back(n);
  }
  d.params["a1"] = run.hi;
  d.params["M"] = ev.engine().M();
  return d;
}

ContinuityReport blade_shift_continuity(const Comb& c, const CellMapDescriptor& d, int scales) {
  Evaluator ev(c);
  const BiSeq& run = run_of(c);
  // leftmost targets z0 = (0, y)
  std::vector<Rational> targets;
  for (long k = -d.window; k <= d.window; ++k) targets.push_back(run.term(k));
  targets.push_back(run.hi);
  if (run.hi < 1) targets.push_back((run.hi + 1) / 2);
  auto image_of_left = [&](const Rational& y) { return d.kind == CellMapDescriptor::Kind::BladeShift ? d.map(y) : y; };
  auto cone_dist = [](const FanPoint& p, const Rational& y0) {
    Point3 a = p.is_top() ? apex() : embed_cone(Point3{index_x(p.blade().index.path), p.blade().height, 0});
    Point3 b = embed_cone(Point3{0, y0, 0});
    Rational dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(to_double(dx * dx + dy * dy));
  };
  ContinuityReport r;
  for (int j = 1; j <= scales; ++j) {
    Rational delta = pow3_inv(j), inner = delta * Rational(63, 64);
    double worst = 0;
    for (const auto& b : c.blades()) {
      if (b.index.path.empty() || b.index.length() > 2 || b.x >= delta) continue;
      for (const auto& y : targets) {
        std::vector<Rational> hs{y - inner, y - inner / 2, y, y + inner / 2, y + inner};
        if (rabs(b.tip - y) < delta) hs.push_back(b.tip);
        Rational fy = image_of_left(y);
        for (const auto& h : hs) {
          if (h <= 0 || h > b.tip) continue;
          worst = std::max(worst, cone_dist(ev.apply(d, FanPoint::on(b.index, h)), fy));
        }
      }
    }
    r.scale_max.push_back(worst);
  }
  return r;
}

namespace {

// vertical_adjust inside the open band (lo, hi), shrinking eps on collisions with the approximate trace
CellMapDescriptor adjust_within(const Comb& c, const BladeIndex& blade, const Rational& y1, const Rational& y2,
                                const Rational& lo, const Rational& hi) {
  Rational eps = rmin(rmin(y1, y2) - lo, hi - rmax(y1, y2)) / 2;
  for (int attempt = 0;; ++attempt) {
    try {
      return vertical_adjust(c, blade, y1, y2, eps);
    } catch (const TraceCollisionError&) {
      if (attempt == 6) throw;
      eps /= 8;
    }
  }
}

long run_index(const BiSeq& run, const Rational& u, long window) {
  for (long k = -window; k <= window; ++k)
    if (run.term(k) == u) return k;
  throw WindowError("p_k = " + to_string(u) + " lies outside the window");
}

// k with p_k < u < p_{k+1}
long gap_index(const BiSeq& run, const Rational& u, long window) {
  for (long k = -window; k < window; ++k)
    if (run.term(k) < u && u < run.term(k + 1)) return k;
  throw WindowError("gap around " + to_string(u) + " lies outside the window");
}

}  // namespace

Recipe orbit_witness(const Comb& c, const FanPoint& p, const FanPoint& q, const PartitionScheme& s, long window) {
  Evaluator ev(c);
  PartitionLabel lp = ev.label(p, s), lq = ev.label(q, s);
  if (!(lp == lq))
    throw RefusalError("labels differ: " + to_string(lp) + " vs " + to_string(lq));
  Recipe r;
  if (p == q || lp.tag == PartitionLabel::T) return r;
  const BladeIndex& a = p.blade().index;
  const BladeIndex& b = q.blade().index;
  auto run_step = [&](const CellMapDescriptor& d, FanPoint& z) {
    if (d.kind == CellMapDescriptor::Kind::Identity) return;
    z = ev.apply(d, z);
    r.steps.push_back(d);
  };
  FanPoint z = p;
  if (lp.tag == PartitionLabel::E || lp.tag == PartitionLabel::A || lp.tag == PartitionLabel::D) {
    if (a != b) run_step(endpoint_swap(c, a, b), z);
    if (lp.tag == PartitionLabel::D) {
      auto cut = scheme_cutpoints(c, s);
      Rational ulo = lp.i == 0 ? Rational(0) : cut[static_cast<std::size_t>(lp.i - 1)];
      Rational uhi = lp.i == s.m ? Rational(1) : cut[static_cast<std::size_t>(lp.i)];
      auto phi = ev.phi(b.path);
      run_step(adjust_within(c, b, z.blade().height, q.blade().height, phi(ulo), phi(uhi)), z);
    }
  } else {
    const BiSeq& run = run_of(c);
    BladeIndex left{};
    if (!a.path.empty()) run_step(endpoint_swap(c, a, left), z);
    Rational u1 = z.blade().height, u2 = ev.pullback(q);
    long k1, k2;
    if (lp.tag == PartitionLabel::L) {
      k1 = run_index(run, u1, window);
      k2 = run_index(run, u2, window);
    } else {
      k1 = gap_index(run, u1, window);
      k2 = gap_index(run, u2, window);
    }
    run_step(blade_shift(c, k1, k2, window), z);
    if (lp.tag == PartitionLabel::G)
      run_step(adjust_within(c, left, z.blade().height, u2, run.term(k2), run.term(k2 + 1)), z);
    if (!b.path.empty()) run_step(endpoint_swap(c, left, b), z);
  }
  if (!(z == q)) throw RefusalError("recipe ends at " + to_string(z) + " instead of " + to_string(q));
  return r;
}

}  // namespace fanforge
