#include "fanforge/analyze.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "fanforge/errors.hpp"

namespace fanforge {

namespace {

int ceil_log2(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

bool source_is(const Comb& c, const char* expr) { return c.meta().source && *c.meta().source == parse_set_expr(expr); }

std::vector<std::pair<Rational, Rational>> cluster(std::vector<Rational> hs, const Rational& gap) {
  std::sort(hs.begin(), hs.end());
  std::vector<std::pair<Rational, Rational>> out;
  for (const auto& h : hs) {
    if (!out.empty() && h - out.back().second <= gap)
      out.back().second = rmax(out.back().second, h);
    else
      out.emplace_back(h, h);
  }
  return out;
}

}  // namespace

TraceOracle::TraceOracle(const Comb& c) : comb_(&c) {
  const auto& m = c.meta();
  if (m.provenance == Provenance::Product) product_ = unflatten(c);
  const Comb& g = geometry();
  const auto& gm = g.meta();
  int N = gm.branch, K = gm.depth;
  switch (gm.provenance) {
    case Provenance::EpgConstruction:
      relative_ = true;
      J_ = std::max(1, N - 2);
      break;
    case Provenance::Canonical:
      if (source_is(g, "iv(0,1)")) {
        relative_ = true;
        J_ = std::max(1, N - 2);
      } else if (source_is(g, "pt(0)")) {
        J_ = std::max(1, N - 2);
      } else if (source_is(g, "pt(1)")) {
        J_ = std::max(1, K - 1);
      } else {
        J_ = ceil_log2(g.size()) + 1;
      }
      break;
    case Provenance::Maximal:
      J_ = std::max(1, K - 1);
      break;
    default: {
      int L = 0;
      for (const auto& b : g.blades()) L = std::max(L, ternary_length(b.x));
      J_ = std::max(1, L - 1);
    }
  }
  std::vector<Rational> ts;
  for (const auto& b : g.blades()) ts.push_back(b.tip);
  if (ts.empty()) return;
  std::size_t k = std::min<std::size_t>(2, ts.size());
  std::partial_sort(ts.begin(), ts.begin() + k, ts.end());
  min1_ = ts[0];
  min2_ = ts[k - 1];
  max_tip_ = *std::max_element(ts.begin(), ts.end());
}

Rational TraceOracle::delta(const Blade& b, int j) const {
  return relative_ ? pow3_inv(ternary_length(b.x) + j) : pow3_inv(j);
}

TraceApprox TraceOracle::trace_plain(const Comb& g, const BladeIndex& idx) const {
  const Blade& b = g.at(idx);
  TraceApprox t;
  t.blade = idx;
  for (int j = 1; j <= J_; ++j) t.delta_schedule.push_back(delta(b, j));
  // windows are nested, so the finest one decides persistence
  Rational d = t.delta_schedule.back();
  auto [lo, hi] = g.range(b.x - d, b.x + d);
  std::vector<Rational> hs;
  for (std::size_t i = lo; i < hi; ++i) {
    const Blade& o = g.blades()[i];
    if (o.x == b.x || rabs(o.x - b.x) >= d) continue;
    if (o.tip > b.tip) continue;
    hs.push_back(o.tip);
  }
  t.heights = cluster(std::move(hs), 3 * d);
  // the apex is shared by all blades: accumulation of tip heights at 0 anywhere
  Rational lowest = b.tip == min1_ ? min2_ : min1_;
  t.includes_base = g.size() > 1 && lowest <= max_tip_ * pow(Rational(1, 2), J_);
  return t;
}

TraceApprox TraceOracle::trace(const BladeIndex& idx) const {
  if (!product_) return trace_plain(*comb_, idx);
  BladeIndex base_idx{idx.path, {}};
  if (idx.word.size() != static_cast<std::size_t>(product_->cantor_depth))
    throw ArgumentError("product blade index needs a word of length " + std::to_string(product_->cantor_depth));
  auto t = trace_plain(product_->base, base_idx);
  t.blade = idx;
  // word siblings share the tip height
  if (product_->cantor_depth >= 1) {
    Rational tip = product_->base.at(base_idx).tip;
    t.heights.emplace_back(tip, tip);
    t.heights = cluster([&] {
      std::vector<Rational> v;
      for (const auto& [a, b] : t.heights) {
        v.push_back(a);
        v.push_back(b);
      }
      return v;
    }(), cluster_gap(product_->base.at(base_idx)));
  }
  return t;
}

TraceApprox trace_extract(const Comb& c, const BladeIndex& idx) { return TraceOracle(c).trace(idx); }

// ------------------------------------------------------------------ verify

std::vector<std::pair<Rational, Rational>> image_pieces(const PiecewiseLinearMap& phi, const ClosedSetDesc& X,
                                                        const Rational& tol) {
  std::vector<std::pair<Rational, Rational>> v;
  auto pt = [&](const Rational& q) {
    Rational y = phi(q);
    v.emplace_back(y, y);
  };
  // terms from k0 on, until they come within tol of the limit
  auto tail = [&](auto term, long k0, const Rational& limit) {
    Rational last = term(k0);
    pt(last);
    for (long k = k0 + 1; k < k0 + 100000; ++k) {
      Rational t = term(k);
      pt(t);
      if (rabs(phi(t) - phi(limit)) <= tol) {
        Rational a = phi(rmin(t, limit)), b = phi(rmax(t, limit));
        v.emplace_back(a, b);
        return;
      }
    }
    pt(limit);
  };
  for (const auto& a : X.atoms()) {
    std::visit(
        [&](const auto& at) {
          using T = std::decay_t<decltype(at)>;
          if constexpr (std::is_same_v<T, PointAtom>) {
            pt(at.p);
          } else if constexpr (std::is_same_v<T, IntervalAtom>) {
            v.emplace_back(phi(at.lo), phi(at.hi));
          } else if constexpr (std::is_same_v<T, GeomSeq>) {
            tail([&](long k) { return seq_term(at, k); }, 1, at.limit);
          } else if constexpr (std::is_same_v<T, HarSeq>) {
            tail([&](long k) { return seq_term(at, k); }, at.start, at.limit);
          } else {
            tail([&](long k) { return at.term(k); }, 0, at.hi);
            tail([&](long k) { return at.term(-k); }, 1, at.lo);
          }
        },
        a);
  }
  std::sort(v.begin(), v.end());
  std::vector<std::pair<Rational, Rational>> out;
  for (auto& p : v) {
    if (!out.empty() && p.first <= out.back().second)
      out.back().second = rmax(out.back().second, p.second);
    else
      out.push_back(std::move(p));
  }
  return out;
}

Rational one_sided_gap(const std::vector<std::pair<Rational, Rational>>& intervals,
                       const std::vector<std::pair<Rational, Rational>>& pieces) {
  if (intervals.empty()) return 0;
  if (pieces.empty()) throw EmptySetError("target set is empty");
  auto dist = [&](const Rational& h) {
    auto it = std::lower_bound(pieces.begin(), pieces.end(), h,
                               [](const std::pair<Rational, Rational>& p, const Rational& v) { return p.second < v; });
    Rational best = -1;
    if (it != pieces.end()) best = it->first <= h ? Rational(0) : Rational(it->first - h);
    if (it != pieces.begin()) {
      Rational d = h - std::prev(it)->second;
      if (best < 0 || d < best) best = d;
    }
    return best;
  };
  Rational worst = 0;
  for (const auto& [lo, hi] : intervals) {
    worst = rmax(worst, rmax(dist(lo), dist(hi)));
    // farthest points inside [lo, hi] are gap midpoints
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
      Rational mid = (pieces[i].second + pieces[i + 1].first) / 2;
      if (mid > lo && mid < hi) worst = rmax(worst, dist(mid));
    }
  }
  return worst;
}

VerifyReport verify_epg(const Comb& c, const ClosedSetDesc& X, const Rational& eps, int max_index_length) {
  if (eps <= 0) throw ArgumentError("eps must be positive");
  if (!c.meta().source) throw MetadataError("comb has no construction metadata");
  ClosedSetDesc Xc = X.canonical() ? X : normalize(X);
  bool has_one = contains(Xc, 1);
  TraceOracle oracle(c);
  VerifyReport r;
  r.eps = eps;
  for (const auto& b : c.blades()) {
    if (max_index_length >= 0 && static_cast<int>(b.index.length()) > max_index_length) continue;
    auto phi = phi_blade(c, b.index);
    auto target = image_pieces(phi, Xc, eps / 64);
    if (has_one) target.emplace_back(b.tip, b.tip);
    std::sort(target.begin(), target.end());
    auto t = oracle.trace(b.index);
    BladeReport br{b.index, false, one_sided_gap(t.heights, target)};
    br.pass = br.gap <= eps;
    r.pass = r.pass && br.pass;
    r.blades.push_back(std::move(br));
  }
  return r;
}

// --------------------------------------------------------------- cardinality

std::string to_string(CardinalityType t) {
  switch (t) {
    case CardinalityType::Countable: return "countable-type";
    case CardinalityType::Cantor: return "cantor-type";
    default: return "mixed";
  }
}

CardinalityType cardinality_probe(const Comb& c) {
  TraceOracle oracle(c);
  int J = oracle.finest_level();
  Rational keep = 1 - pow(Rational(1, 2), J);
  bool any_in = false, all_in = true, any_base = false;
  for (const auto& b : c.blades()) {
    auto t = oracle.trace(b.index);
    bool in = !t.heights.empty() && t.heights.back().second >= b.tip * keep;
    any_in = any_in || in;
    all_in = all_in && in;
    any_base = any_base || t.includes_base;
  }
  if (!any_in) return CardinalityType::Countable;
  if (all_in && !any_base) return CardinalityType::Cantor;
  return CardinalityType::Mixed;
}

// ----------------------------------------------------------------- partition

PartitionScheme parse_scheme(const std::string& s) {
  auto open = s.find('('), close = s.find(')');
  if (open == std::string::npos || close != s.size() - 1) throw ArgumentError("scheme must look like odd(m) or even(m)");
  std::string kind = s.substr(0, open);
  int m = 0;
  try {
    m = std::stoi(s.substr(open + 1, close - open - 1));
  } catch (const std::exception&) {
    throw ArgumentError("scheme parameter must be an integer");
  }
  if (m < 1) throw ArgumentError("scheme parameter must be positive");
  if (kind == "odd") return {PartitionScheme::Odd, m};
  if (kind == "even") return {PartitionScheme::Even, m};
  throw ArgumentError("unknown scheme: " + kind);
}

std::string to_string(const PartitionScheme& s) {
  return (s.parity == PartitionScheme::Odd ? "odd(" : "even(") + std::to_string(s.m) + ")";
}

std::string to_string(const PartitionLabel& l) {
  switch (l.tag) {
    case PartitionLabel::T: return "T";
    case PartitionLabel::E: return "E";
    case PartitionLabel::A: return "A(" + std::to_string(l.i) + ")";
    case PartitionLabel::D: return "D(" + std::to_string(l.i) + ")";
    case PartitionLabel::L: return "L";
    default: return "G";
  }
}

ClosedSetDesc scheme_set(const PartitionScheme& s) {
  std::vector<Atom> atoms{PointAtom{0}};
  if (s.parity == PartitionScheme::Odd) {
    for (int i = 1; i <= s.m; ++i) atoms.push_back(PointAtom{frac(i, s.m + 1)});
  } else {
    atoms.push_back(BiSeq{0, Rational(1, 2), Rational(1, 2)});
    atoms.push_back(PointAtom{Rational(1, 2)});
    for (int i = 2; i <= s.m; ++i) atoms.push_back(PointAtom{1 - pow(Rational(1, 2), i)});
  }
  return normalize(ClosedSetDesc(std::move(atoms)));
}

namespace {

const BiSeq* even_run(const ClosedSetDesc& X) {
  const BiSeq* run = nullptr;
  for (const auto& a : X.atoms())
    if (const auto* b = std::get_if<BiSeq>(&a)) {
      if (run) return nullptr;
      run = b;
    }
  return run;
}

}  // namespace

std::vector<Rational> scheme_cutpoints(const Comb& c, const PartitionScheme& s) {
  const auto& src = c.meta().source;
  if (!src || (c.meta().provenance != Provenance::EpgConstruction)) throw SchemeMismatchError("comb is not built from a scheme set");
  std::vector<Rational> pts;
  int seqs = 0;
  for (const auto& a : src->atoms()) {
    if (const auto* p = std::get_if<PointAtom>(&a))
      pts.push_back(p->p);
    else if (std::holds_alternative<BiSeq>(a))
      ++seqs;
    else
      throw SchemeMismatchError("source has an atom outside the scheme shape");
  }
  if (s.parity == PartitionScheme::Even && seqs == 1) {
    // normalize folds 0 and a_1 into the run's limits
    const BiSeq* run = even_run(*src);
    pts.push_back(run->lo);
    pts.push_back(run->hi);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.empty() || pts.front() != 0) throw SchemeMismatchError("source must contain 0");
  pts.erase(pts.begin());
  if (static_cast<int>(pts.size()) != s.m) throw SchemeMismatchError("source has " + std::to_string(pts.size()) + " cutpoints, scheme needs " + std::to_string(s.m));
  if (s.parity == PartitionScheme::Odd) {
    if (seqs != 0) throw SchemeMismatchError("odd scheme takes a finite source");
  } else {
    const BiSeq* run = seqs == 1 ? even_run(*src) : nullptr;
    if (!run || run->lo != 0 || run->hi != pts.front()) throw SchemeMismatchError("even scheme needs one two-sided run between 0 and a_1");
  }
  return pts;
}

PartitionLabel label_pullback(const Comb& c, const Rational& u, const PartitionScheme& s) {
  auto a = scheme_cutpoints(c, s);
  if (u <= 0 || u >= 1) throw ArgumentError("pullback must lie in (0,1)");
  int m = s.m;
  for (int i = 1; i <= m; ++i)
    if (u == a[i - 1]) return {PartitionLabel::A, i};
  if (s.parity == PartitionScheme::Even && u < a[0]) {
    const BiSeq* run = even_run(*c.meta().source);
    return {run->index_of(u) ? PartitionLabel::L : PartitionLabel::G, 0};
  }
  int i = 0;
  while (i < m && u > a[i]) ++i;
  return {PartitionLabel::D, i};
}

PartitionLabel label_partition(const Comb& c, const FanPoint& p, const PartitionScheme& s) {
  scheme_cutpoints(c, s);
  check_point(c, p);
  if (p.is_top()) return {PartitionLabel::T, 0};
  const auto& ob = p.blade();
  const Blade& b = c.at(ob.index);
  if (ob.height == b.tip) return {PartitionLabel::E, 0};
  return label_pullback(c, phi_blade(c, ob.index).inverse_eval(ob.height), s);
}

std::vector<FanPoint> partition_sample(const Comb& c, const PartitionScheme& s, int count, unsigned seed) {
  auto a = scheme_cutpoints(c, s);
  std::vector<Rational> us(a.begin(), a.end());
  std::vector<Rational> cuts{0};
  cuts.insert(cuts.end(), a.begin(), a.end());
  cuts.push_back(1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) us.push_back((cuts[i] + cuts[i + 1]) / 2);
  if (s.parity == PartitionScheme::Even) {
    const BiSeq* run = even_run(*c.meta().source);
    for (long k = -3; k <= 3; ++k) {
      us.push_back(run->term(k));
      us.push_back((run->term(k) + run->term(k + 1)) / 2);
    }
  }
  std::vector<const Blade*> blades;
  for (const auto& b : c.blades())
    if (b.index.length() <= 2) blades.push_back(&b);
  std::mt19937 rng(seed);
  std::vector<FanPoint> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int t = 0; t < count; ++t) {
    const Blade& b = *blades[rng() % blades.size()];
    std::size_t pick = rng() % (us.size() + 2);
    if (pick == us.size()) out.push_back(FanPoint::on(b.index, b.tip));
    else if (pick < us.size()) out.push_back(FanPoint::on(b.index, phi_blade(c, b.index)(us[pick])));
    else out.push_back(FanPoint::top());
  }
  return out;
}

int scheme_class_count(const PartitionScheme& s) { return s.parity == PartitionScheme::Odd ? 2 * s.m + 3 : 2 * s.m + 4; }

PartitionLabel topological_label(const Comb& c, const Rational& y, const PartitionScheme& s) {
  if (s.parity != PartitionScheme::Odd) throw ArgumentError("the trace cross-check covers odd schemes only");
  const Blade& b = c.at(BladeIndex{});
  if (y >= b.tip) return {PartitionLabel::E, 0};
  if (y <= 0) return {PartitionLabel::T, 0};
  TraceOracle o(c);
  Rational tol = o.cluster_gap(b);
  bool base = o.trace(BladeIndex{}).includes_base;
  // A height is a limit of endpoints when tips of exactly that height occur at
  // three or more ternary distance scales; heights seen at a single scale come from deep
  // descendants and only accumulate at the base.
  Rational window = o.delta(b, 1);
  std::vector<std::pair<Rational, int>> hs;
  auto [lo, hi] = c.range(b.x, b.x + window);
  for (std::size_t i = lo; i < hi; ++i) {
    const Blade& t = c.blades()[i];
    Rational d = t.x - b.x;
    if (d <= 0 || d >= window || t.tip > b.tip) continue;
    int scale = 0;
    while (pow3_inv(scale) > d) ++scale;
    hs.emplace_back(t.tip, scale);
  }
  std::sort(hs.begin(), hs.end());
  std::vector<Rational> limits;
  for (std::size_t i = 0; i < hs.size();) {
    std::size_t j = i + 1;
    while (j < hs.size() && hs[j].first == hs[i].first) ++j;
    std::set<int> scales;
    for (std::size_t k = i; k < j; ++k) scales.insert(hs[k].second);
    if (scales.size() >= 3 && hs[i].first > tol) limits.push_back(hs[i].first);
    i = j;
  }
  int below = base ? 1 : 0;
  for (const auto& h : limits) {
    if (h < y - tol) ++below;
    else if (h <= y + tol) return {PartitionLabel::A, below};
  }
  return {PartitionLabel::D, below - 1};
}

}  // namespace fanforge
