#include "fanforge/closedset.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "fanforge/errors.hpp"

namespace fanforge {

// ---------------------------------------------------------------- atoms

Rational seq_term(const GeomSeq& g, long k) {
  Rational d = g.offset * pow(g.ratio, k);
  return g.dir == Direction::Above ? Rational(g.limit + d) : Rational(g.limit - d);
}

Rational seq_term(const HarSeq& h, long k) {
  Rational d = h.scale / Rational(k);
  return h.dir == Direction::Above ? Rational(h.limit + d) : Rational(h.limit - d);
}

Rational BiSeq::term(long i) const {
  Rational half = (hi - lo) / 2;
  if (i >= 0) return hi - half * pow(ratio, i);
  return lo + half * pow(ratio, -i);
}

namespace {

// smallest e >= e0 with r^e <= t (t > 0); returns r^e via `value`
long first_power_at_most(const Rational& r, const Rational& t, long e0, Rational& value) {
  value = pow(r, e0);
  long e = e0;
  while (value > t) {
    value *= r;
    ++e;
  }
  return e;
}

}  // namespace

std::optional<long> BiSeq::index_of(const Rational& q) const {
  if (q <= lo || q >= hi) return std::nullopt;
  Rational half = (hi - lo) / 2;
  Rational v;
  if (q >= lo + half) {
    Rational t = (hi - q) / half;
    long i = first_power_at_most(ratio, t, 0, v);
    if (v == t) return i;
    return std::nullopt;
  }
  Rational t = (q - lo) / half;
  long j = first_power_at_most(ratio, t, 1, v);
  if (v == t) return -j;
  return std::nullopt;
}

namespace {

// One-sided view of a sequence: terms move monotonically toward `limit` as k grows.
struct OneSided {
  std::variant<GeomSeq, HarSeq> seq;
  long k0 = 1;

  const Rational& limit() const {
    return std::visit([](const auto& s) -> const Rational& { return s.limit; }, seq);
  }
  Direction dir() const {
    return std::visit([](const auto& s) { return s.dir; }, seq);
  }
  Rational term(long k) const {
    return std::visit([k](const auto& s) { return seq_term(s, k); }, seq);
  }
  Rational far() const { return term(k0); }
  // index of q among terms
  std::optional<long> index_of(const Rational& q) const {
    Rational d = dir() == Direction::Above ? Rational(q - limit()) : Rational(limit() - q);
    if (d <= 0) return std::nullopt;
    if (auto g = std::get_if<GeomSeq>(&seq)) {
      Rational t = d / g->offset;
      Rational v;
      long e = first_power_at_most(g->ratio, t, 1, v);
      if (v == t) return e;
      return std::nullopt;
    }
    const auto& h = std::get<HarSeq>(seq);
    Rational k = h.scale / d;
    if (k.get_den() != 1 || k < h.start) return std::nullopt;
    return k.get_num().get_si();
  }
  // first index whose term is at distance <= dist from the limit
  long first_within(const Rational& dist) const {
    if (auto g = std::get_if<GeomSeq>(&seq)) {
      Rational v;
      return first_power_at_most(g->ratio, dist / g->offset, 1, v);
    }
    const auto& h = std::get<HarSeq>(seq);
    Rational k = h.scale / dist;
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), k.get_num_mpz_t(), k.get_den_mpz_t());
    return std::max<long>(h.start, c.get_si());
  }
  // does some term lie in [a, b]?
  bool term_in(const Rational& a, const Rational& b) const {
    const Rational& L = limit();
    Rational dist = dir() == Direction::Above ? Rational(b - L) : Rational(L - a);
    if (dist <= 0) return false;
    long k = std::max(k0, first_within(dist));
    Rational t = term(k);
    return t >= a && t <= b;
  }
};

std::vector<OneSided> one_sided(const Atom& a) {
  if (auto g = std::get_if<GeomSeq>(&a)) return {OneSided{*g, 1}};
  if (auto h = std::get_if<HarSeq>(&a)) return {OneSided{*h, h->start}};
  if (auto b = std::get_if<BiSeq>(&a)) {
    Rational half = (b->hi - b->lo) / 2;
    // lower tail i = -k, upper tail i = k - 1
    GeomSeq lower{b->lo, half, b->ratio, Direction::Above};
    GeomSeq upper{b->hi, half / b->ratio, b->ratio, Direction::Below};
    return {OneSided{lower, 1}, OneSided{upper, 1}};
  }
  return {};
}

}  // namespace

bool is_sequence(const Atom& a) {
  return std::holds_alternative<GeomSeq>(a) || std::holds_alternative<HarSeq>(a) ||
         std::holds_alternative<BiSeq>(a);
}

std::vector<Rational> atom_limits(const Atom& a) {
  if (auto b = std::get_if<BiSeq>(&a)) return {b->lo, b->hi};
  if (auto g = std::get_if<GeomSeq>(&a)) return {g->limit};
  if (auto h = std::get_if<HarSeq>(&a)) return {h->limit};
  return {};
}

Rational atom_inf(const Atom& a) {
  return std::visit(
      [](const auto& s) -> Rational {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointAtom>) return s.p;
        else if constexpr (std::is_same_v<T, IntervalAtom>) return s.lo;
        else if constexpr (std::is_same_v<T, BiSeq>) return s.lo;
        else if constexpr (std::is_same_v<T, GeomSeq>)
          return s.dir == Direction::Above ? s.limit : seq_term(s, 1);
        else return s.dir == Direction::Above ? s.limit : seq_term(s, s.start);
      },
      a);
}

Rational atom_sup(const Atom& a) {
  return std::visit(
      [](const auto& s) -> Rational {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointAtom>) return s.p;
        else if constexpr (std::is_same_v<T, IntervalAtom>) return s.hi;
        else if constexpr (std::is_same_v<T, BiSeq>) return s.hi;
        else if constexpr (std::is_same_v<T, GeomSeq>)
          return s.dir == Direction::Above ? seq_term(s, 1) : s.limit;
        else return s.dir == Direction::Above ? seq_term(s, s.start) : s.limit;
      },
      a);
}

bool atom_contains(const Atom& a, const Rational& q) {
  if (auto p = std::get_if<PointAtom>(&a)) return p->p == q;
  if (auto iv = std::get_if<IntervalAtom>(&a)) return iv->lo <= q && q <= iv->hi;
  if (auto b = std::get_if<BiSeq>(&a)) return q == b->lo || q == b->hi || b->index_of(q).has_value();
  for (const auto& s : one_sided(a))
    if (q == s.limit() || s.index_of(q)) return true;
  return false;
}

void validate_atom(const Atom& a) {
  auto in01 = [](const Rational& q) { return q >= 0 && q <= 1; };
  auto ratio_ok = [](const Rational& r) {
    if (!(r > 0 && r < 1)) throw ArgumentError("ratio must lie in (0,1)");
  };
  if (auto p = std::get_if<PointAtom>(&a)) {
    if (!in01(p->p)) throw RangeError("point " + to_string(p->p) + " outside [0,1]");
  } else if (auto iv = std::get_if<IntervalAtom>(&a)) {
    if (!in01(iv->lo) || !in01(iv->hi)) throw RangeError("interval outside [0,1]");
    if (!(iv->lo < iv->hi)) throw ArgumentError("interval needs lo < hi");
  } else if (auto b = std::get_if<BiSeq>(&a)) {
    if (!in01(b->lo) || !in01(b->hi)) throw RangeError("biseq limits outside [0,1]");
    if (!(b->lo < b->hi)) throw ArgumentError("biseq needs lo < hi");
    ratio_ok(b->ratio);
  } else {
    if (auto g = std::get_if<GeomSeq>(&a)) {
      ratio_ok(g->ratio);
      if (!(g->offset > 0)) throw ArgumentError("offset must be positive");
    } else {
      const auto& h = std::get<HarSeq>(a);
      if (!(h.scale > 0)) throw ArgumentError("scale must be positive");
      if (h.start < 1) throw ArgumentError("start index must be >= 1");
    }
    if (!in01(atom_inf(a)) || !in01(atom_sup(a))) throw RangeError("sequence terms outside [0,1]");
  }
}

// ---------------------------------------------------------------- set ops

namespace {

bool hull_within(const Atom& a, const IntervalAtom& iv) {
  return iv.lo <= atom_inf(a) && atom_sup(a) <= iv.hi;
}

bool seq_term_in(const Atom& a, const Rational& lo, const Rational& hi) {
  for (const auto& s : one_sided(a))
    if (s.term_in(lo, hi)) return true;
  return false;
}

}  // namespace

ClosedSetDesc normalize(const ClosedSetDesc& desc) {
  std::vector<Rational> points;
  std::vector<IntervalAtom> intervals;
  std::vector<Atom> seqs;
  for (Atom a : desc.atoms()) {
    std::visit([](auto& s) {
      using T = std::decay_t<decltype(s)>;
      if constexpr (std::is_same_v<T, PointAtom>) s.p.canonicalize();
      else if constexpr (std::is_same_v<T, IntervalAtom> || std::is_same_v<T, BiSeq>) {
        s.lo.canonicalize();
        s.hi.canonicalize();
        if constexpr (std::is_same_v<T, BiSeq>) s.ratio.canonicalize();
      } else if constexpr (std::is_same_v<T, GeomSeq>) {
        s.limit.canonicalize();
        s.offset.canonicalize();
        s.ratio.canonicalize();
      } else {
        s.limit.canonicalize();
        s.scale.canonicalize();
      }
    }, a);
    validate_atom(a);
    if (auto p = std::get_if<PointAtom>(&a)) points.push_back(p->p);
    else if (auto iv = std::get_if<IntervalAtom>(&a)) intervals.push_back(*iv);
    else if (std::find(seqs.begin(), seqs.end(), a) == seqs.end()) seqs.push_back(a);
  }

  std::sort(intervals.begin(), intervals.end(),
            [](const IntervalAtom& x, const IntervalAtom& y) { return x.lo < y.lo; });
  std::vector<IntervalAtom> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.lo <= merged.back().hi) merged.back().hi = rmax(merged.back().hi, iv.hi);
    else merged.push_back(iv);
  }

  std::vector<Atom> kept;
  for (const auto& s : seqs) {
    bool absorbed = false;
    for (const auto& iv : merged) {
      if (hull_within(s, iv)) {
        absorbed = true;
        break;
      }
      if (seq_term_in(s, iv.lo, iv.hi))
        throw OverlapError("sequence terms fall inside interval [" + to_string(iv.lo) + "," +
                           to_string(iv.hi) + "]");
      for (const auto& L : atom_limits(s))
        if (iv.lo < L && L < iv.hi) throw OverlapError("sequence limit inside interval");
    }
    if (!absorbed) kept.push_back(s);
  }
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      if (atom_inf(kept[i]) < atom_sup(kept[j]) && atom_inf(kept[j]) < atom_sup(kept[i]))
        throw OverlapError("sequence atoms overlap");

  std::vector<Atom> out;
  for (const auto& iv : merged) out.push_back(iv);
  for (const auto& s : kept) out.push_back(s);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (const auto& p : points) {
    bool covered = std::any_of(out.begin(), out.end(), [&](const Atom& a) { return atom_contains(a, p); });
    if (!covered) out.push_back(PointAtom{p});
  }
  std::stable_sort(out.begin(), out.end(), [](const Atom& x, const Atom& y) {
    Rational ix = atom_inf(x), iy = atom_inf(y);
    if (ix != iy) return ix < iy;
    return atom_sup(x) < atom_sup(y);
  });
  return ClosedSetDesc(std::move(out), true);
}

bool contains(const ClosedSetDesc& desc, const Rational& q) {
  for (const auto& a : desc.atoms())
    if (atom_contains(a, q)) return true;
  return false;
}

bool is_isolated(const ClosedSetDesc& desc, const Rational& q) {
  if (!contains(desc, q)) throw NotMemberError(to_string(q) + " is not in the set");
  for (const auto& a : desc.atoms()) {
    if (auto iv = std::get_if<IntervalAtom>(&a))
      if (iv->lo <= q && q <= iv->hi) return false;
    for (const auto& L : atom_limits(a))
      if (L == q) return false;
  }
  return true;
}

Rational max_value(const ClosedSetDesc& desc) {
  if (desc.empty()) throw EmptySetError("max of empty set");
  Rational m = atom_sup(desc.atoms().front());
  for (const auto& a : desc.atoms()) m = rmax(m, atom_sup(a));
  return m;
}

Rational min_value(const ClosedSetDesc& desc) {
  if (desc.empty()) throw EmptySetError("min of empty set");
  Rational m = atom_inf(desc.atoms().front());
  for (const auto& a : desc.atoms()) m = rmin(m, atom_inf(a));
  return m;
}

bool meets(const ClosedSetDesc& desc, const Rational& lo, const Rational& hi) {
  for (const auto& a : desc.atoms()) {
    if (auto p = std::get_if<PointAtom>(&a)) {
      if (lo <= p->p && p->p <= hi) return true;
    } else if (auto iv = std::get_if<IntervalAtom>(&a)) {
      if (iv->lo <= hi && lo <= iv->hi) return true;
    } else {
      for (const auto& L : atom_limits(a))
        if (lo <= L && L <= hi) return true;
      if (seq_term_in(a, lo, hi)) return true;
    }
  }
  return false;
}

std::string to_string(FanKind k) {
  switch (k) {
    case FanKind::SimpleNOd: return "SimpleNOd";
    case FanKind::CantorFan: return "CantorFan";
    case FanKind::LelekFan: return "LelekFan";
    case FanKind::CountableType: return "CountableType";
    case FanKind::ProductType: return "ProductType";
  }
  return "?";
}

std::string to_string(InfeasibleReason r) {
  switch (r) {
    case InfeasibleReason::NoEndpointRule: return "NoEndpointRule";
    case InfeasibleReason::OneNotIsolated: return "OneNotIsolated";
    case InfeasibleReason::CountUncountConflict: return "CountUncountConflict";
  }
  return "?";
}

FeasibilityVerdict classify_feasibility(const ClosedSetDesc& desc) {
  ClosedSetDesc d = desc.canonical() ? desc : normalize(desc);
  auto yes = [](FanKind k) { return FeasibilityVerdict{true, k, std::nullopt}; };
  auto no = [](InfeasibleReason r) { return FeasibilityVerdict{false, std::nullopt, r}; };
  if (d.empty()) return yes(FanKind::SimpleNOd);
  const auto& atoms = d.atoms();
  if (atoms.size() == 1) {
    if (auto p = std::get_if<PointAtom>(&atoms[0]); p && p->p == 1) return yes(FanKind::CantorFan);
    if (auto iv = std::get_if<IntervalAtom>(&atoms[0]); iv && iv->lo == 0 && iv->hi == 1)
      return yes(FanKind::LelekFan);
  }
  bool has0 = contains(d, 0), has1 = contains(d, 1);
  if (!has0 && !has1) return no(InfeasibleReason::CountUncountConflict);
  if (!has1) return yes(FanKind::CountableType);
  if (!is_isolated(d, 1)) return no(InfeasibleReason::OneNotIsolated);
  if (!has0) return no(InfeasibleReason::NoEndpointRule);
  return yes(FanKind::ProductType);
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  explicit Parser(const std::string& t) : s_(t) {}

  ClosedSetDesc parse() {
    std::vector<Atom> atoms;
    skip();
    if (peek_word("empty")) {
      pos_ += 5;
      skip();
      expect_end();
      return ClosedSetDesc({}, true);
    }
    atoms.push_back(term());
    skip();
    while (pos_ < s_.size() && s_[pos_] == '+') {
      ++pos_;
      skip();
      atoms.push_back(term());
      skip();
    }
    expect_end();
    return normalize(ClosedSetDesc(std::move(atoms)));
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek_word(const std::string& w) const { return s_.compare(pos_, w.size(), w) == 0; }
  void expect_end() {
    if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
  }
  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
    skip();
  }
  std::string ident() {
    std::size_t b = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (b == pos_) throw ParseError("expected a term name", b);
    return s_.substr(b, pos_ - b);
  }
  Integer integer() {
    skip();
    std::size_t b = pos_;
    if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
    std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (digits == pos_) throw ParseError("expected an integer", b);
    return Integer(s_.substr(b, pos_ - b));
  }
  Rational rational() {
    std::size_t b = pos_;
    Integer n = integer(), d = 1;
    skip();
    if (pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      std::size_t dp = pos_;
      d = integer();
      if (d <= 0) throw ParseError("denominator must be positive", dp);
    }
    skip();
    Rational q(n, d);
    q.canonicalize();
    (void)b;
    return q;
  }
  long small_int() {
    std::size_t b = pos_;
    Rational q = rational();
    if (q.get_den() != 1 || !q.get_num().fits_slong_p()) throw ParseError("expected an integer", b);
    return q.get_num().get_si();
  }
  Direction direction() {
    skip();
    std::size_t b = pos_;
    std::string w = ident();
    skip();
    if (w == "above") return Direction::Above;
    if (w == "below") return Direction::Below;
    throw ParseError("expected 'above' or 'below'", b);
  }
  Atom term() {
    std::size_t b = pos_;
    std::string name = ident();
    expect('(');
    Atom a;
    if (name == "pt") {
      a = PointAtom{rational()};
    } else if (name == "iv") {
      Rational lo = rational();
      expect(',');
      a = IntervalAtom{lo, rational()};
    } else if (name == "geo") {
      Rational l = rational();
      expect(',');
      Rational o = rational();
      expect(',');
      Rational r = rational();
      expect(',');
      a = GeomSeq{l, o, r, direction()};
    } else if (name == "har") {
      Rational l = rational();
      expect(',');
      Rational sc = rational();
      expect(',');
      Direction dir = direction();
      long start = 1;
      if (pos_ < s_.size() && s_[pos_] == ',') {
        expect(',');
        start = small_int();
      }
      a = HarSeq{l, sc, dir, start};
    } else if (name == "biseq") {
      Rational lo = rational();
      expect(',');
      Rational hi = rational();
      expect(',');
      a = BiSeq{lo, hi, rational()};
    } else {
      throw ParseError("unknown term '" + name + "'", b);
    }
    expect(')');
    try {
      validate_atom(a);
    } catch (const ArgumentError& e) {
      throw ParseError(e.what(), b);
    }
    return a;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

std::string dir_name(Direction d) { return d == Direction::Above ? "above" : "below"; }

}  // namespace

ClosedSetDesc parse_set_expr(const std::string& text) { return Parser(text).parse(); }

std::string to_expr(const ClosedSetDesc& desc) {
  if (desc.empty()) return "empty";
  std::ostringstream os;
  bool first = true;
  for (const auto& a : desc.atoms()) {
    if (!first) os << " + ";
    first = false;
    if (auto p = std::get_if<PointAtom>(&a)) os << "pt(" << p->p << ")";
    else if (auto iv = std::get_if<IntervalAtom>(&a)) os << "iv(" << iv->lo << "," << iv->hi << ")";
    else if (auto g = std::get_if<GeomSeq>(&a))
      os << "geo(" << g->limit << "," << g->offset << "," << g->ratio << "," << dir_name(g->dir) << ")";
    else if (auto h = std::get_if<HarSeq>(&a)) {
      os << "har(" << h->limit << "," << h->scale << "," << dir_name(h->dir);
      if (h->start != 1) os << "," << h->start;
      os << ")";
    } else {
      const auto& b = std::get<BiSeq>(a);
      os << "biseq(" << b.lo << "," << b.hi << "," << b.ratio << ")";
    }
  }
  return os.str();
}

ClosedSetDesc x_family(const std::vector<int>& A) {
  std::vector<Atom> atoms{PointAtom{0}, HarSeq{0, 1, Direction::Above, 1}};
  for (int n : A) {
    if (n < 1) throw ArgumentError("x_family indices must be positive");
    Rational den(4 * static_cast<long>(n) * (n + 1));
    atoms.push_back(IntervalAtom{Rational(4 * n + 1) / den, Rational(4 * n + 3) / den});
  }
  return normalize(ClosedSetDesc(std::move(atoms)));
}

ClosedSetDesc remove_one(const ClosedSetDesc& desc) {
  if (!contains(desc, 1) || !is_isolated(desc, 1)) throw HypothesisError("1 must be an isolated member");
  std::vector<Atom> out;
  for (const auto& a : desc.atoms()) {
    if (auto p = std::get_if<PointAtom>(&a); p && p->p == 1) continue;
    if (auto h = std::get_if<HarSeq>(&a); h && atom_sup(a) == 1 && h->dir == Direction::Above) {
      HarSeq c = *h;
      ++c.start;
      out.push_back(c);
      continue;
    }
    if (auto g = std::get_if<GeomSeq>(&a); g && atom_sup(a) == 1 && g->dir == Direction::Above) {
      GeomSeq c = *g;
      c.offset *= c.ratio;
      out.push_back(c);
      continue;
    }
    out.push_back(a);
  }
  return normalize(ClosedSetDesc(std::move(out)));
}

// ---------------------------------------------------------------- dense enumeration

DenseEnumeration::DenseEnumeration(const ClosedSetDesc& desc) {
  ClosedSetDesc d = desc.canonical() ? desc : normalize(desc);
  std::vector<Atom> intervals, seqs;
  for (const auto& a : d.atoms()) {
    if (auto p = std::get_if<PointAtom>(&a)) {
      if (p->p != 0) points_.push_back(p->p);
    } else if (std::holds_alternative<IntervalAtom>(a)) {
      intervals.push_back(a);
    } else {
      Atom s = a;
      // keep 0 out of the enumeration
      if (auto h = std::get_if<HarSeq>(&s); h && h->dir == Direction::Below && seq_term(*h, h->start) == 0)
        ++h->start;
      if (auto g = std::get_if<GeomSeq>(&s); g && g->dir == Direction::Below && seq_term(*g, 1) == 0)
        g->offset *= g->ratio;
      seqs.push_back(s);
    }
  }
  std::sort(points_.begin(), points_.end(), [](const Rational& x, const Rational& y) { return x > y; });
  sources_ = intervals;
  sources_.insert(sources_.end(), seqs.begin(), seqs.end());
  finite_ = sources_.empty();
  if (finite_ && points_.empty()) throw HypothesisError("no nonzero elements to enumerate");
}

Rational DenseEnumeration::source_term(std::size_t src, std::size_t k) const {
  const Atom& a = sources_[src];
  if (auto iv = std::get_if<IntervalAtom>(&a)) {
    std::size_t ends = iv->lo == 0 ? 1 : 2;
    if (k == 0) return iv->hi;
    if (k == 1 && ends == 2) return iv->lo;
    std::size_t r = k - ends;  // 0-based among dyadic midpoints
    // level D holds 2^{D-1} points, starting at offset 2^{D-1} - 1
    std::size_t level = 1;
    while (r >= (std::size_t{1} << level) - 1) ++level;
    std::size_t i = r - ((std::size_t{1} << (level - 1)) - 1);
    Rational step = (iv->hi - iv->lo) / Rational(ipow(2, level));
    return iv->lo + Rational(static_cast<long>(2 * i + 1)) * step;
  }
  if (auto g = std::get_if<GeomSeq>(&a)) return seq_term(*g, static_cast<long>(k) + 1);
  if (auto h = std::get_if<HarSeq>(&a)) return seq_term(*h, h->start + static_cast<long>(k));
  const auto& b = std::get<BiSeq>(a);
  long i = (k == 0) ? 0 : (k % 2 == 1 ? static_cast<long>((k + 1) / 2) : -static_cast<long>(k / 2));
  return b.term(i);
}

void DenseEnumeration::extend_to(std::size_t t) const {
  while (cache_.size() < t) {
    std::size_t u = cache_.size();
    if (u < points_.size()) {
      cache_.push_back(points_[u]);
      continue;
    }
    if (finite_) throw RangeError("enumeration index beyond finite set");
    std::size_t v = u - points_.size();
    cache_.push_back(source_term(v % sources_.size(), v / sources_.size()));
  }
}

const Rational& DenseEnumeration::element(std::size_t t) const {
  if (t == 0) throw RangeError("enumeration is 1-based");
  if (finite_ && t > points_.size()) throw RangeError("enumeration index beyond finite set");
  extend_to(t);
  return cache_[t - 1];
}

std::optional<std::size_t> DenseEnumeration::position(const Rational& v, std::size_t limit) const {
  std::size_t n = finite_ ? points_.size() : limit;
  for (std::size_t t = 1; t <= n; ++t)
    if (element(t) == v) return t;
  return std::nullopt;
}

DenseSchedule::DenseSchedule(const ClosedSetDesc& desc) : enumeration_([&] {
  ClosedSetDesc d = desc.canonical() ? desc : normalize(desc);
  if (!contains(d, 0) || contains(d, 1) || max_value(d) == 0)
    throw HypothesisError("schedule needs 0 in X, 1 not in X and X meeting (0,1)");
  return DenseEnumeration(d);
}()) {}

std::size_t DenseSchedule::slot(long n) const {
  if (n < 1) throw RangeError("schedule index must be positive");
  if (enumeration_.finite()) return static_cast<std::size_t>((n - 1) % static_cast<long>(enumeration_.finite_size())) + 1;
  return static_cast<std::size_t>(__builtin_ctzl(static_cast<unsigned long>(n))) + 1;
}

long DenseSchedule::occurrence(std::size_t t, long q) const {
  if (enumeration_.finite()) return static_cast<long>(t) + q * static_cast<long>(enumeration_.finite_size());
  return (1L << (t - 1)) * (2 * q + 1);
}

long DenseSchedule::rank(long n) const {
  std::size_t t = slot(n);
  if (enumeration_.finite()) return (n - static_cast<long>(t)) / static_cast<long>(enumeration_.finite_size());
  return (n / (1L << (t - 1)) - 1) / 2;
}

Rational dense_sequence(const ClosedSetDesc& desc, long n) { return DenseSchedule(desc)(n); }

}  // namespace fanforge
