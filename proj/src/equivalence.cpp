#include <algorithm>
#include <sstream>

#include "fanforge/closedset.hpp"
#include "fanforge/errors.hpp"

namespace fanforge {

namespace {

constexpr long kMatchedTerms = 12;
constexpr long kExplicitCap = 10000;

enum class Tok { PT, IV, LIM, RUNL, RUNR };

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::PT: return "PT";
    case Tok::IV: return "IV";
    case Tok::LIM: return "LIM";
    case Tok::RUNL: return "RUN<";
    case Tok::RUNR: return "RUN>";
  }
  return "?";
}

// Generates the terms of a one-sided run ordered from the far end toward the limit.
struct RunGen {
  std::variant<GeomSeq, HarSeq> seq;
  long first = 1;                 // first sequence index in the run
  std::vector<Rational> prefix;   // absorbed isolated points, far end first

  Rational element(long k) const {
    if (k < static_cast<long>(prefix.size())) return prefix[k];
    long idx = first + (k - static_cast<long>(prefix.size()));
    return std::visit([idx](const auto& s) { return seq_term(s, idx); }, seq);
  }
};

struct Token {
  Tok kind;
  Rational key;   // position along [0,1]
  int order = 0;  // tie-break at equal keys
  Rational hi;    // IV only
  RunGen run;     // RUN only
};

struct Signature {
  bool has0 = false, has1 = false;
  std::vector<Token> tokens;
  bool unknown = false;
  std::string unknown_reason;
};

struct Piece {
  std::variant<GeomSeq, HarSeq> seq;
  long k0;
  Rational limit;
  Direction dir;
  Rational term(long k) const {
    return std::visit([k](const auto& s) { return seq_term(s, k); }, seq);
  }
};

std::vector<Piece> pieces_of(const Atom& a) {
  if (auto g = std::get_if<GeomSeq>(&a)) return {Piece{*g, 1, g->limit, g->dir}};
  if (auto h = std::get_if<HarSeq>(&a)) return {Piece{*h, h->start, h->limit, h->dir}};
  const auto& b = std::get<BiSeq>(a);
  Rational half = (b.hi - b.lo) / 2;
  GeomSeq lower{b.lo, half, b.ratio, Direction::Above};
  GeomSeq upper{b.hi, half / b.ratio, b.ratio, Direction::Below};
  return {Piece{lower, 1, b.lo, Direction::Above}, Piece{upper, 1, b.hi, Direction::Below}};
}

Signature build_signature(const ClosedSetDesc& in) {
  ClosedSetDesc d = in.canonical() ? in : normalize(in);
  Signature sig;
  sig.has0 = contains(d, 0);
  sig.has1 = contains(d, 1);

  std::vector<Rational> interval_ends;
  std::vector<Rational> critical;  // values of non-sequence atoms
  for (const auto& a : d.atoms()) {
    if (auto p = std::get_if<PointAtom>(&a)) critical.push_back(p->p);
    if (auto iv = std::get_if<IntervalAtom>(&a)) {
      critical.push_back(iv->lo);
      critical.push_back(iv->hi);
      interval_ends.push_back(iv->lo);
      interval_ends.push_back(iv->hi);
    }
  }
  auto is_interval_end = [&](const Rational& q) {
    return std::find(interval_ends.begin(), interval_ends.end(), q) != interval_ends.end();
  };

  std::vector<Token> toks;
  std::vector<Rational> limits;
  for (const auto& a : d.atoms()) {
    if (auto p = std::get_if<PointAtom>(&a)) {
      toks.push_back({Tok::PT, p->p, 1, 0, {}});
      continue;
    }
    if (auto iv = std::get_if<IntervalAtom>(&a)) {
      toks.push_back({Tok::IV, iv->lo, 2, iv->hi, {}});
      continue;
    }
    if (auto b = std::get_if<BiSeq>(&a)) {
      if (is_interval_end(b->lo) || is_interval_end(b->hi)) {
        sig.unknown = true;
        sig.unknown_reason = "two-sided sequence limit shared with an interval endpoint";
      }
    }
    for (const auto& pc : pieces_of(a)) {
      limits.push_back(pc.limit);
      bool above = pc.dir == Direction::Above;
      Rational far = pc.term(pc.k0);
      // other atoms strictly between the limit and the far end cut the run
      std::optional<Rational> cut;
      for (const auto& c : critical) {
        bool inside = above ? (pc.limit < c && c < far) : (far < c && c < pc.limit);
        if (!inside) continue;
        if (!cut || (above ? c < *cut : c > *cut)) cut = c;
      }
      long k = pc.k0;
      if (cut) {
        while (above ? pc.term(k) > *cut : pc.term(k) < *cut) {
          toks.push_back({Tok::PT, pc.term(k), 1, 0, {}});
          if (++k - pc.k0 > kExplicitCap) {
            sig.unknown = true;
            sig.unknown_reason = "too many explicit sequence terms";
            break;
          }
        }
      }
      Token run{above ? Tok::RUNL : Tok::RUNR, pc.limit, above ? 3 : 0, 0, RunGen{pc.seq, k, {}}};
      toks.push_back(run);
    }
  }
  std::sort(limits.begin(), limits.end());
  limits.erase(std::unique(limits.begin(), limits.end()), limits.end());
  for (const auto& L : limits)
    if (!is_interval_end(L)) toks.push_back({Tok::LIM, L, 1, 0, {}});

  std::stable_sort(toks.begin(), toks.end(), [](const Token& x, const Token& y) {
    if (x.key != y.key) return x.key < y.key;
    return x.order < y.order;
  });

  // absorb isolated points into the far side of adjacent runs
  std::vector<Token> left;
  for (auto& t : toks) {
    if (t.kind == Tok::PT && !left.empty() && left.back().kind == Tok::RUNL) {
      auto& pre = left.back().run.prefix;
      pre.insert(pre.begin(), t.key);
      continue;
    }
    left.push_back(std::move(t));
  }
  std::vector<Token> right;
  for (auto it = left.rbegin(); it != left.rend(); ++it) {
    if (it->kind == Tok::PT && !right.empty() && right.back().kind == Tok::RUNR) {
      auto& pre = right.back().run.prefix;
      pre.insert(pre.begin(), it->key);
      continue;
    }
    right.push_back(std::move(*it));
  }
  std::reverse(right.begin(), right.end());
  sig.tokens = std::move(right);
  return sig;
}

std::string describe(const Signature& s) {
  std::ostringstream os;
  os << (s.has0 ? "0" : "-") << (s.has1 ? "1" : "-");
  for (const auto& t : s.tokens) os << ' ' << tok_name(t.kind);
  return os.str();
}

}  // namespace

std::string signature_string(const ClosedSetDesc& desc) { return describe(build_signature(desc)); }

EquivalenceResult equivalently_embedded(const ClosedSetDesc& a, const ClosedSetDesc& b) {
  Signature sa = build_signature(a), sb = build_signature(b);
  EquivalenceResult res;
  if (sa.unknown || sb.unknown) {
    res.verdict = EquivalenceResult::Verdict::Unknown;
    res.distinguisher = sa.unknown ? sa.unknown_reason : sb.unknown_reason;
    return res;
  }
  auto fail = [&](std::string why) {
    res.verdict = EquivalenceResult::Verdict::No;
    res.distinguisher = std::move(why);
    return res;
  };
  if (sa.has0 != sb.has0) return fail("membership of 0");
  if (sa.has1 != sb.has1) return fail("membership of 1");
  std::size_t n = std::min(sa.tokens.size(), sb.tokens.size());
  for (std::size_t i = 0; i < n; ++i)
    if (sa.tokens[i].kind != sb.tokens[i].kind)
      return fail("token " + std::to_string(i) + ": " + tok_name(sa.tokens[i].kind) + " vs " +
                  tok_name(sb.tokens[i].kind));
  if (sa.tokens.size() != sb.tokens.size())
    return fail("token " + std::to_string(n) + ": " +
                (sa.tokens.size() > n ? tok_name(sa.tokens[n].kind) : "end") + " vs " +
                (sb.tokens.size() > n ? tok_name(sb.tokens[n].kind) : "end"));

  std::vector<PiecewiseLinearMap::Point> pts{{0, 0}, {1, 1}};
  for (std::size_t i = 0; i < n; ++i) {
    const Token& x = sa.tokens[i];
    const Token& y = sb.tokens[i];
    switch (x.kind) {
      case Tok::PT:
      case Tok::LIM: pts.emplace_back(x.key, y.key); break;
      case Tok::IV:
        pts.emplace_back(x.key, y.key);
        pts.emplace_back(x.hi, y.hi);
        break;
      case Tok::RUNL:
      case Tok::RUNR:
        pts.emplace_back(x.key, y.key);
        for (long k = 0; k < kMatchedTerms; ++k) pts.emplace_back(x.run.element(k), y.run.element(k));
        break;
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  try {
    res.witness = PiecewiseLinearMap(std::move(pts));
  } catch (const ArgumentError&) {
    return fail("order of matched points disagrees");
  }
  res.verdict = EquivalenceResult::Verdict::Yes;
  return res;
}

}  // namespace fanforge
