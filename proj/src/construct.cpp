#include "fanforge/construct.hpp"

#include <algorithm>

#include "fanforge/errors.hpp"

namespace fanforge {

// ---------------------------------------------------------------- engine

EpgEngine::EpgEngine(const ClosedSetDesc& X)
    : M_(max_value(X)), schedule_(std::make_shared<const DenseSchedule>(X)) {}

EpgEngine EpgEngine::lelek() {
  EpgEngine e;
  e.M_ = 1;
  e.plain_ = std::make_shared<const DenseEnumeration>(ClosedSetDesc({IntervalAtom{0, 1}}, true));
  return e;
}

Rational EpgEngine::y(long n) const {
  if (schedule_) return (*schedule_)(n);
  return plain_->element(static_cast<std::size_t>(n));
}

Rational EpgEngine::tip(const std::vector<int>& path) const {
  if (path.empty()) return 1;
  Rational P = 1;
  int S = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    P *= y(path[i]);
    if (i + 1 < path.size()) S += path[i];
  }
  return pow(M_, S) * P;
}

Rational EpgEngine::scale(const std::vector<int>& path) const {
  Rational P = 1;
  int S = 0;
  for (int n : path) {
    P *= y(n);
    S += n;
  }
  return pow(M_, S) * P;
}

EpgEngine engine_for(const Comb& c) {
  const auto& m = c.meta();
  if (!m.source) throw MetadataError("comb has no construction metadata");
  if (m.provenance == Provenance::EpgConstruction) return EpgEngine(*m.source);
  if (m.provenance == Provenance::Product) {
    ClosedSetDesc Y = remove_one(*m.source);
    if (max_value(Y) == 0) throw MetadataError("product over the star has no self-similar engine");
    return EpgEngine(Y);
  }
  auto v = classify_feasibility(*m.source);
  if (m.provenance == Provenance::Canonical && v.kind == FanKind::LelekFan) return EpgEngine::lelek();
  throw MetadataError("comb provenance has no self-similar engine");
}

// ---------------------------------------------------------------- combs

namespace {

void enumerate(const EpgEngine& eng, int K, int N, std::vector<Blade>& out) {
  std::vector<Rational> y(N + 1);
  for (int n = 1; n <= N; ++n) y[n] = eng.y(n);
  std::vector<Rational> Mpow(static_cast<std::size_t>(K) * N + 1);
  Mpow[0] = 1;
  for (std::size_t i = 1; i < Mpow.size(); ++i) Mpow[i] = Mpow[i - 1] * eng.M();
  std::vector<Rational> inv3(static_cast<std::size_t>(K) * N + 1);
  inv3[0] = 1;
  for (std::size_t i = 1; i < inv3.size(); ++i) inv3[i] = inv3[i - 1] / 3;

  out.push_back(Blade{BladeIndex{}, 0, 1, Rational(1), BladeKind::Plain});
  std::vector<int> path;
  // depth-first; S and P accumulate along the path
  auto rec = [&](auto&& self, int S, const Rational& P, const Rational& x) -> void {
    if (static_cast<int>(path.size()) == K) return;
    for (int j = 1; j <= N; ++j) {
      int S2 = S + j;
      Rational P2 = P * y[j];
      Rational x2 = x + 2 * inv3[S2];
      path.push_back(j);
      out.push_back(Blade{BladeIndex{path, {}}, x2, Mpow[S] * P2, Mpow[S2] * P2, BladeKind::Plain});
      self(self, S2, P2, x2);
      path.pop_back();
    }
  };
  rec(rec, 0, Rational(1), Rational(0));
}

std::size_t blade_count(int K, int N) {
  std::size_t total = 1, level = 1;
  for (int k = 1; k <= K; ++k) {
    level *= static_cast<std::size_t>(N);
    total += level;
  }
  return total;
}

}  // namespace

Comb build_epg_comb(const ClosedSetDesc& X, int K, int N) {
  if (K < 1 || N < 1) throw ArgumentError("depth and branch must be >= 1");
  ClosedSetDesc Xc = X.canonical() ? X : normalize(X);
  auto v = classify_feasibility(Xc);
  if (!v.feasible || v.kind != FanKind::CountableType || max_value(Xc) == 0)
    throw HypothesisError("construction needs 0 in X, 1 not in X and X meeting (0,1)");
  EpgEngine eng(Xc);
  std::vector<Blade> blades;
  blades.reserve(blade_count(K, N));
  enumerate(eng, K, N, blades);
  CombMeta meta{Xc, K, N, Provenance::EpgConstruction, 0};
  return Comb(std::move(blades), std::move(meta));
}

Comb build_canonical(CanonicalKind kind, int K, int N) {
  std::vector<Blade> blades;
  CombMeta meta;
  meta.provenance = Provenance::Canonical;
  switch (kind.type) {
    case CanonicalKind::Nod: {
      if (kind.n < 3) throw ArgumentError("an n-od needs n >= 3");
      int d = 0;
      while ((1 << d) < kind.n) ++d;
      Comb full = maximal_comb(d);
      for (int i = 0; i < kind.n; ++i) {
        Blade b = full.blades()[i];
        b.trace_scale = Rational(1);
        blades.push_back(b);
      }
      meta.source = ClosedSetDesc({}, true);
      meta.depth = d;
      meta.branch = 0;
      break;
    }
    case CanonicalKind::Star: {
      if (N < 2) throw ArgumentError("the star needs branch >= 2");
      blades.push_back(Blade{BladeIndex{}, 0, 1, Rational(1), BladeKind::Plain});
      for (int j = 1; j <= N; ++j) {
        Rational tip = frac(1, ipow(2, static_cast<unsigned long>(j)));
        blades.push_back(Blade{BladeIndex{{j}, {}}, 2 * pow3_inv(j), tip, tip, BladeKind::Plain});
      }
      meta.source = parse_set_expr("pt(0)");
      meta.depth = 1;
      meta.branch = N;
      break;
    }
    case CanonicalKind::Cantor: {
      Comb full = maximal_comb(K);
      blades = full.blades();
      for (auto& b : blades) b.trace_scale = Rational(1);
      meta.source = parse_set_expr("pt(1)");
      meta.depth = K;
      meta.branch = 0;
      break;
    }
    case CanonicalKind::Lelek: {
      if (K < 1 || N < 1) throw ArgumentError("depth and branch must be >= 1");
      enumerate(EpgEngine::lelek(), K, N, blades);
      meta.source = parse_set_expr("iv(0,1)");
      meta.depth = K;
      meta.branch = N;
      break;
    }
  }
  return Comb(std::move(blades), std::move(meta));
}

// ---------------------------------------------------------------- product

Rational interleave_x(const Rational& base_x, const std::string& word) {
  std::vector<int> digits;
  if (!finite_ternary(base_x, digits)) throw ArgumentError("base x must have a finite ternary expansion");
  std::vector<int> flat;
  for (std::size_t i = 0; i < word.size(); ++i) {
    flat.push_back(i < digits.size() ? digits[i] : 0);
    flat.push_back(word[i] - '0');
  }
  for (std::size_t i = word.size(); i < digits.size(); ++i) flat.push_back(digits[i]);
  Integer num = 0;
  for (int d : flat) num = 3 * num + d;
  return frac(num, ipow(3, static_cast<long>(flat.size())));
}

std::pair<Rational, std::string> deinterleave_x(const Rational& flat_x, int cantor_depth) {
  std::vector<int> digits;
  if (!finite_ternary(flat_x, digits)) throw ArgumentError("flat x must have a finite ternary expansion");
  std::size_t d = static_cast<std::size_t>(cantor_depth);
  digits.resize(std::max(digits.size(), 2 * d), 0);
  std::string word(d, '0');
  std::vector<int> base;
  for (std::size_t i = 0; i < d; ++i) {
    base.push_back(digits[2 * i]);
    word[i] = static_cast<char>('0' + digits[2 * i + 1]);
  }
  for (std::size_t i = 2 * d; i < digits.size(); ++i) base.push_back(digits[i]);
  Integer num = 0;
  for (int x : base) num = 3 * num + x;
  return {frac(num, ipow(3, static_cast<long>(base.size()))), word};
}

std::vector<std::string> ProductComb::words() const {
  std::vector<std::string> out;
  for (unsigned long bits = 0; bits < (1UL << cantor_depth); ++bits) {
    std::string w;
    for (int i = cantor_depth - 1; i >= 0; --i) w.push_back((bits >> i) & 1 ? '2' : '0');
    out.push_back(w);
  }
  return out;
}

Blade ProductComb::blade(const BladeIndex& base_index, const std::string& word) const {
  if (static_cast<int>(word.size()) != cantor_depth) throw ArgumentError("word length must equal the Cantor depth");
  Blade b = base.at(BladeIndex{base_index.path, {}});
  b.index.word = word;
  b.x = interleave_x(b.x, word);
  return b;
}

Comb ProductComb::flatten() const {
  std::vector<Blade> out;
  out.reserve(size());
  auto ws = words();
  for (const auto& b : base.blades())
    for (const auto& w : ws) {
      Blade f = b;
      f.index.word = w;
      f.x = interleave_x(b.x, w);
      out.push_back(std::move(f));
    }
  CombMeta meta{source, depth, branch, Provenance::Product, cantor_depth};
  return Comb(std::move(out), std::move(meta));
}

ProductComb build_product(const ClosedSetDesc& X, int K, int N, int cantor_depth) {
  if (cantor_depth < 0 || cantor_depth > 20) throw ArgumentError("Cantor depth must lie in [0,20]");
  ClosedSetDesc Xc = X.canonical() ? X : normalize(X);
  auto v = classify_feasibility(Xc);
  if (!v.feasible || v.kind != FanKind::ProductType) throw HypothesisError("product needs 0, 1 in X with 1 isolated");
  ClosedSetDesc Y = remove_one(Xc);
  ProductComb p;
  p.base = max_value(Y) == 0 ? build_canonical({CanonicalKind::Star}, K, N) : build_epg_comb(Y, K, N);
  p.source = Xc;
  p.depth = K;
  p.branch = N;
  p.cantor_depth = cantor_depth;
  return p;
}

Comb build_fan(const ClosedSetDesc& X, int K, int N, int cantor_depth) {
  ClosedSetDesc Xc = X.canonical() ? X : normalize(X);
  auto v = classify_feasibility(Xc);
  if (!v.feasible) throw HypothesisError("no fan for this set: " + to_string(*v.reason));
  switch (*v.kind) {
    case FanKind::SimpleNOd: return build_canonical({CanonicalKind::Nod, std::max(3, N)}, K, N);
    case FanKind::CantorFan: return build_canonical({CanonicalKind::Cantor}, K, N);
    case FanKind::LelekFan: return build_canonical({CanonicalKind::Lelek}, K, N);
    case FanKind::CountableType:
      if (max_value(Xc) == 0) return build_canonical({CanonicalKind::Star}, K, N);
      return build_epg_comb(Xc, K, N);
    default: return build_product(Xc, K, N, cantor_depth).flatten();
  }
}

ProductComb unflatten(const Comb& flat) {
  const auto& m = flat.meta();
  if (m.provenance != Provenance::Product || !m.source) throw MetadataError("not a product comb");
  ProductComb p;
  p.source = *m.source;
  p.depth = m.depth;
  p.branch = m.branch;
  p.cantor_depth = m.cantor_depth;
  std::string zero(static_cast<std::size_t>(m.cantor_depth), '0');
  std::vector<Blade> base;
  for (const auto& b : flat.blades()) {
    auto [bx, w] = deinterleave_x(b.x, m.cantor_depth);
    if (w != zero) continue;
    Blade c = b;
    c.x = bx;
    c.index = BladeIndex{path_from_x(bx), {}};
    base.push_back(std::move(c));
  }
  ClosedSetDesc Y = remove_one(p.source);
  CombMeta bm{Y, m.depth, m.branch, max_value(Y) == 0 ? Provenance::Canonical : Provenance::EpgConstruction, 0};
  p.base = Comb(std::move(base), std::move(bm));
  if (p.base.size() << p.cantor_depth != flat.size()) throw SchemaError("product comb is not a full product");
  return p;
}

// ---------------------------------------------------------------- spatial model

std::string basic_cell(int n) {
  if (n < 1) throw ArgumentError("cells are numbered from 1");
  int depth = 0;
  long first = 1;  // number of the first cell at this depth
  while (n >= first + (1L << depth)) {
    first += 1L << depth;
    ++depth;
  }
  long i = n - first;
  std::string cell;
  for (int b = depth - 1; b >= 0; --b) cell.push_back((i >> b) & 1 ? '2' : '0');
  return cell;
}

Rational cell_left(const std::string& cell) {
  Integer num = 0;
  for (char c : cell) num = 3 * num + (c - '0');
  return frac(num, ipow(3, cell.size()));
}

Rational sheet_phi(const std::string& cell, const Rational& x) {
  std::vector<int> digits;
  if (!finite_ternary(x, digits)) throw ArgumentError("sheet input must have a finite ternary expansion");
  Integer num = 0;
  for (char c : cell) num = 3 * num + (c - '0');
  num = 3 * num + 2;
  num = 3 * num + 2;
  for (int d : digits) {
    num = 3 * num;
    num = 3 * num + d;
  }
  return frac(num, ipow(3, cell.size() + 2 + 2 * digits.size()));
}

bool in_sheet_ground_set(const std::string& cell, const Rational& x) {
  std::vector<int> digits;
  if (!finite_ternary(x, digits)) return false;
  std::size_t L = cell.size();
  digits.resize(std::max(digits.size(), L + 2), 0);
  for (std::size_t i = 0; i < L; ++i)
    if (digits[i] != cell[i] - '0') return false;
  if (digits[L] != 2 || digits[L + 1] != 2) return false;
  for (std::size_t i = L + 2; i < digits.size(); ++i) {
    std::size_t off = i - (L + 2) + 1;
    if (off % 2 == 1 && digits[i] != 0) return false;
    if (digits[i] == 1) return false;
  }
  return true;
}

SpatialModel build_nonsmooth_3d(int m, int K, int N) {
  if (m < 1) throw ArgumentError("need at least one sheet");
  SpatialModel sm;
  Comb lelek = build_canonical({CanonicalKind::Lelek}, K, N);
  std::vector<Rational> attach;
  for (int n = 1; n <= m; ++n) {
    Sheet s;
    s.n = n;
    s.cell = basic_cell(n);
    for (const auto& b : lelek.blades()) {
      Rational px = sheet_phi(s.cell, b.x);
      attach.push_back(px);
      SheetBlade sb{b.x, b.tip, {}};
      sb.polyline = {Point3{px, 0, 0}, Point3{px, 1, 0}, Point3{px, 1 - b.tip / 2, b.tip / (2 * n)}};
      s.blades.push_back(std::move(sb));
    }
    sm.sheets.push_back(std::move(s));
  }
  std::sort(attach.begin(), attach.end());
  Comb base = maximal_comb(K);
  std::vector<Blade> blades = base.blades();
  for (auto& b : blades)
    b.kind = std::binary_search(attach.begin(), attach.end(), b.x) ? BladeKind::TypeII : BladeKind::TypeI;
  CombMeta meta = base.meta();
  sm.base = Comb(std::move(blades), meta);
  return sm;
}

}  // namespace fanforge
