#include "fanforge/comb.hpp"

#include <algorithm>
#include <sstream>

#include "fanforge/errors.hpp"

namespace fanforge {

int BladeIndex::sum() const {
  int s = 0;
  for (int n : path) s += n;
  return s;
}

bool BladeIndex::extends(const BladeIndex& prefix) const {
  if (prefix.path.size() > path.size() || word != prefix.word) return false;
  return std::equal(prefix.path.begin(), prefix.path.end(), path.begin());
}

BladeIndex BladeIndex::suffix(std::size_t from) const {
  return BladeIndex{std::vector<int>(path.begin() + static_cast<long>(from), path.end()), word};
}

std::string to_string(const BladeIndex& idx) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < idx.path.size(); ++i) os << (i ? "," : "") << idx.path[i];
  os << ')';
  if (!idx.word.empty()) os << '[' << idx.word << ']';
  return os.str();
}

Rational index_x(const std::vector<int>& path) {
  // integer numerator over 3^S
  int S = 0;
  for (int n : path) S += n;
  Integer num = 0;
  int acc = 0;
  for (int n : path) {
    acc += n;
    num += 2 * ipow(3, static_cast<unsigned long>(S - acc));
  }
  return frac(num, ipow(3, static_cast<unsigned long>(S)));
}

std::vector<int> path_from_x(const Rational& x) {
  std::vector<int> digits;
  if (!finite_ternary(x, digits)) throw ArgumentError(to_string(x) + " has no finite ternary expansion");
  std::vector<int> path;
  int last = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] == 1) throw ArgumentError(to_string(x) + " is not a Cantor left endpoint");
    if (digits[i] == 2) {
      path.push_back(static_cast<int>(i) + 1 - last);
      last = static_cast<int>(i) + 1;
    }
  }
  return path;
}

std::string to_string(BladeKind k) {
  switch (k) {
    case BladeKind::Plain: return "plain";
    case BladeKind::TypeI: return "typeI";
    case BladeKind::TypeII: return "typeII";
  }
  return "plain";
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::EpgConstruction: return "epg-construction";
    case Provenance::Product: return "product";
    case Provenance::Canonical: return "canonical";
    case Provenance::Maximal: return "maximal";
    case Provenance::Imported: return "imported";
  }
  return "imported";
}

BladeKind blade_kind_from(const std::string& s) {
  if (s == "plain") return BladeKind::Plain;
  if (s == "typeI") return BladeKind::TypeI;
  if (s == "typeII") return BladeKind::TypeII;
  throw SchemaError("unknown blade kind '" + s + "'");
}

Provenance provenance_from(const std::string& s) {
  for (auto p : {Provenance::EpgConstruction, Provenance::Product, Provenance::Canonical, Provenance::Maximal,
                 Provenance::Imported})
    if (to_string(p) == s) return p;
  throw SchemaError("unknown provenance '" + s + "'");
}

Comb::Comb(std::vector<Blade> blades, CombMeta meta) : blades_(std::move(blades)), meta_(std::move(meta)) {
  std::stable_sort(blades_.begin(), blades_.end(), [](const Blade& a, const Blade& b) { return a.x < b.x; });
  for (std::size_t i = 0; i < blades_.size(); ++i) by_index_.emplace(blades_[i].index, i);
}

const Blade* Comb::find(const BladeIndex& idx) const {
  auto it = by_index_.find(idx);
  return it == by_index_.end() ? nullptr : &blades_[it->second];
}

const Blade& Comb::at(const BladeIndex& idx) const {
  if (auto b = find(idx)) return *b;
  throw ArgumentError("no blade with index " + to_string(idx));
}

const Blade* Comb::find_x(const Rational& x) const {
  auto it = std::lower_bound(blades_.begin(), blades_.end(), x,
                             [](const Blade& b, const Rational& v) { return b.x < v; });
  if (it != blades_.end() && it->x == x) return &*it;
  return nullptr;
}

std::pair<std::size_t, std::size_t> Comb::range(const Rational& lo, const Rational& hi) const {
  auto first = std::lower_bound(blades_.begin(), blades_.end(), lo,
                                [](const Blade& b, const Rational& v) { return b.x < v; });
  auto last = std::upper_bound(first, blades_.end(), hi,
                               [](const Rational& v, const Blade& b) { return v < b.x; });
  return {static_cast<std::size_t>(first - blades_.begin()), static_cast<std::size_t>(last - blades_.begin())};
}

Rational scale_anchor(const Comb& c) {
  const auto& src = c.meta().source;
  if (!src) throw MetadataError("comb has no construction metadata");
  ClosedSetDesc X = *src;
  if (c.meta().provenance == Provenance::Product) X = remove_one(X);
  if (X.empty()) return 0;
  return max_value(X);
}

std::vector<Violation> validate_comb(const Comb& c) {
  std::vector<Violation> out;
  const auto& bl = c.blades();
  for (std::size_t i = 1; i < bl.size(); ++i)
    if (bl[i].x == bl[i - 1].x) out.push_back({"distinctness", "duplicate x " + to_string(bl[i].x)});
  for (const auto& b : bl) {
    if (b.x < 0 || b.x > 1) out.push_back({"clause-1", "blade " + to_string(b.index) + " leaves the base row"});
    if (!is_cantor_left_endpoint(b.x))
      out.push_back({"clause-2", "x = " + to_string(b.x) + " is not in the Cantor set's left endpoints"});
    if (!(b.tip > 0 && b.tip <= 1))
      out.push_back({"clause-3", "tip of " + to_string(b.index) + " outside (0,1]"});
  }
  if (bl.size() < 3) out.push_back({"clause-4", "fewer than 3 blades, so |C_y| <= 2 for every y"});
  if (c.meta().source) {
    Rational M;
    try {
      M = scale_anchor(c);
    } catch (const Error& e) {
      out.push_back({"metadata", e.what()});
      return out;
    }
    for (const auto& b : bl)
      if (b.trace_scale && (*b.trace_scale < 0 || *b.trace_scale * M > b.tip))
        out.push_back({"metadata", "trace scale of " + to_string(b.index) + " exceeds tip / M"});
  }
  return out;
}

Comb maximal_comb(int depth) {
  if (depth < 1) throw ArgumentError("maximal comb needs depth >= 1");
  std::vector<Blade> blades;
  Integer den = ipow(3, static_cast<unsigned long>(depth));
  for (unsigned long bits = 0; bits < (1UL << depth); ++bits) {
    Integer num = 0;
    for (int i = 0; i < depth; ++i)
      if (bits & (1UL << (depth - 1 - i))) num += 2 * ipow(3, static_cast<unsigned long>(depth - 1 - i));
    Rational x = frac(num, den);
    blades.push_back(Blade{BladeIndex{path_from_x(x), {}}, x, 1, std::nullopt, BladeKind::Plain});
  }
  CombMeta meta;
  meta.depth = depth;
  meta.provenance = Provenance::Maximal;
  return Comb(std::move(blades), std::move(meta));
}

std::vector<Rational> level_set(const Comb& c, const Rational& y) {
  std::vector<Rational> out;
  for (const auto& b : c.blades())
    if (b.tip >= y) out.push_back(b.x);
  return out;
}

std::vector<std::pair<Rational, Rational>> tips(const Comb& c) {
  std::vector<std::pair<Rational, Rational>> out;
  out.reserve(c.size());
  for (const auto& b : c.blades()) out.emplace_back(b.x, b.tip);
  return out;
}

PiecewiseLinearMap phi_blade(const Comb& c, const BladeIndex& idx) {
  const Blade& b = c.at(idx);
  if (!b.trace_scale) throw MetadataError("blade " + to_string(idx) + " has no trace scale");
  Rational M = scale_anchor(c);
  const Rational& s = *b.trace_scale;
  if (M == 0) return PiecewiseLinearMap({{0, 0}, {1, b.tip}});
  if (M == 1) {
    if (s != b.tip) throw MetadataError("trace scale must equal the tip when M = 1");
    return PiecewiseLinearMap({{0, 0}, {1, b.tip}});
  }
  if (!(s * M < b.tip)) throw MetadataError("trace scale inconsistent with tip");
  return PiecewiseLinearMap({{0, 0}, {M, s * M}, {1, b.tip}});
}

std::string to_string(const FanPoint& p) {
  if (p.is_top()) return "t";
  return to_string(p.blade().index) + "@" + to_string(p.blade().height);
}

void check_point(const Comb& c, const FanPoint& p) {
  if (p.is_top()) return;
  const Blade* b = c.find(p.blade().index);
  if (!b) throw InvalidPointError("no blade " + to_string(p.blade().index));
  if (!(p.blade().height > 0 && p.blade().height <= b->tip))
    throw InvalidPointError("height outside (0, tip] on blade " + to_string(b->index));
}

}  // namespace fanforge
