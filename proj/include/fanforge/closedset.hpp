#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fanforge/pwl.hpp"
#include "fanforge/rational.hpp"

namespace fanforge {

enum class Direction { Above, Below };

struct PointAtom {
  Rational p;
  bool operator==(const PointAtom&) const = default;
};

struct IntervalAtom {
  Rational lo, hi;
  bool operator==(const IntervalAtom&) const = default;
};

// {limit ± offset·ratio^k : k ≥ 1} ∪ {limit}
struct GeomSeq {
  Rational limit, offset, ratio;
  Direction dir = Direction::Above;
  bool operator==(const GeomSeq&) const = default;
};

// {limit ± scale/k : k ≥ start} ∪ {limit}
struct HarSeq {
  Rational limit, scale;
  Direction dir = Direction::Above;
  long start = 1;
  bool operator==(const HarSeq&) const = default;
};

// p_i = hi − (hi−lo)/2·ratio^i for i ≥ 0, p_i = lo + (hi−lo)/2·ratio^{−i} for i < 0;
// both limits included.
struct BiSeq {
  Rational lo, hi, ratio;
  bool operator==(const BiSeq&) const = default;
  Rational term(long i) const;
  // index of q among the terms, if it is one
  std::optional<long> index_of(const Rational& q) const;
};

using Atom = std::variant<PointAtom, IntervalAtom, GeomSeq, HarSeq, BiSeq>;

Rational atom_inf(const Atom& a);
Rational atom_sup(const Atom& a);
bool atom_contains(const Atom& a, const Rational& q);
bool is_sequence(const Atom& a);
// Limits of a sequence atom (one for Geom/Har, two for BiSeq); empty otherwise.
std::vector<Rational> atom_limits(const Atom& a);
// k-th term (k ≥ 1) of a one-sided sequence atom.
Rational seq_term(const GeomSeq& g, long k);
Rational seq_term(const HarSeq& h, long k);
void validate_atom(const Atom& a);  // throws RangeError / ArgumentError

class ClosedSetDesc {
 public:
  ClosedSetDesc() = default;
  explicit ClosedSetDesc(std::vector<Atom> atoms, bool canonical = false)
      : atoms_(std::move(atoms)), canonical_(canonical) {}

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool canonical() const { return canonical_; }
  bool empty() const { return atoms_.empty(); }

  bool operator==(const ClosedSetDesc& o) const { return atoms_ == o.atoms_; }

 private:
  std::vector<Atom> atoms_;
  bool canonical_ = false;
};

enum class FanKind { SimpleNOd, CantorFan, LelekFan, CountableType, ProductType };
enum class InfeasibleReason { NoEndpointRule, OneNotIsolated, CountUncountConflict };

struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<FanKind> kind;
  std::optional<InfeasibleReason> reason;
};

std::string to_string(FanKind k);
std::string to_string(InfeasibleReason r);

ClosedSetDesc normalize(const ClosedSetDesc& desc);
bool contains(const ClosedSetDesc& desc, const Rational& q);
bool is_isolated(const ClosedSetDesc& desc, const Rational& q);
Rational max_value(const ClosedSetDesc& desc);
Rational min_value(const ClosedSetDesc& desc);
// True iff [lo, hi] meets the set.
bool meets(const ClosedSetDesc& desc, const Rational& lo, const Rational& hi);
FeasibilityVerdict classify_feasibility(const ClosedSetDesc& desc);

ClosedSetDesc parse_set_expr(const std::string& text);
std::string to_expr(const ClosedSetDesc& desc);

// X_A with a_n, b_n the quarter points of (1/(n+1), 1/n).
ClosedSetDesc x_family(const std::vector<int>& A);
// X \ {1} for a set in which 1 is isolated.
ClosedSetDesc remove_one(const ClosedSetDesc& desc);

// Deterministic enumeration d_1, d_2, ... of a countable dense subset of X \ {0}.
class DenseEnumeration {
 public:
  explicit DenseEnumeration(const ClosedSetDesc& desc);
  bool finite() const { return finite_; }
  std::size_t finite_size() const { return points_.size(); }
  // 1-based
  const Rational& element(std::size_t t) const;
  // 1-based position of the first occurrence of v, searching at most `limit` elements.
  std::optional<std::size_t> position(const Rational& v, std::size_t limit = 1u << 16) const;

 private:
  void extend_to(std::size_t t) const;
  Rational source_term(std::size_t src, std::size_t k) const;

  std::vector<Rational> points_;
  std::vector<Atom> sources_;
  bool finite_ = true;
  mutable std::vector<Rational> cache_;
  mutable std::size_t round_ = 0;
};

// y_n for the construction: recurrent schedule over the enumeration.
class DenseSchedule {
 public:
  explicit DenseSchedule(const ClosedSetDesc& desc);
  Rational operator()(long n) const { return enumeration_.element(slot(n)); }
  // which enumerated element y_n is (1-based)
  std::size_t slot(long n) const;
  // the q-th (0-based) n with slot(n) = t
  long occurrence(std::size_t t, long q) const;
  // rank of n among the n' with the same slot
  long rank(long n) const;
  const DenseEnumeration& enumeration() const { return enumeration_; }

 private:
  DenseEnumeration enumeration_;
};

Rational dense_sequence(const ClosedSetDesc& desc, long n);

struct EquivalenceResult {
  enum class Verdict { Yes, No, Unknown } verdict = Verdict::Unknown;
  std::optional<PiecewiseLinearMap> witness;
  std::string distinguisher;
};

EquivalenceResult equivalently_embedded(const ClosedSetDesc& a, const ClosedSetDesc& b);
// Order-token signature used by equivalently_embedded, e.g. "0 LIM RUN< IV PT".
std::string signature_string(const ClosedSetDesc& desc);

}  // namespace fanforge
