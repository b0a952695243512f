#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fanforge/closedset.hpp"
#include "fanforge/comb.hpp"
#include "fanforge/construct.hpp"
#include "fanforge/rational.hpp"

namespace fanforge {

struct TraceApprox {
  BladeIndex blade;
  std::vector<std::pair<Rational, Rational>> heights;  // disjoint, sorted
  std::vector<Rational> delta_schedule;                // decreasing
  bool includes_base = false;
};

// Windows and tolerances are fixed per comb, so batch callers reuse one oracle.
class TraceOracle {
 public:
  explicit TraceOracle(const Comb& c);
  TraceApprox trace(const BladeIndex& idx) const;
  int finest_level() const { return J_; }
  Rational delta(const Blade& b, int j) const;
  Rational cluster_gap(const Blade& b) const { return 3 * delta(b, J_); }

 private:
  const Comb* comb_;
  std::optional<ProductComb> product_;
  bool relative_ = false;
  int J_ = 1;
  Rational min1_, min2_, max_tip_;  // two smallest tips, largest tip
  const Comb& geometry() const { return product_ ? product_->base : *comb_; }
  TraceApprox trace_plain(const Comb& g, const BladeIndex& idx) const;
};

TraceApprox trace_extract(const Comb& c, const BladeIndex& idx);

struct BladeReport {
  BladeIndex index;
  bool pass = false;
  Rational gap;  // one-sided: trace points to the target set
};

struct VerifyReport {
  Rational eps;
  std::vector<BladeReport> blades;
  bool pass = true;
};

// Blades with index length above max_index_length are skipped (negative: none).
VerifyReport verify_epg(const Comb& c, const ClosedSetDesc& X, const Rational& eps, int max_index_length = -1);

// sup over the intervals of the distance to the closed set `pieces` (sorted, disjoint)
Rational one_sided_gap(const std::vector<std::pair<Rational, Rational>>& intervals,
                       const std::vector<std::pair<Rational, Rational>>& pieces);
// φ[X] as sorted closed pieces; sequence tails closer than tol collapse into their hull
std::vector<std::pair<Rational, Rational>> image_pieces(const PiecewiseLinearMap& phi, const ClosedSetDesc& X,
                                                        const Rational& tol);

enum class CardinalityType { Countable, Cantor, Mixed };
std::string to_string(CardinalityType t);
CardinalityType cardinality_probe(const Comb& c);

struct PartitionScheme {
  enum Parity { Odd, Even } parity;
  int m = 1;
};
// "odd(2)", "even(1)"
PartitionScheme parse_scheme(const std::string& s);
std::string to_string(const PartitionScheme& s);

struct PartitionLabel {
  enum Tag { T, E, A, D, L, G } tag;
  int i = 0;  // A(i), D(i)
  bool operator==(const PartitionLabel&) const = default;
};
std::string to_string(const PartitionLabel& l);

// Default source sets: odd a_i = i/(m+1); even biseq(0,1/2,1/2) ∪ {0,1/2} ∪ {1-2^-i : 2 <= i <= m}.
ClosedSetDesc scheme_set(const PartitionScheme& s);
// cutpoints a_1 < ... < a_m of the comb's source; SchemeMismatchError unless it has the scheme's shape
std::vector<Rational> scheme_cutpoints(const Comb& c, const PartitionScheme& s);

PartitionLabel label_partition(const Comb& c, const FanPoint& p, const PartitionScheme& s);
// label of a φ_B-pullback value u in (0,1)
PartitionLabel label_pullback(const Comb& c, const Rational& u, const PartitionScheme& s);
// Deterministic sample: Top, tips, and points at the φ_B-images of the cutpoints, the
// midpoints between them and (even schemes) run terms p_k and gap midpoints, |k| <= 3,
// on blades of index length <= 2.
std::vector<FanPoint> partition_sample(const Comb& c, const PartitionScheme& s, int count, unsigned seed = 1);
// Number of classes the scheme realizes: 2m+3 (odd), 2m+4 (even).
int scheme_class_count(const PartitionScheme& s);

// Odd schemes only: label of (0, y) on the leftmost blade from trace clusters alone.
PartitionLabel topological_label(const Comb& c, const Rational& y, const PartitionScheme& s);

}  // namespace fanforge
