#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fanforge/comb.hpp"
#include "fanforge/construct.hpp"
#include "fanforge/pwl.hpp"
#include "fanforge/rational.hpp"

namespace fanforge {

struct PartitionScheme;
struct PartitionLabel;

struct CellMapDescriptor {
  enum class Kind { Identity, SelfSimilar, EndpointSwap, VerticalAdjust, BladeShift } kind = Kind::Identity;
  BladeIndex idx1, idx2;     // self_similar / endpoint_swap; vertical_adjust uses idx1
  std::optional<int> split;  // endpoint_swap of nested cells: W keeps next entries > split
  Rational y1, y2, eps;      // vertical_adjust
  int column = 0;            // vertical_adjust: descendants with next entry > column move
  PiecewiseLinearMap map;    // h_0 or φ
  long i = 0, j = 0;         // blade_shift
  long window = 0;           // blade_shift: |i|, |j| bound
  std::vector<std::pair<long, long>> psi;  // truncated ψ, entries with ψ(n) ≠ n
  std::vector<long> unmatched;             // n ≤ N with ψ(n) > N
  std::map<std::string, Rational> params;
};
std::string to_string(CellMapDescriptor::Kind k);

struct Recipe {
  std::vector<CellMapDescriptor> steps;
  std::string describe() const;
};

// Evaluates descriptors on points of the (untruncated) construction; blades past
// the truncation are handled through the construction engine.
class Evaluator {
 public:
  explicit Evaluator(const Comb& c);
  const EpgEngine& engine() const { return engine_; }
  Rational tip(const std::vector<int>& path) const { return engine_.tip(path); }
  // φ_B for any index of the construction
  PiecewiseLinearMap phi(const std::vector<int>& path) const;
  // φ_B^{-1}(height); 1 at tips
  Rational pullback(const FanPoint& p) const;
  PartitionLabel label(const FanPoint& p, const PartitionScheme& s) const;
  void check(const FanPoint& p) const;  // InvalidPointError

  FanPoint self_similar(const BladeIndex& idx, const FanPoint& p) const;
  FanPoint self_similar_inverse(const BladeIndex& idx, const FanPoint& p) const;
  FanPoint apply(const CellMapDescriptor& d, const FanPoint& p) const;
  FanPoint apply(const Recipe& r, const FanPoint& p) const;
  long psi(const CellMapDescriptor& d, long n) const;

 private:
  long psi_uncached(const CellMapDescriptor& d, long n) const;
  const Comb* comb_;
  EpgEngine engine_;
  mutable std::map<std::pair<long, long>, long> psi_cache_;
};

FanPoint self_similar_map(const Comb& c, const BladeIndex& idx, const FanPoint& p);

struct TipShiftResult {
  bool pass = true;
  std::size_t checked = 0;
  std::optional<BladeIndex> counterexample;
};
TipShiftResult verify_tip_shift_identity(const Comb& c, const BladeIndex& k_index, int depth_limit);

CellMapDescriptor endpoint_swap(const Comb& c, const BladeIndex& idx1, const BladeIndex& idx2);
// W and h[W] of a swap descriptor
bool in_swap_domain(const CellMapDescriptor& d, const BladeIndex& idx);
bool in_swap_image(const CellMapDescriptor& d, const BladeIndex& idx);

CellMapDescriptor vertical_adjust(const Comb& c, const BladeIndex& blade, const Rational& y1, const Rational& y2,
                                  const Rational& eps);

// Entry j-1: max distance between h(z) and h(z0) over leftmost targets z0 = (0, y)
// and sampled comb points z within 3^-j of z0 (blades of index length <= 2).
struct ContinuityReport {
  std::vector<double> scale_max;
};
CellMapDescriptor blade_shift(const Comb& c, long i, long j, long window = 6);
ContinuityReport blade_shift_continuity(const Comb& c, const CellMapDescriptor& d, int scales = 8);

// Recipe of swaps, vertical adjusts and blade shifts carrying p to q.
// RefusalError when the partition labels of p and q differ.
Recipe orbit_witness(const Comb& c, const FanPoint& p, const FanPoint& q, const PartitionScheme& s, long window = 6);

}  // namespace fanforge
