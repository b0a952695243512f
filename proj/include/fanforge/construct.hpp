#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fanforge/closedset.hpp"
#include "fanforge/comb.hpp"

namespace fanforge {

// Coordinates of the self-similar construction for an arbitrary index.
class EpgEngine {
 public:
  // Recurrent schedule over X (0 ∈ X, 1 ∉ X).
  explicit EpgEngine(const ClosedSetDesc& X);
  // M = 1 and y_n = d_n over the dyadics of (0,1].
  static EpgEngine lelek();

  const Rational& M() const { return M_; }
  Rational y(long n) const;
  const DenseSchedule* schedule() const { return schedule_.get(); }

  Rational x(const std::vector<int>& path) const { return index_x(path); }
  Rational tip(const std::vector<int>& path) const;      // e
  Rational scale(const std::vector<int>& path) const;    // s, with m = s·M
  Rational m(const std::vector<int>& path) const { return scale(path) * M_; }

 private:
  EpgEngine() = default;
  Rational M_;
  std::shared_ptr<const DenseSchedule> schedule_;
  std::shared_ptr<const DenseEnumeration> plain_;
};

// Engine matching a comb's construction metadata; MetadataError otherwise.
EpgEngine engine_for(const Comb& c);

Comb build_epg_comb(const ClosedSetDesc& X, int K, int N);

struct ProductComb {
  Comb base;
  ClosedSetDesc source;
  int depth = 0, branch = 0;
  int cantor_depth = 0;

  std::size_t size() const { return base.size() << cantor_depth; }
  // all {0,2}-words of length cantor_depth, lexicographic
  std::vector<std::string> words() const;
  Blade blade(const BladeIndex& base_index, const std::string& word) const;
  Comb flatten() const;
};

// x of the product blade: the first d base digits alternate with the d word
// digits, remaining base digits follow unchanged (d = 0 is the identity).
Rational interleave_x(const Rational& base_x, const std::string& word);
// inverse of interleave_x
std::pair<Rational, std::string> deinterleave_x(const Rational& flat_x, int cantor_depth);

ProductComb build_product(const ClosedSetDesc& X, int K, int N, int cantor_depth);
// rebuild the product view from a flattened comb
ProductComb unflatten(const Comb& flat);

struct CanonicalKind {
  enum Type { Nod, Star, Cantor, Lelek } type;
  int n = 3;  // arms of the n-od
};

Comb build_canonical(CanonicalKind kind, int K, int N);

// Dispatch by feasibility kind: n-od with max(3, N) arms, Cantor and Lelek fans,
// the star for {0}, the self-similar construction, or the flattened product.
// HypothesisError for infeasible sets.
Comb build_fan(const ClosedSetDesc& X, int K, int N, int cantor_depth = 0);

// BFS enumeration of basic Cantor cells: "", "0", "2", "00", ...
std::string basic_cell(int n);
Rational cell_left(const std::string& cell);

struct Point3 {
  Rational x, y, z;
  bool operator==(const Point3&) const = default;
};

struct SheetBlade {
  Rational x;  // position in the sheet's Lelek comb
  Rational tip;
  std::vector<Point3> polyline;
  bool operator==(const SheetBlade&) const = default;
};

struct Sheet {
  int n = 1;
  std::string cell;
  std::vector<SheetBlade> blades;
  bool operator==(const Sheet&) const = default;
};

struct SpatialModel {
  Comb base;
  std::vector<Sheet> sheets;
  bool operator==(const SpatialModel&) const = default;
};

// φ_n: cell prefix, then the marker digits 2 2, then the input digits at even offsets.
Rational sheet_phi(const std::string& cell, const Rational& x);
// membership of the sheet ground set K_n (digits after cell·22 are 0 at odd offsets)
bool in_sheet_ground_set(const std::string& cell, const Rational& x);

SpatialModel build_nonsmooth_3d(int m, int K, int N);

}  // namespace fanforge
