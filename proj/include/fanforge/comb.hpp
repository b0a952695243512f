#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fanforge/closedset.hpp"
#include "fanforge/pwl.hpp"
#include "fanforge/rational.hpp"

namespace fanforge {

// (n_1..n_k); empty path is the leftmost blade. Product blades also carry a
// Cantor word over {0,2}.
struct BladeIndex {
  std::vector<int> path;
  std::string word;

  auto operator<=>(const BladeIndex&) const = default;
  bool operator==(const BladeIndex&) const = default;
  std::size_t length() const { return path.size(); }
  int sum() const;
  bool extends(const BladeIndex& prefix) const;
  BladeIndex suffix(std::size_t from) const;
};

std::string to_string(const BladeIndex& idx);

// x = 2·Σ 3^{-(n_1+…+n_i)}
Rational index_x(const std::vector<int>& path);
// inverse of index_x for a Cantor left endpoint
std::vector<int> path_from_x(const Rational& x);

enum class BladeKind { Plain, TypeI, TypeII };
enum class Provenance { EpgConstruction, Product, Canonical, Maximal, Imported };

std::string to_string(BladeKind k);
std::string to_string(Provenance p);
BladeKind blade_kind_from(const std::string& s);
Provenance provenance_from(const std::string& s);

struct Blade {
  BladeIndex index;
  Rational x;
  Rational tip;
  std::optional<Rational> trace_scale;
  BladeKind kind = BladeKind::Plain;
  bool operator==(const Blade&) const = default;
};

struct CombMeta {
  std::optional<ClosedSetDesc> source;
  int depth = 0;
  int branch = 0;
  Provenance provenance = Provenance::Imported;
  int cantor_depth = 0;  // product combs only
  bool operator==(const CombMeta&) const = default;
};

class Comb {
 public:
  Comb() = default;
  // Blades are stored sorted by x; lookup by index is logarithmic.
  Comb(std::vector<Blade> blades, CombMeta meta);

  const std::vector<Blade>& blades() const { return blades_; }
  const CombMeta& meta() const { return meta_; }
  std::size_t size() const { return blades_.size(); }

  const Blade* find(const BladeIndex& idx) const;
  const Blade& at(const BladeIndex& idx) const;  // throws ArgumentError
  const Blade* find_x(const Rational& x) const;
  // positions [first, last) of blades with lo <= x <= hi
  std::pair<std::size_t, std::size_t> range(const Rational& lo, const Rational& hi) const;
  std::size_t position(const Blade& b) const { return static_cast<std::size_t>(&b - blades_.data()); }

  bool operator==(const Comb& o) const { return blades_ == o.blades_ && meta_ == o.meta_; }

 private:
  std::vector<Blade> blades_;
  std::map<BladeIndex, std::size_t> by_index_;
  CombMeta meta_;
};

struct Violation {
  std::string clause;  // "clause-1".."clause-4", "distinctness", "metadata"
  std::string detail;
};

std::vector<Violation> validate_comb(const Comb& c);
Comb maximal_comb(int depth);
std::vector<Rational> level_set(const Comb& c, const Rational& y);
std::vector<std::pair<Rational, Rational>> tips(const Comb& c);

// M used by φ_B: max of the source, taken over X \ {1} for product combs, 0 if empty.
Rational scale_anchor(const Comb& c);
PiecewiseLinearMap phi_blade(const Comb& c, const BladeIndex& idx);

struct FanPoint {
  struct Top {
    bool operator==(const Top&) const = default;
  };
  struct OnBlade {
    BladeIndex index;
    Rational height;
    bool operator==(const OnBlade&) const = default;
  };
  std::variant<Top, OnBlade> v;

  static FanPoint top() { return FanPoint{Top{}}; }
  static FanPoint on(BladeIndex idx, Rational h) { return FanPoint{OnBlade{std::move(idx), std::move(h)}}; }
  bool is_top() const { return std::holds_alternative<Top>(v); }
  const OnBlade& blade() const { return std::get<OnBlade>(v); }
  bool operator==(const FanPoint&) const = default;
};

std::string to_string(const FanPoint& p);
// InvalidPointError unless the point lies on a blade of c
void check_point(const Comb& c, const FanPoint& p);

}  // namespace fanforge
