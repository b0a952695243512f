#pragma once

#include <utility>
#include <vector>

#include "fanforge/rational.hpp"

namespace fanforge {

// Order-preserving piecewise-linear map between closed intervals, given by
// exact breakpoints strictly increasing in both coordinates.
class PiecewiseLinearMap {
 public:
  using Point = std::pair<Rational, Rational>;

  PiecewiseLinearMap() = default;
  explicit PiecewiseLinearMap(std::vector<Point> breakpoints);

  static PiecewiseLinearMap identity(const Rational& lo = 0, const Rational& hi = 1);

  const std::vector<Point>& breakpoints() const { return pts_; }
  Rational domain_lo() const { return pts_.front().first; }
  Rational domain_hi() const { return pts_.back().first; }

  Rational operator()(const Rational& u) const;
  Rational eval(const Rational& u) const { return (*this)(u); }
  Rational inverse_eval(const Rational& v) const;

  PiecewiseLinearMap inverse() const;
  // (*this) after `first`: u -> this(first(u)).
  PiecewiseLinearMap after(const PiecewiseLinearMap& first) const;

  bool is_identity() const;
  bool operator==(const PiecewiseLinearMap& o) const { return pts_ == o.pts_; }

 private:
  std::vector<Point> pts_;
};

}  // namespace fanforge
