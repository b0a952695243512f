#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fanforge/comb.hpp"
#include "fanforge/construct.hpp"
#include "fanforge/rational.hpp"

namespace fanforge {

// Polyline starting at the apex. Comb arcs live in the plane z = 0.
struct EmbeddedArc {
  std::vector<Point3> points;
  bool operator==(const EmbeddedArc&) const = default;
};

// Points of a spatial model. On a sheet blade, s in [0,1] is the height on the
// vertical part and s in (1,2] the fraction s-1 along the tilted segment.
struct SpatialPoint {
  struct Top {
    bool operator==(const Top&) const = default;
  };
  struct Base {
    BladeIndex index;
    Rational height;
    bool operator==(const Base&) const = default;
  };
  struct OnSheet {
    int sheet;          // n, 1-based
    std::size_t blade;  // position in the sheet's blade list
    Rational s;
    bool operator==(const OnSheet&) const = default;
  };
  std::variant<Top, Base, OnSheet> v;
  bool operator==(const SpatialPoint&) const = default;
};
std::string to_string(const SpatialPoint& p);

Point3 apex();
Point3 embed_cone(const Comb& c, const FanPoint& p);
// cone rule on (x, y), z unchanged
Point3 embed_cone(const Point3& raw);
Point3 embed_spatial(const SpatialModel& m, const SpatialPoint& p);

EmbeddedArc arc_from_top(const Comb& c, const FanPoint& p);
EmbeddedArc arc_from_top(const SpatialModel& m, const SpatialPoint& p);

struct DistanceBounds {
  double lower = 0, upper = 0;
};

Rational default_resolution();  // 10^-4

// Exact squared distances; the sup over each segment is bracketed by bisection.
DistanceBounds hausdorff_arc_distance(const EmbeddedArc& a, const EmbeddedArc& b,
                                      const Rational& resolution = default_resolution());

struct SmoothnessReport {
  bool converges = false;
  double witness_gap = 0;
  std::vector<std::string> sequence;
  std::vector<DistanceBounds> gaps;
};

// rule "nearest-tips"
SmoothnessReport smoothness_scan(const Comb& c, const FanPoint& target, const std::string& rule = "nearest-tips",
                                 const Rational& resolution = default_resolution());
// rules "sheet-descent" and "nearest-tips"
SmoothnessReport smoothness_scan(const SpatialModel& m, const SpatialPoint& target,
                                 const std::string& rule = "sheet-descent",
                                 const Rational& resolution = default_resolution());

}  // namespace fanforge
