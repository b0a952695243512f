#pragma once

#include <string>

#include "fanforge/comb.hpp"
#include "fanforge/construct.hpp"

namespace fanforge {

enum class RenderStyle { Comb, Fan, Spatial };
RenderStyle parse_style(const std::string& s);  // ArgumentError
std::string to_string(RenderStyle s);

// One <path> per blade. Comb style adds the base line and draws y upward;
// fan style draws cone-embedded segments hanging from the apex at (1/2, 0).
// Coordinates are exact rationals decimalized to 12 digits.
std::string render_svg(const Comb& c, RenderStyle style);
// Oblique projection (x + z/2, 1 - y - z/4); sheet n strokes at width 2/(1000(n+1)).
std::string render_svg(const SpatialModel& m);

}  // namespace fanforge
