#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "capillary/geometry.hpp"

namespace capillary {

/// 1000 x 1000 drawing of the curve scaled to fit with a 5% margin; pins are
/// drawn as crosses and self-intersections as circles.
void write_svg(std::ostream& out, const DiscreteCurve& curve, const std::vector<Vec2>& pins = {},
               const std::string& title = {});

} // namespace capillary
