#pragma once

#include <string>

#include "thbq/thb_space.hpp"

namespace thbq {

/// SVG picture of the active elements of a 2D space: one rectangle per
/// element, filled by level from a fixed palette, on a 1000 x 1000 view box.
/// Output is byte-stable for a given hierarchy.
std::string mesh_svg(const ThbSpace& space);

}  // namespace thbq
