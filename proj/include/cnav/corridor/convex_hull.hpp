#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "cnav/vec2.hpp"

namespace cnav::corridor {

/// Fewer than three distinct points, or all of them collinear.
struct DegenerateHull : std::runtime_error {
    DegenerateHull() : std::runtime_error("degenerate hull") {}
};

/// Tolerance of the orientation test; |cross| at or below it counts as collinear.
inline constexpr double kCollinearEps = 1e-12;

/// Andrew's monotone chain. Counter-clockwise, starting from the
/// lexicographically smallest point, collinear boundary points dropped,
/// duplicates tolerated.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

}  // namespace cnav::corridor
