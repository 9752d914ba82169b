#pragma once

#include <array>

#include "cnav/world/robot.hpp"

namespace cnav::rl {

/// Policy output in [-1, 1]^2: (linear, angular).
using NormalizedAction = std::array<double, 2>;

/// Affine map [-1,1]^2 -> [v_min, v_max] x [-w_max, w_max]. Inputs are
/// clipped to [-1, 1] first.
VelocityCommand to_command(const NormalizedAction& a, const RobotLimits& limits);

/// Inverse of to_command for commands inside the limits.
NormalizedAction to_normalized(VelocityCommand cmd, const RobotLimits& limits);

}  // namespace cnav::rl
