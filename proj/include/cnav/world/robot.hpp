#pragma once

#include "cnav/vec2.hpp"

namespace cnav {

/// Differential-drive (unicycle) robot state.
struct RobotState {
    double x{0.0};
    double y{0.0};
    double theta{0.0};  ///< heading, wrapped to (-pi, pi]
    double v{0.0};      ///< linear velocity, m/s
    double w{0.0};      ///< angular velocity, rad/s

    Vec2 position() const { return {x, y}; }
    Vec2 velocity() const { return {v * std::cos(theta), v * std::sin(theta)}; }

    bool operator==(const RobotState&) const = default;
};

/// Commanded (linear, angular) velocity pair.
struct VelocityCommand {
    double v{0.0};
    double w{0.0};

    bool operator==(const VelocityCommand&) const = default;
};

/// Absolute kinematic limits. Defaults are those of a Turtlebot3 Burger.
struct RobotLimits {
    double v_min{0.0};
    double v_max{0.22};
    double w_max{2.84};
};

VelocityCommand clip_command(VelocityCommand cmd, const RobotLimits& limits);

/// Exact-arc unicycle integration over dt with a constant command. The
/// command is applied as given; callers clip it first. The returned state
/// carries the command as its velocity.
RobotState step_robot(const RobotState& state, VelocityCommand cmd, double dt);

}  // namespace cnav
