#include "cnav/world/robot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cnav {

VelocityCommand clip_command(VelocityCommand cmd, const RobotLimits& limits) {
    return {std::clamp(cmd.v, limits.v_min, limits.v_max),
            std::clamp(cmd.w, -limits.w_max, limits.w_max)};
}

RobotState step_robot(const RobotState& state, VelocityCommand cmd, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_robot: dt must be positive");
    RobotState next = state;
    next.v = cmd.v;
    next.w = cmd.w;
    if (std::abs(cmd.w) < 1e-9) {
        next.x = state.x + cmd.v * dt * std::cos(state.theta);
        next.y = state.y + cmd.v * dt * std::sin(state.theta);
        next.theta = wrap_angle(state.theta + cmd.w * dt);
        return next;
    }
    const double radius = cmd.v / cmd.w;
    const double theta_end = state.theta + cmd.w * dt;
    next.x = state.x + radius * (std::sin(theta_end) - std::sin(state.theta));
    next.y = state.y - radius * (std::cos(theta_end) - std::cos(state.theta));
    next.theta = wrap_angle(theta_end);
    return next;
}

}  // namespace cnav
