#include "cnav/rl/action.hpp"

#include <algorithm>

namespace cnav::rl {

VelocityCommand to_command(const NormalizedAction& a, const RobotLimits& limits) {
    const double av = std::clamp(a[0], -1.0, 1.0);
    const double aw = std::clamp(a[1], -1.0, 1.0);
    return {limits.v_min + 0.5 * (av + 1.0) * (limits.v_max - limits.v_min), aw * limits.w_max};
}

NormalizedAction to_normalized(VelocityCommand cmd, const RobotLimits& limits) {
    const double span = limits.v_max - limits.v_min;
    const double av = span > 0.0 ? 2.0 * (cmd.v - limits.v_min) / span - 1.0 : 0.0;
    const double aw = limits.w_max > 0.0 ? cmd.w / limits.w_max : 0.0;
    return {std::clamp(av, -1.0, 1.0), std::clamp(aw, -1.0, 1.0)};
}

}  // namespace cnav::rl
