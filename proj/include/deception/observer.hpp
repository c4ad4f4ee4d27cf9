#pragma once

// Scripted stand-ins for human observers, used for headless sessions.

#include <variant>
#include <vector>

#include "deception/metrics.hpp"
#include "deception/trajectory.hpp"

namespace deception::session {

// Drive the pad to a fixed value and leave it there.
struct HoldPolicy {
  double value = 0.5;
};

// After a reaction delay, push the pad toward whichever target the robot
// was nearest to `delay` seconds ago.
struct NearestTargetPolicy {
  double delay = 0.4;
};

using ObserverPolicy = std::variant<HoldPolicy, NearestTargetPolicy>;

enum class PadDirection { left = -1, none = 0, right = 1 };

// Stateless decision for one frame; `robot` is the position the policy
// reacts to (already delayed for nearest-target).
PadDirection scripted_observer(const ObserverPolicy& policy, trajectory::Point robot,
                               const trajectory::Scene& scene, double pad_value);

// Advances the pad at `pad_speed` for dt seconds, clamped to [0, 1]. A hold
// target stops the motion exactly on the held value.
double integrate_pad(double value, PadDirection direction, double dt, double pad_speed,
                     const ObserverPolicy& policy);

// Pad trace an observer produces while watching a trajectory: one sample
// per trajectory frame, starting at 0.5.
metrics::PadTrace observe(const trajectory::Trajectory& trajectory, const trajectory::Scene& scene,
                          const ObserverPolicy& policy, double pad_speed);

}  // namespace deception::session
