#include "deception/observer.hpp"

#include <algorithm>
#include <cmath>

#include "deception/session.hpp"

namespace deception::session {

namespace {

constexpr double kTieTolerance = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

PadDirection toward(double from, double to) {
  if (std::abs(to - from) <= kTieTolerance) return PadDirection::none;
  return to > from ? PadDirection::right : PadDirection::left;
}

}  // namespace

PadDirection scripted_observer(const ObserverPolicy& policy, trajectory::Point robot,
                               const trajectory::Scene& scene, double pad_value) {
  return std::visit(
      Overloaded{
          [&](const HoldPolicy& h) { return toward(pad_value, h.value); },
          [&](const NearestTargetPolicy&) {
            const double dl = trajectory::distance(robot, scene.target_left);
            const double dr = trajectory::distance(robot, scene.target_right);
            if (std::abs(dl - dr) <= kTieTolerance) return PadDirection::none;
            return dl < dr ? PadDirection::left : PadDirection::right;
          },
      },
      policy);
}

double integrate_pad(double value, PadDirection direction, double dt, double pad_speed,
                     const ObserverPolicy& policy) {
  if (direction == PadDirection::none) return value;
  double next = value + static_cast<double>(static_cast<int>(direction)) * pad_speed * dt;
  if (const auto* hold = std::get_if<HoldPolicy>(&policy)) {
    next = direction == PadDirection::right ? std::min(next, hold->value) : std::max(next, hold->value);
  }
  return std::clamp(next, 0.0, 1.0);
}

metrics::PadTrace observe(const trajectory::Trajectory& trajectory, const trajectory::Scene& scene,
                          const ObserverPolicy& policy, double pad_speed) {
  metrics::PadTrace trace;
  trace.pad_speed = pad_speed;
  const auto& frames = trajectory.samples;
  trace.nominal_rate = frames.size() > 1 ? 1.0 / (frames[1].t - frames[0].t) : 0.0;

  const double delay = std::holds_alternative<NearestTargetPolicy>(policy)
                           ? std::get<NearestTargetPolicy>(policy).delay
                           : 0.0;
  double pad = kPadStart;
  trace.samples.push_back({frames.front().t, pad});
  for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
    const double t = frames[k].t;
    PadDirection dir = PadDirection::none;
    if (t >= delay) dir = scripted_observer(policy, trajectory::position_at(trajectory, t - delay), scene, pad);
    pad = integrate_pad(pad, dir, frames[k + 1].t - t, pad_speed, policy);
    trace.samples.push_back({frames[k + 1].t, pad});
  }
  return trace;
}

}  // namespace deception::session
