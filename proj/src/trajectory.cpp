#include "deception/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace deception::trajectory {

namespace {

constexpr double kSceneTolerance = 1e-9;

bool in_unit_square(Point p) { return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0; }

std::vector<double> cumulative_lengths(const std::vector<Point>& waypoints) {
  std::vector<double> cum(waypoints.size(), 0.0);
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    cum[i] = cum[i - 1] + distance(waypoints[i - 1], waypoints[i]);
  }
  return cum;
}

// Point at arc length s along the polyline.
Point point_at_length(const std::vector<Point>& waypoints, const std::vector<double>& cum, double s) {
  if (s <= 0.0) return waypoints.front();
  if (s >= cum.back()) return waypoints.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum.begin());
  const double seg = cum[i] - cum[i - 1];
  const double f = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
  return waypoints[i - 1] + f * (waypoints[i] - waypoints[i - 1]);
}

// Prefix of the polyline up to arc length s.
std::vector<Point> truncate(const std::vector<Point>& waypoints, double s) {
  const auto cum = cumulative_lengths(waypoints);
  std::vector<Point> out{waypoints.front()};
  for (std::size_t i = 1; i < waypoints.size() && cum[i] < s; ++i) out.push_back(waypoints[i]);
  out.push_back(point_at_length(waypoints, cum, s));
  return out;
}

std::vector<Point> main_waypoints(const Scene& scene, Strategy kind, Target true_target,
                                  const TrajectoryParams& params) {
  const Point start = scene.start;
  const Point goal = scene.target(true_target);
  const Point decoy = scene.target(other(true_target));
  const double span = goal.y - start.y;

  switch (kind) {
    case Strategy::optimal:
      return {start, goal};
    case Strategy::exaggerating:
      // Head straight for the false target until depth of the vertical span.
      return {start, start + params.exaggeration_depth * (decoy - start), goal};
    case Strategy::ambiguous:
      return {start, Point{start.x, start.y + params.commit_fraction * span}, goal};
    case Strategy::switching: {
      const double mid = scene.midline();
      const double half_gap = 0.5 * std::abs(scene.target_right.x - scene.target_left.x);
      const double amplitude = params.switch_amplitude * half_gap;
      const double goal_side = goal.x >= mid ? 1.0 : -1.0;
      const int k = params.switch_count;
      // The last swing sits opposite the goal so the final leg is the k-th
      // midline crossing.
      std::vector<Point> pts{start};
      for (int m = 1; m <= k; ++m) {
        const double side = ((k - m) % 2 == 0) ? -goal_side : goal_side;
        pts.push_back(Point{mid + side * amplitude, start.y + span * m / (k + 1)});
      }
      pts.push_back(goal);
      return pts;
    }
  }
  throw std::invalid_argument("unknown strategy");
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(Target t) { return t == Target::left ? "left" : "right"; }

Target parse_target(std::string_view text) {
  if (text == "left" || text == "0") return Target::left;
  if (text == "right" || text == "1") return Target::right;
  throw std::invalid_argument("unknown target: " + std::string(text));
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::exaggerating:
      return "exaggerating";
    case Strategy::switching:
      return "switching";
    case Strategy::ambiguous:
      return "ambiguous";
    case Strategy::optimal:
      return "optimal";
  }
  return "unknown";
}

std::string_view to_string(Version v) { return v == Version::main ? "main" : "v2"; }

Strategy parse_strategy(std::string_view text) {
  for (auto s : {Strategy::exaggerating, Strategy::switching, Strategy::ambiguous, Strategy::optimal}) {
    if (to_string(s) == text) return s;
  }
  throw std::invalid_argument("unknown strategy: " + std::string(text));
}

Version parse_version(std::string_view text) {
  if (text == "main") return Version::main;
  if (text == "v2") return Version::v2;
  throw std::invalid_argument("unknown version: " + std::string(text));
}

Scene make_scene(const SceneOverrides& overrides) {
  Scene scene;
  if (overrides.start) scene.start = *overrides.start;
  if (overrides.target_left) scene.target_left = *overrides.target_left;
  if (overrides.target_right) scene.target_right = *overrides.target_right;

  for (Point p : {scene.start, scene.target_left, scene.target_right}) {
    if (!in_unit_square(p)) throw std::invalid_argument("scene point outside the unit square");
  }
  if (std::abs(scene.target_left.y - scene.target_right.y) > kSceneTolerance) {
    throw std::invalid_argument("targets must share the same vertical coordinate");
  }
  if (!(scene.target_left.x < scene.start.x && scene.start.x < scene.target_right.x)) {
    throw std::invalid_argument("start must lie horizontally between the left and right targets");
  }
  const double to_left = scene.start.x - scene.target_left.x;
  const double to_right = scene.target_right.x - scene.start.x;
  if (std::abs(to_left - to_right) > kSceneTolerance) {
    throw std::invalid_argument("start not equidistant from the targets");
  }
  if (!(scene.start.y < scene.target_left.y)) {
    throw std::invalid_argument("start must lie below the targets");
  }
  return scene;
}

void validate(const TrajectoryParams& p) {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!(std::isfinite(p.speed) && p.speed > 0.0)) throw std::invalid_argument("speed must be positive");
  if (!(p.frame_rate >= 10.0) || !std::isfinite(p.frame_rate)) {
    throw std::invalid_argument("frame_rate must be at least 10");
  }
  if (!open_unit(p.exaggeration_depth)) throw std::invalid_argument("exaggeration_depth must be in (0, 1)");
  if (p.switch_count < 1) throw std::invalid_argument("switch_count must be >= 1");
  if (!(p.switch_amplitude > 0.0 && p.switch_amplitude <= 1.0)) {
    throw std::invalid_argument("switch_amplitude must be in (0, 1]");
  }
  if (!open_unit(p.commit_fraction)) throw std::invalid_argument("commit_fraction must be in (0, 1)");
  if (!open_unit(p.dart_onset)) throw std::invalid_argument("dart_onset must be in (0, 1)");
}

double path_length(const std::vector<Point>& waypoints) { return cumulative_lengths(waypoints).back(); }

std::vector<Point> plan_waypoints(const Scene& scene, StrategyKind strategy, Target true_target,
                                  const TrajectoryParams& params) {
  validate(params);
  if (strategy.version == Version::main) return main_waypoints(scene, strategy.kind, true_target, params);
  if (strategy.kind == Strategy::optimal) {
    throw std::invalid_argument("the optimal strategy has no version 2");
  }
  // Run the main path aimed at the other target, then dart back.
  const auto decoy_path = main_waypoints(scene, strategy.kind, other(true_target), params);
  auto pts = truncate(decoy_path, params.dart_onset * path_length(decoy_path));
  pts.push_back(scene.target(true_target));
  return pts;
}

Trajectory generate_trajectory(const Scene& scene, StrategyKind strategy, Target true_target,
                               const TrajectoryParams& params) {
  Trajectory tr;
  tr.waypoints = plan_waypoints(scene, strategy, true_target, params);
  tr.strategy = strategy;
  tr.true_target = true_target;

  const auto cum = cumulative_lengths(tr.waypoints);
  tr.duration = cum.back() / params.speed;
  const double dt = 1.0 / params.frame_rate;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= tr.duration - 1e-9) break;
    tr.samples.push_back(Sample{t, point_at_length(tr.waypoints, cum, params.speed * t)});
  }
  tr.samples.push_back(Sample{tr.duration, scene.target(true_target)});
  return tr;
}

Point position_at(const Trajectory& trajectory, double t) {
  const auto& s = trajectory.samples;
  if (!(t >= 0.0 && t <= trajectory.duration)) throw std::out_of_range("time outside the trajectory");
  const auto it = std::upper_bound(s.begin(), s.end(), t, [](double v, const Sample& x) { return v < x.t; });
  if (it == s.end()) return s.back().position;
  if (it == s.begin()) return s.front().position;
  const Sample& hi = *it;
  const Sample& lo = *(it - 1);
  const double f = (t - lo.t) / (hi.t - lo.t);
  return lo.position + f * (hi.position - lo.position);
}

}  // namespace deception::trajectory
