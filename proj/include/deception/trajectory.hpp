#pragma once

// Deceptive and optimal robot paths in a two-target planar scene.

#include <optional>
#include <string_view>
#include <vector>

namespace deception::trajectory {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
double distance(Point a, Point b);

enum class Target { left = 0, right = 1 };
inline Target other(Target t) { return t == Target::left ? Target::right : Target::left; }
std::string_view to_string(Target t);
Target parse_target(std::string_view text);

struct Scene {
  Point start{0.5, 0.0};
  Point target_left{0.25, 1.0};
  Point target_right{0.75, 1.0};

  Point target(Target t) const { return t == Target::left ? target_left : target_right; }
  // x coordinate of the vertical line equidistant from both targets.
  double midline() const { return 0.5 * (target_left.x + target_right.x); }
};

struct SceneOverrides {
  std::optional<Point> start;
  std::optional<Point> target_left;
  std::optional<Point> target_right;
};

// Default scene with any overrides applied. Throws std::invalid_argument if
// the targets are not level, the start is not horizontally equidistant from
// them, or a point leaves the unit square.
Scene make_scene(const SceneOverrides& overrides = {});

enum class Strategy { exaggerating = 0, switching = 1, ambiguous = 2, optimal = 3 };
enum class Version { main = 0, v2 = 1 };

std::string_view to_string(Strategy s);
std::string_view to_string(Version v);
Strategy parse_strategy(std::string_view text);
Version parse_version(std::string_view text);

struct StrategyKind {
  Strategy kind = Strategy::optimal;
  Version version = Version::main;
  bool operator==(const StrategyKind&) const = default;
};

struct TrajectoryParams {
  double speed = 0.25;  // workspace units per second
  double frame_rate = 30.0;
  double exaggeration_depth = 0.6;
  int switch_count = 3;
  double switch_amplitude = 0.8;
  double commit_fraction = 0.7;
  double dart_onset = 0.9;
};

// Throws std::invalid_argument when a field is outside its range.
void validate(const TrajectoryParams& params);

struct Sample {
  double t = 0.0;
  Point position;
};

struct Trajectory {
  std::vector<Sample> samples;
  // The polyline the samples were taken from.
  std::vector<Point> waypoints;
  StrategyKind strategy;
  Target true_target = Target::left;
  double duration = 0.0;
};

// Waypoints of a strategy's path, before time parameterization.
std::vector<Point> plan_waypoints(const Scene& scene, StrategyKind strategy, Target true_target,
                                  const TrajectoryParams& params);

// Samples the planned path at frame_rate, moving at constant speed. The last
// sample sits exactly on the true target at t = duration.
Trajectory generate_trajectory(const Scene& scene, StrategyKind strategy, Target true_target,
                               const TrajectoryParams& params);

// Linear interpolation between the samples bracketing t.
// Throws std::out_of_range for t outside [0, duration].
Point position_at(const Trajectory& trajectory, double t);

double path_length(const std::vector<Point>& waypoints);

}  // namespace deception::trajectory
