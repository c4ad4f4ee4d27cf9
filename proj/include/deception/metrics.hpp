#pragma once

// Deception metrics computed from an observer's pad trace.
//
// The pad reports the observer's belief about the robot's goal on [0, 1]
// (0 = left target, 1 = right target) and moves at a fixed rate while a key
// is held. Both metrics drop the first and last trim_fraction of the
// interaction.
//
//   accuracy   = mean over the trimmed window of |T - mu(t)|
//   confidence = integral of t * |mu'(t)| from the later of the window start
//                and the first direction reversal, divided by the same
//                integral for continuous motion over the whole window.

#include <stdexcept>
#include <vector>

#include "deception/trajectory.hpp"

namespace deception::metrics {

struct PadSample {
  double t = 0.0;
  double value = 0.5;
  bool operator==(const PadSample&) const = default;
};

struct PadTrace {
  std::vector<PadSample> samples;
  double nominal_rate = 30.0;
  double pad_speed = 0.3;
};

inline constexpr double kRateTolerance = 1e-9;

// Throws std::invalid_argument if timestamps decrease, a value leaves [0, 1]
// or consecutive samples move faster than pad_speed allows.
void validate(const PadTrace& trace);

struct InteractionRecord {
  trajectory::Target true_target = trajectory::Target::left;
  PadTrace trace;
  double duration = 0.0;
  trajectory::StrategyKind strategy;
  int iteration_index = 0;
};

struct MetricOptions {
  double trim_fraction = 0.05;
  // Finite differences below this fraction of pad_speed are treated as
  // jitter when looking for the first direction reversal.
  double reversal_threshold = 0.25;
};

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// True when at least one pad sample falls in the trimmed window.
bool has_window_samples(const InteractionRecord& record, const MetricOptions& options = {});

// Both throw MetricError when the trimmed window holds no samples, and
// std::invalid_argument for an invalid trace or non-positive duration.
double accuracy(const InteractionRecord& record, const MetricOptions& options = {});
double confidence(const InteractionRecord& record, const MetricOptions& options = {});

}  // namespace deception::metrics
