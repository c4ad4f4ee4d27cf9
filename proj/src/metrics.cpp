#include "deception/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace deception::metrics {

namespace {

struct Window {
  double begin;
  double end;
};

Window trimmed_window(const InteractionRecord& record, const MetricOptions& options) {
  if (!(record.duration > 0.0)) throw std::invalid_argument("interaction duration must be positive");
  if (!(options.trim_fraction >= 0.0 && options.trim_fraction < 0.5)) {
    throw std::invalid_argument("trim fraction must be in [0, 0.5)");
  }
  return {options.trim_fraction * record.duration, (1.0 - options.trim_fraction) * record.duration};
}

// Piecewise-linear pad position, held constant outside the sampled span.
double value_at(const std::vector<PadSample>& s, double t) {
  if (t <= s.front().t) return s.front().value;
  if (t >= s.back().t) return s.back().value;
  const auto it = std::upper_bound(s.begin(), s.end(), t, [](double v, const PadSample& x) { return v < x.t; });
  const PadSample& hi = *it;
  const PadSample& lo = *(it - 1);
  if (hi.t == lo.t) return hi.value;
  return lo.value + (t - lo.t) / (hi.t - lo.t) * (hi.value - lo.value);
}

double clip_dust(double v) {
  if (v < 0.0 && v > -1e-9) return 0.0;
  if (v > 1.0 && v < 1.0 + 1e-9) return 1.0;
  return v;
}

void require_window_samples(const InteractionRecord& record, const MetricOptions& options) {
  if (!has_window_samples(record, options)) throw MetricError("no pad samples in the trimmed window");
}

}  // namespace

void validate(const PadTrace& trace) {
  if (!(trace.pad_speed > 0.0)) throw std::invalid_argument("pad_speed must be positive");
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const auto& cur = trace.samples[k];
    if (!(cur.value >= 0.0 && cur.value <= 1.0)) throw std::invalid_argument("pad value outside [0, 1]");
    if (k == 0) continue;
    const auto& prev = trace.samples[k - 1];
    if (cur.t < prev.t) throw std::invalid_argument("pad timestamps decrease");
    if (std::abs(cur.value - prev.value) > trace.pad_speed * (cur.t - prev.t) + kRateTolerance) {
      throw std::invalid_argument("pad moved faster than pad_speed");
    }
  }
}

bool has_window_samples(const InteractionRecord& record, const MetricOptions& options) {
  const Window w = trimmed_window(record, options);
  return std::any_of(record.trace.samples.begin(), record.trace.samples.end(),
                     [&](const PadSample& s) { return s.t >= w.begin && s.t <= w.end; });
}

double accuracy(const InteractionRecord& record, const MetricOptions& options) {
  validate(record.trace);
  require_window_samples(record, options);
  const Window w = trimmed_window(record, options);
  const auto& s = record.trace.samples;
  const bool right = record.true_target == trajectory::Target::right;

  // Interpolating the per-sample distance rather than the pad value keeps the
  // result bit-identical under mirroring (T, mu) -> (1 - T, 1 - mu).
  std::vector<PadSample> dist;
  dist.reserve(s.size());
  for (const auto& x : s) dist.push_back({x.t, right ? 1.0 - x.value : x.value});

  std::vector<double> knots{w.begin};
  for (const auto& x : s) {
    if (x.t > w.begin && x.t < w.end) knots.push_back(x.t);
  }
  knots.push_back(w.end);

  // The distance is linear between samples, so the trapezoid is exact.
  double area = 0.0;
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const double lo = value_at(dist, knots[k - 1]);
    const double hi = value_at(dist, knots[k]);
    area += 0.5 * (lo + hi) * (knots[k] - knots[k - 1]);
  }
  return clip_dust(area / (w.end - w.begin));
}

double confidence(const InteractionRecord& record, const MetricOptions& options) {
  validate(record.trace);
  require_window_samples(record, options);
  const Window w = trimmed_window(record, options);
  const auto& s = record.trace.samples;
  const double c = record.trace.pad_speed;
  const double threshold = options.reversal_threshold * c;

  // Initial movement toward a target is excluded: counting starts at the
  // first interval moving against that initial direction.
  std::optional<double> reversal;
  int initial = 0;
  for (std::size_t k = 1; k < s.size() && !reversal; ++k) {
    const double dt = s[k].t - s[k - 1].t;
    if (dt <= 0.0) continue;
    const double rate = (s[k].value - s[k - 1].value) / dt;
    const int dir = rate > threshold ? 1 : (rate < -threshold ? -1 : 0);
    if (dir == 0) continue;
    if (initial == 0) {
      initial = dir;
    } else if (dir == -initial) {
      reversal = s[k - 1].t;
    }
  }
  if (!reversal) return 0.0;

  const double from = std::max(w.begin, *reversal);
  double weighted = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double dt = s[k].t - s[k - 1].t;
    if (dt <= 0.0) continue;
    const double lo = std::max(s[k - 1].t, from);
    const double hi = std::min(s[k].t, w.end);
    if (hi <= lo) continue;
    const double speed = std::abs(s[k].value - s[k - 1].value) / dt;
    weighted += speed * 0.5 * (hi * hi - lo * lo);
  }
  const double norm = c * 0.5 * (w.end * w.end - w.begin * w.begin);
  return clip_dust(weighted / norm);
}

}  // namespace deception::metrics
