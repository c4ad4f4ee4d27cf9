#include "deception/session.hpp"

#include <cmath>
#include <numeric>

namespace deception::session {

namespace {

using trajectory::Strategy;
using trajectory::StrategyKind;
using trajectory::Target;
using trajectory::Version;

markov::SelectorConfig strategy_selector_config(const SessionConfig& c) {
  markov::SelectorConfig s;
  s.states = kStrategyCount;
  s.mode = c.algorithm;
  if (c.algorithm == markov::Mode::adaptive) s.lambda = c.lambda;
  if (c.algorithm == markov::Mode::fixed_pool) s.total_iterations = static_cast<std::size_t>(c.iterations);
  s.shuffle_seed = c.seed ^ 0x9e3779b97f4a7c15ULL;
  return s;
}

// The number of version draws is not known in advance, so fixed-pool
// sessions use fixed blocks for the two-state version choice.
markov::SelectorConfig version_selector_config(const SessionConfig& c) {
  markov::SelectorConfig s;
  s.states = 2;
  s.mode = c.algorithm == markov::Mode::fixed_pool ? markov::Mode::fixed_block : c.algorithm;
  if (c.algorithm == markov::Mode::adaptive) s.lambda = c.lambda;
  s.shuffle_seed = c.seed ^ 0xc2b2ae3d27d4eb4fULL;
  return s;
}

const SessionConfig& checked(const SessionConfig& c) {
  validate(c);
  return c;
}

}  // namespace

std::string_view to_string(VersionSelection v) {
  return v == VersionSelection::adaptive_two_state ? "adaptive-two-state" : "always-main";
}

VersionSelection parse_version_selection(std::string_view text) {
  if (text == "adaptive-two-state") return VersionSelection::adaptive_two_state;
  if (text == "always-main") return VersionSelection::always_main;
  throw std::invalid_argument("unknown version selection: " + std::string(text));
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::idle:
      return "idle";
    case Phase::practice:
      return "practice";
    case Phase::running_iteration:
      return "running-iteration";
    case Phase::awaiting_rating:
      return "awaiting-rating";
    case Phase::done:
      return "done";
  }
  return "unknown";
}

std::string_view to_string(IngestStatus s) {
  switch (s) {
    case IngestStatus::accepted:
      return "accepted";
    case IngestStatus::not_running:
      return "no-iteration-running";
    case IngestStatus::before_iteration_start:
      return "before-iteration-start";
    case IngestStatus::after_iteration_end:
      return "after-iteration-end";
    case IngestStatus::out_of_range_value:
      return "out-of-range-value";
    case IngestStatus::non_monotonic_timestamp:
      return "non-monotonic-timestamp";
    case IngestStatus::rate_exceeded:
      return "rate-exceeded";
  }
  return "unknown";
}

void validate(const SessionConfig& c) {
  if (c.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (c.practice_rounds < 0) throw std::invalid_argument("practice_rounds must be >= 0");
  if (!(c.pad_speed > 0.0) || !std::isfinite(c.pad_speed)) throw std::invalid_argument("pad_speed must be positive");
  trajectory::validate(c.trajectory);
  (void)trajectory::make_scene(c.scene);
}

void validate(const SessionRatings& r) {
  for (int v : {r.entertainment, r.deception, r.intelligence, r.trust}) {
    if (v < 1 || v > 7) throw std::invalid_argument("ratings must be integers in [1, 7]");
  }
}

Session::Session(SessionConfig config)
    : config_(std::move(config)),
      scene_(trajectory::make_scene(checked(config_).scene)),
      strategies_(strategy_selector_config(config_)),
      versions_(version_selector_config(config_)),
      rng_(config_.seed),
      phase_(config_.practice_rounds > 0 ? Phase::practice : Phase::idle) {
  if (config_.session_id.empty()) config_.session_id = "session-" + std::to_string(config_.seed);
}

const IterationPlan& Session::begin_iteration() {
  if (phase_ != Phase::idle && phase_ != Phase::practice) {
    throw PhaseError("begin_iteration called in phase " + std::string(to_string(phase_)));
  }
  IterationPlan plan;
  plan.practice = phase_ == Phase::practice;
  if (plan.practice) {
    plan.index = static_cast<int>(practice_results_.size()) + 1;
    plan.strategy = StrategyKind{Strategy::optimal, Version::main};
  } else {
    plan.index = static_cast<int>(results_.size()) + 1;
    const auto s = strategies_.sample_step(rng_.uniform());
    plan.strategy.kind = static_cast<Strategy>(s.index);
    if (plan.strategy.kind != Strategy::optimal &&
        config_.version_selection == VersionSelection::adaptive_two_state) {
      plan.strategy.version = static_cast<Version>(versions_.sample_step(rng_.uniform()).index);
    }
  }
  plan.true_target = rng_.uniform() < 0.5 ? Target::left : Target::right;
  plan.trajectory = trajectory::generate_trajectory(scene_, plan.strategy, plan.true_target, config_.trajectory);

  current_ = std::move(plan);
  pad_.clear();
  phase_ = Phase::running_iteration;
  return *current_;
}

IngestStatus Session::ingest_pad_sample(metrics::PadSample sample) {
  if (phase_ != Phase::running_iteration) return IngestStatus::not_running;
  if (!std::isfinite(sample.t)) return IngestStatus::non_monotonic_timestamp;
  if (sample.t < 0.0) return IngestStatus::before_iteration_start;
  if (sample.t > current_->trajectory.duration) return IngestStatus::after_iteration_end;
  if (!(sample.value >= 0.0 && sample.value <= 1.0)) return IngestStatus::out_of_range_value;

  // The pad starts each iteration in the middle.
  const metrics::PadSample prev = pad_.empty() ? metrics::PadSample{0.0, kPadStart} : pad_.back();
  if (sample.t < prev.t) return IngestStatus::non_monotonic_timestamp;
  if (std::abs(sample.value - prev.value) > config_.pad_speed * (sample.t - prev.t) + metrics::kRateTolerance) {
    return IngestStatus::rate_exceeded;
  }
  pad_.push_back(sample);
  return IngestStatus::accepted;
}

const IterationResult& Session::finalize_iteration() {
  if (phase_ != Phase::running_iteration) {
    throw PhaseError("finalize_iteration called in phase " + std::string(to_string(phase_)));
  }
  IterationResult result;
  result.plan = std::move(*current_);
  current_.reset();

  auto& rec = result.record;
  rec.true_target = result.plan.true_target;
  rec.trace = metrics::PadTrace{std::move(pad_), config_.trajectory.frame_rate, config_.pad_speed};
  rec.duration = result.plan.trajectory.duration;
  rec.strategy = result.plan.strategy;
  rec.iteration_index = result.plan.index;
  pad_.clear();

  if (metrics::has_window_samples(rec)) {
    result.accuracy = metrics::accuracy(rec);
    result.confidence = metrics::confidence(rec);
  }

  if (result.plan.practice) {
    practice_results_.push_back(std::move(result));
    phase_ = practice_remaining() > 0 ? Phase::practice : Phase::idle;
    return practice_results_.back();
  }
  results_.push_back(std::move(result));
  phase_ = static_cast<int>(results_.size()) >= config_.iterations ? Phase::awaiting_rating : Phase::idle;
  return results_.back();
}

void Session::submit_ratings(const SessionRatings& ratings) {
  if (phase_ != Phase::awaiting_rating) {
    throw PhaseError("ratings submitted in phase " + std::string(to_string(phase_)));
  }
  validate(ratings);
  ratings_ = ratings;
  phase_ = Phase::done;
}

void Session::finish() {
  if (phase_ != Phase::awaiting_rating) throw PhaseError("finish called in phase " + std::string(to_string(phase_)));
  phase_ = Phase::done;
}

SessionSummary summarize_session(const Session& session) {
  if (session.phase() != Phase::awaiting_rating && session.phase() != Phase::done) {
    throw PhaseError("session summary requested in phase " + std::string(to_string(session.phase())));
  }
  const auto& results = session.results();
  if (results.empty()) throw PhaseError("no completed iterations to summarize");

  SessionSummary s;
  s.session_id = session.config().session_id;
  s.iterations_completed = static_cast<int>(results.size());
  std::vector<markov::StateId> history;
  std::vector<double> acc;
  std::vector<double> conf;
  for (const auto& r : results) {
    const auto& st = r.plan.strategy;
    history.push_back(markov::StateId{static_cast<std::size_t>(st.kind)});
    ++s.strategy_counts[static_cast<std::size_t>(st.kind)];
    if (st.kind != Strategy::optimal) ++s.version_counts[static_cast<std::size_t>(st.version)];
    s.per_iteration.push_back({r.plan.index, st, r.plan.true_target, r.accuracy, r.confidence});
    if (r.accuracy) acc.push_back(*r.accuracy);
    if (r.confidence) conf.push_back(*r.confidence);
  }
  s.strategy_entropy = markov::empirical_entropy(history, kStrategyCount);
  auto avg = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  s.mean_accuracy = avg(acc);
  s.mean_confidence = avg(conf);
  s.ratings = session.ratings();
  return s;
}

}  // namespace deception::session
