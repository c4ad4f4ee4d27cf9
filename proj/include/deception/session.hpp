#pragma once

// One deception session: a strictly sequential state machine that picks a
// strategy per iteration, streams its trajectory, collects the observer's pad
// samples and scores them.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deception/markov.hpp"
#include "deception/metrics.hpp"
#include "deception/rng.hpp"
#include "deception/trajectory.hpp"

namespace deception::session {

enum class VersionSelection { adaptive_two_state, always_main };

std::string_view to_string(VersionSelection v);
VersionSelection parse_version_selection(std::string_view text);

struct SessionConfig {
  std::string session_id;  // defaults to "session-<seed>"
  markov::Mode algorithm = markov::Mode::adaptive;
  double lambda = markov::kDefaultLambda;
  int iterations = 20;
  std::uint64_t seed = 1;
  trajectory::SceneOverrides scene;
  trajectory::TrajectoryParams trajectory;  // frame_rate lives here
  int practice_rounds = 2;
  VersionSelection version_selection = VersionSelection::adaptive_two_state;
  double pad_speed = 0.3;
  bool reveal_true_target = true;
};

// Throws std::invalid_argument on any out-of-range field.
void validate(const SessionConfig& config);

enum class Phase { idle, practice, running_iteration, awaiting_rating, done };
std::string_view to_string(Phase p);

struct SessionRatings {
  int entertainment = 0;
  int deception = 0;
  int intelligence = 0;
  int trust = 0;
  bool operator==(const SessionRatings&) const = default;
};

// Throws std::invalid_argument unless every rating is in [1, 7].
void validate(const SessionRatings& ratings);

struct IterationPlan {
  int index = 0;  // 1-based within its kind (practice or scored)
  bool practice = false;
  trajectory::StrategyKind strategy;
  trajectory::Target true_target = trajectory::Target::left;
  trajectory::Trajectory trajectory;
};

struct IterationResult {
  IterationPlan plan;
  metrics::InteractionRecord record;
  // Absent when no pad sample fell inside the trimmed window.
  std::optional<double> accuracy;
  std::optional<double> confidence;
};

enum class IngestStatus {
  accepted,
  not_running,
  before_iteration_start,
  after_iteration_end,
  out_of_range_value,
  non_monotonic_timestamp,
  rate_exceeded,
};
std::string_view to_string(IngestStatus s);

// Raised for calls made in the wrong phase.
class PhaseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kPadStart = 0.5;

class Session {
 public:
  explicit Session(SessionConfig config);

  const SessionConfig& config() const { return config_; }
  const trajectory::Scene& scene() const { return scene_; }
  Phase phase() const { return phase_; }
  const markov::Selector& strategy_selector() const { return strategies_; }
  const markov::Selector& version_selector() const { return versions_; }

  // Draws strategy, version (non-optimal only) and target, in that order,
  // from the session's single random stream. Practice rounds show the
  // optimal strategy and draw only the target.
  const IterationPlan& begin_iteration();

  // Out-of-window or malformed samples are rejected, never fatal.
  IngestStatus ingest_pad_sample(metrics::PadSample sample);

  // Scores the running iteration and moves to the next phase.
  const IterationResult& finalize_iteration();

  void submit_ratings(const SessionRatings& ratings);
  // Closes a session that ends without a questionnaire.
  void finish();

  const std::optional<IterationPlan>& current_plan() const { return current_; }
  const std::vector<metrics::PadSample>& current_pad() const { return pad_; }
  const std::vector<IterationResult>& results() const { return results_; }
  const std::vector<IterationResult>& practice_results() const { return practice_results_; }
  const std::optional<SessionRatings>& ratings() const { return ratings_; }
  int practice_remaining() const { return config_.practice_rounds - static_cast<int>(practice_results_.size()); }

 private:
  SessionConfig config_;
  trajectory::Scene scene_;
  markov::Selector strategies_;
  markov::Selector versions_;
  Rng rng_;
  Phase phase_;
  std::optional<IterationPlan> current_;
  std::vector<metrics::PadSample> pad_;
  std::vector<IterationResult> results_;
  std::vector<IterationResult> practice_results_;
  std::optional<SessionRatings> ratings_;
};

inline constexpr std::size_t kStrategyCount = 4;

struct IterationMetrics {
  int iteration = 0;
  trajectory::StrategyKind strategy;
  trajectory::Target true_target = trajectory::Target::left;
  std::optional<double> accuracy;
  std::optional<double> confidence;
};

struct SessionSummary {
  std::string session_id;
  std::vector<IterationMetrics> per_iteration;
  int iterations_completed = 0;
  std::array<int, kStrategyCount> strategy_counts{};
  std::array<int, 2> version_counts{};
  double strategy_entropy = 0.0;
  std::optional<double> mean_accuracy;
  std::optional<double> mean_confidence;
  std::optional<SessionRatings> ratings;
};

// Practice rounds are excluded. Throws PhaseError before the session has
// reached awaiting_rating or done, or when no iteration completed.
SessionSummary summarize_session(const Session& session);

}  // namespace deception::session
