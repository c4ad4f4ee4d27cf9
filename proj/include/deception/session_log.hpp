#pragma once

// JSON-lines session logs, CSV export and offline analysis.
//
// Log layout: line 1 is the header (resolved config, seed, design choices),
// then one line per iteration (practice rounds included and flagged), then a
// summary line carrying the ratings when present.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "deception/metrics.hpp"
#include "deception/observer.hpp"
#include "deception/session.hpp"
#include "deception/stats.hpp"

namespace deception::session {

using nlohmann::json;

json to_json(const SessionConfig& config);
// Missing keys take their defaults; unknown keys are rejected.
SessionConfig config_from_json(const json& j);
SessionConfig load_config(const std::string& path);

json to_json(const SessionRatings& ratings);
SessionRatings ratings_from_json(const json& j);

json header_json(const Session& session);
json iteration_json(const IterationResult& result);
json summary_json(const SessionSummary& summary);
// Summary line for a session that stopped before its last iteration.
json partial_summary_json(const Session& session);

// Header, every completed practice and scored iteration, summary.
void write_session_log(std::ostream& out, const Session& session);

// Runs every practice round and iteration against a scripted observer and
// closes the session without ratings.
Session run_scripted_session(const SessionConfig& config, const ObserverPolicy& policy);

struct LoggedIteration {
  int iteration = 0;
  bool practice = false;
  trajectory::StrategyKind strategy;
  trajectory::Target true_target = trajectory::Target::left;
  double duration = 0.0;
  std::vector<trajectory::Sample> trajectory;
  std::vector<metrics::PadSample> pad;
  std::optional<double> accuracy;
  std::optional<double> confidence;
};

struct SessionLog {
  json header;
  std::string session_id;
  double pad_speed = 0.0;
  double frame_rate = 0.0;
  std::vector<LoggedIteration> iterations;
  json summary;
};

// Throws std::runtime_error naming the line of the first incomplete record.
SessionLog read_session_log(std::istream& in);
SessionLog read_session_log_file(const std::string& path);

metrics::InteractionRecord to_record(const SessionLog& log, const LoggedIteration& it);

// Columns: session_id, iteration, strategy, version, true_target, accuracy,
// confidence. Practice rounds are skipped; absent metrics are empty cells.
void write_metrics_csv(std::ostream& out, const std::vector<SessionLog>& logs);

struct AnalyzeOptions {
  double accuracy_reference = 0.5;
  std::optional<double> confidence_reference;
};

struct NamedTest {
  std::string label;
  std::optional<stats::TestResult> result;
  std::string skipped_reason;  // set when result is empty
};

struct AnalysisReport {
  std::size_t iterations = 0;
  // Iterations whose recomputed metrics differ from the logged values.
  std::size_t metric_mismatches = 0;
  std::vector<NamedTest> tests;
};

// Recomputes metrics from the raw pad traces, then runs single-sample tests
// per strategy against the references and Welch tests of each deceptive
// strategy against optimal.
AnalysisReport analyze(const std::vector<SessionLog>& logs, const AnalyzeOptions& options);
json to_json(const AnalysisReport& report);

}  // namespace deception::session
