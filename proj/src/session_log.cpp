#include "deception/session_log.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace deception::session {

namespace {

using trajectory::Point;
using trajectory::Strategy;
using trajectory::StrategyKind;
using trajectory::Target;
using trajectory::Version;

json point_json(Point p) { return json::array({p.x, p.y}); }

Point point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("point must be [x, y]");
  return Point{j.at(0).get<double>(), j.at(1).get<double>()};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known, std::string_view where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw std::invalid_argument("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

// Numbers in the CSV use the same shortest round-trip form as the log.
std::string csv_number(const std::optional<double>& v) { return v ? json(*v).dump() : std::string(); }

}  // namespace

json to_json(const SessionConfig& c) {
  const auto scene = trajectory::make_scene(c.scene);
  const auto& t = c.trajectory;
  return json{
      {"session_id", c.session_id},
      {"algorithm", markov::to_string(c.algorithm)},
      {"lambda", c.lambda},
      {"iterations", c.iterations},
      {"seed", c.seed},
      {"practice_rounds", c.practice_rounds},
      {"version_selection", to_string(c.version_selection)},
      {"pad_speed", c.pad_speed},
      {"frame_rate", t.frame_rate},
      {"reveal_true_target", c.reveal_true_target},
      {"scene",
       {{"start", point_json(scene.start)},
        {"target_left", point_json(scene.target_left)},
        {"target_right", point_json(scene.target_right)}}},
      {"trajectory",
       {{"speed", t.speed},
        {"exaggeration_depth", t.exaggeration_depth},
        {"switch_count", t.switch_count},
        {"switch_amplitude", t.switch_amplitude},
        {"commit_fraction", t.commit_fraction},
        {"dart_onset", t.dart_onset}}},
  };
}

SessionConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  reject_unknown_keys(j,
                      {"session_id", "algorithm", "lambda", "iterations", "seed", "practice_rounds",
                       "version_selection", "pad_speed", "frame_rate", "reveal_true_target", "scene",
                       "trajectory"},
                      "config");
  SessionConfig c;
  c.session_id = j.value("session_id", c.session_id);
  if (j.contains("algorithm")) c.algorithm = markov::parse_mode(j.at("algorithm").get<std::string>());
  c.lambda = j.value("lambda", c.lambda);
  c.iterations = j.value("iterations", c.iterations);
  c.seed = j.value("seed", c.seed);
  c.practice_rounds = j.value("practice_rounds", c.practice_rounds);
  if (j.contains("version_selection")) {
    c.version_selection = parse_version_selection(j.at("version_selection").get<std::string>());
  }
  c.pad_speed = j.value("pad_speed", c.pad_speed);
  c.trajectory.frame_rate = j.value("frame_rate", c.trajectory.frame_rate);
  c.reveal_true_target = j.value("reveal_true_target", c.reveal_true_target);
  if (j.contains("scene")) {
    const auto& s = j.at("scene");
    reject_unknown_keys(s, {"start", "target_left", "target_right"}, "scene");
    if (s.contains("start")) c.scene.start = point_from_json(s.at("start"));
    if (s.contains("target_left")) c.scene.target_left = point_from_json(s.at("target_left"));
    if (s.contains("target_right")) c.scene.target_right = point_from_json(s.at("target_right"));
  }
  if (j.contains("trajectory")) {
    const auto& t = j.at("trajectory");
    reject_unknown_keys(t,
                        {"speed", "exaggeration_depth", "switch_count", "switch_amplitude", "commit_fraction",
                         "dart_onset"},
                        "trajectory");
    auto& p = c.trajectory;
    p.speed = t.value("speed", p.speed);
    p.exaggeration_depth = t.value("exaggeration_depth", p.exaggeration_depth);
    p.switch_count = t.value("switch_count", p.switch_count);
    p.switch_amplitude = t.value("switch_amplitude", p.switch_amplitude);
    p.commit_fraction = t.value("commit_fraction", p.commit_fraction);
    p.dart_onset = t.value("dart_onset", p.dart_onset);
  }
  validate(c);
  return c;
}

SessionConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return config_from_json(json::parse(in));
}

json to_json(const SessionRatings& r) {
  return json{{"entertainment", r.entertainment},
              {"deception", r.deception},
              {"intelligence", r.intelligence},
              {"trust", r.trust}};
}

SessionRatings ratings_from_json(const json& j) {
  SessionRatings r;
  auto field = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw std::invalid_argument(std::string("rating '") + key + "' must be an integer");
    return v.get<int>();
  };
  r.entertainment = field("entertainment");
  r.deception = field("deception");
  r.intelligence = field("intelligence");
  r.trust = field("trust");
  validate(r);
  return r;
}

json header_json(const Session& session) {
  const auto& c = session.config();
  return json{
      {"type", "header"},
      {"session_id", c.session_id},
      {"seed", c.seed},
      {"config", to_json(c)},
      {"decisions",
       {{"version_selection", c.version_selection == VersionSelection::adaptive_two_state
                                  ? "one shared two-state selector across all iterations"
                                  : "main version only"},
        {"draw_order", json::array({"strategy", "version-if-non-optimal", "target"})},
        {"practice_strategy", "optimal"},
        {"metric_trim_fraction", metrics::MetricOptions{}.trim_fraction},
        {"reveal_true_target", c.reveal_true_target}}},
  };
}

json iteration_json(const IterationResult& r) {
  json traj = json::array();
  for (const auto& s : r.plan.trajectory.samples) traj.push_back(json::array({s.t, s.position.x, s.position.y}));
  json pad = json::array();
  for (const auto& s : r.record.trace.samples) pad.push_back(json::array({s.t, s.value}));
  return json{
      {"type", "iteration"},
      {"iteration", r.plan.index},
      {"practice", r.plan.practice},
      {"strategy", trajectory::to_string(r.plan.strategy.kind)},
      {"version", trajectory::to_string(r.plan.strategy.version)},
      {"true_target", trajectory::to_string(r.plan.true_target)},
      {"duration", r.plan.trajectory.duration},
      {"trajectory", std::move(traj)},
      {"pad", std::move(pad)},
      {"accuracy", optional_number(r.accuracy)},
      {"confidence", optional_number(r.confidence)},
      {"metrics_absent", !r.accuracy.has_value()},
  };
}

json summary_json(const SessionSummary& s) {
  json per = json::array();
  for (const auto& m : s.per_iteration) {
    per.push_back(json{{"iteration", m.iteration},
                       {"strategy", trajectory::to_string(m.strategy.kind)},
                       {"version", trajectory::to_string(m.strategy.version)},
                       {"true_target", trajectory::to_string(m.true_target)},
                       {"accuracy", optional_number(m.accuracy)},
                       {"confidence", optional_number(m.confidence)}});
  }
  json counts = json::object();
  for (std::size_t i = 0; i < kStrategyCount; ++i) {
    counts[std::string(trajectory::to_string(static_cast<Strategy>(i)))] = s.strategy_counts[i];
  }
  return json{
      {"type", "summary"},
      {"session_id", s.session_id},
      {"aborted", false},
      {"iterations_completed", s.iterations_completed},
      {"strategy_counts", std::move(counts)},
      {"version_counts", {{"main", s.version_counts[0]}, {"v2", s.version_counts[1]}}},
      {"strategy_entropy", s.strategy_entropy},
      {"mean_accuracy", optional_number(s.mean_accuracy)},
      {"mean_confidence", optional_number(s.mean_confidence)},
      {"per_iteration", std::move(per)},
      {"ratings", s.ratings ? to_json(*s.ratings) : json(nullptr)},
  };
}

json partial_summary_json(const Session& session) {
  return json{
      {"type", "summary"},
      {"session_id", session.config().session_id},
      {"aborted", true},
      {"phase", to_string(session.phase())},
      {"iterations_completed", session.results().size()},
      {"ratings", nullptr},
  };
}

void write_session_log(std::ostream& out, const Session& session) {
  out << header_json(session).dump() << '\n';
  for (const auto& r : session.practice_results()) out << iteration_json(r).dump() << '\n';
  for (const auto& r : session.results()) out << iteration_json(r).dump() << '\n';
  const bool complete = session.phase() == Phase::awaiting_rating || session.phase() == Phase::done;
  const json summary = complete ? summary_json(summarize_session(session)) : partial_summary_json(session);
  out << summary.dump() << '\n';
}

Session run_scripted_session(const SessionConfig& config, const ObserverPolicy& policy) {
  Session session(config);
  while (session.phase() == Phase::practice || session.phase() == Phase::idle) {
    const auto& plan = session.begin_iteration();
    const auto trace = observe(plan.trajectory, session.scene(), policy, config.pad_speed);
    for (const auto& s : trace.samples) {
      const auto status = session.ingest_pad_sample(s);
      if (status != IngestStatus::accepted) {
        throw std::logic_error("scripted observer sample rejected: " + std::string(to_string(status)));
      }
    }
    session.finalize_iteration();
  }
  session.finish();
  return session;
}

SessionLog read_session_log(std::istream& in) {
  SessionLog log;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  bool have_summary = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error("session log line " + std::to_string(line_no) + ": " + why);
    };
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(e.what());
    }
    const std::string type = j.value("type", "");
    if (!have_header) {
      if (type != "header") fail("first line must be the header");
      log.header = j;
      log.session_id = j.at("session_id").get<std::string>();
      log.pad_speed = j.at("config").at("pad_speed").get<double>();
      log.frame_rate = j.at("config").at("frame_rate").get<double>();
      have_header = true;
      continue;
    }
    if (have_summary) fail("record after the summary line");
    if (type == "summary") {
      log.summary = j;
      have_summary = true;
      continue;
    }
    if (type != "iteration") fail("unexpected record type '" + type + "'");
    try {
      LoggedIteration it;
      it.iteration = j.at("iteration").get<int>();
      it.practice = j.at("practice").get<bool>();
      it.strategy.kind = trajectory::parse_strategy(j.at("strategy").get<std::string>());
      it.strategy.version = trajectory::parse_version(j.at("version").get<std::string>());
      if (it.strategy.kind == Strategy::optimal && it.strategy.version == Version::v2) {
        fail("optimal strategy logged with version 2");
      }
      it.true_target = trajectory::parse_target(j.at("true_target").get<std::string>());
      it.duration = j.at("duration").get<double>();
      for (const auto& s : j.at("trajectory")) {
        it.trajectory.push_back({s.at(0).get<double>(), Point{s.at(1).get<double>(), s.at(2).get<double>()}});
      }
      for (const auto& s : j.at("pad")) it.pad.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
      it.accuracy = optional_from_json(j.at("accuracy"));
      it.confidence = optional_from_json(j.at("confidence"));
      if (it.trajectory.empty()) fail("empty trajectory");
      if (j.at("metrics_absent").get<bool>() == it.accuracy.has_value()) fail("metrics_absent flag disagrees");
      log.iterations.push_back(std::move(it));
    } catch (const json::exception& e) {
      fail(std::string("incomplete iteration record: ") + e.what());
    }
  }
  if (!have_header) throw std::runtime_error("session log is empty");
  if (!have_summary) throw std::runtime_error("session log has no summary line");
  return log;
}

SessionLog read_session_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open session log " + path);
  return read_session_log(in);
}

metrics::InteractionRecord to_record(const SessionLog& log, const LoggedIteration& it) {
  metrics::InteractionRecord rec;
  rec.true_target = it.true_target;
  rec.trace = metrics::PadTrace{it.pad, log.frame_rate, log.pad_speed};
  rec.duration = it.duration;
  rec.strategy = it.strategy;
  rec.iteration_index = it.iteration;
  return rec;
}

void write_metrics_csv(std::ostream& out, const std::vector<SessionLog>& logs) {
  out << "session_id,iteration,strategy,version,true_target,accuracy,confidence\n";
  for (const auto& log : logs) {
    for (const auto& it : log.iterations) {
      if (it.practice) continue;
      out << log.session_id << ',' << it.iteration << ',' << trajectory::to_string(it.strategy.kind) << ','
          << trajectory::to_string(it.strategy.version) << ','
          << (it.true_target == Target::left ? 0 : 1) << ',' << csv_number(it.accuracy) << ','
          << csv_number(it.confidence) << '\n';
    }
  }
}

AnalysisReport analyze(const std::vector<SessionLog>& logs, const AnalyzeOptions& options) {
  AnalysisReport report;
  std::map<Strategy, std::vector<double>> acc;
  std::map<Strategy, std::vector<double>> conf;
  for (const auto& log : logs) {
    for (const auto& it : log.iterations) {
      if (it.practice) continue;
      ++report.iterations;
      const auto rec = to_record(log, it);
      std::optional<double> a;
      std::optional<double> c;
      if (metrics::has_window_samples(rec)) {
        a = metrics::accuracy(rec);
        c = metrics::confidence(rec);
      }
      if (a != it.accuracy || c != it.confidence) ++report.metric_mismatches;
      if (a) acc[it.strategy.kind].push_back(*a);
      if (c) conf[it.strategy.kind].push_back(*c);
    }
  }

  auto run = [&](std::string label, auto&& fn) {
    NamedTest t{std::move(label), std::nullopt, {}};
    try {
      t.result = fn();
    } catch (const std::invalid_argument& e) {
      t.skipped_reason = e.what();
    }
    report.tests.push_back(std::move(t));
  };

  const Strategy all[] = {Strategy::exaggerating, Strategy::switching, Strategy::ambiguous, Strategy::optimal};
  for (Strategy s : all) {
    const std::string name(trajectory::to_string(s));
    run("accuracy:" + name + " vs reference", [&] {
      return stats::single_sample_ttest(acc[s], options.accuracy_reference);
    });
    if (options.confidence_reference) {
      run("confidence:" + name + " vs reference", [&] {
        return stats::single_sample_ttest(conf[s], *options.confidence_reference);
      });
    }
  }
  for (Strategy s : all) {
    if (s == Strategy::optimal) continue;
    const std::string name(trajectory::to_string(s));
    run("accuracy:" + name + " vs optimal", [&] {
      return stats::two_sample_ttest(acc[s], acc[Strategy::optimal], stats::Variance::welch);
    });
  }
  return report;
}

json to_json(const AnalysisReport& report) {
  json tests = json::array();
  for (const auto& t : report.tests) {
    json j{{"label", t.label}};
    if (t.result) {
      j["t"] = t.result->statistic;
      j["df"] = t.result->df;
      j["p_two_tailed"] = t.result->p_two_tailed;
      j["means"] = t.result->means;
    } else {
      j["skipped"] = t.skipped_reason;
    }
    tests.push_back(std::move(j));
  }
  return json{{"iterations", report.iterations},
              {"metric_mismatches", report.metric_mismatches},
              {"tests", std::move(tests)}};
}

}  // namespace deception::session
