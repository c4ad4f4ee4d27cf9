#include "deception/live_session.hpp"

#include <sstream>

#include "deception/session_log.hpp"

namespace deception::session {

LiveSession::LiveSession(SessionConfig config, Warn warn) : session_(std::move(config)), warn_(std::move(warn)) {}

void LiveSession::warn(std::string_view message) const {
  if (warn_) warn_(message);
}

json LiveSession::open() {
  const auto& c = session_.config();
  const auto& s = session_.scene();
  return json{
      {"type", "session_start"},
      {"session_id", c.session_id},
      {"scene",
       {{"start", {s.start.x, s.start.y}},
        {"target_left", {s.target_left.x, s.target_left.y}},
        {"target_right", {s.target_right.x, s.target_right.y}}}},
      {"iterations", c.iterations},
      {"practice_rounds", c.practice_rounds},
      {"pad_speed", c.pad_speed},
      {"frame_rate", c.trajectory.frame_rate},
  };
}

std::vector<json> LiveSession::start_iteration(double now) {
  const auto& plan = session_.begin_iteration();
  iteration_start_ = now;
  next_frame_ = 0;
  std::vector<json> out{json{{"type", "iteration_start"},
                             {"index", plan.index},
                             {"practice", plan.practice},
                             {"duration", plan.trajectory.duration}}};
  auto frames = tick(now);
  out.insert(out.end(), std::make_move_iterator(frames.begin()), std::make_move_iterator(frames.end()));
  return out;
}

std::vector<json> LiveSession::handle_text(std::string_view text, double now) {
  json message;
  try {
    message = json::parse(text);
  } catch (const json::parse_error&) {
    warn("ignoring malformed message");
    return {};
  }
  return handle(message, now);
}

std::vector<json> LiveSession::handle(const json& message, double now) {
  if (!message.is_object() || !message.contains("type") || !message["type"].is_string()) {
    warn("ignoring message without a type");
    return {};
  }
  const std::string type = message["type"].get<std::string>();
  if (type == "ready") {
    const Phase p = session_.phase();
    if (p != Phase::idle && p != Phase::practice) {
      warn("ignoring ready in phase " + std::string(to_string(p)));
      return {};
    }
    return start_iteration(now);
  }
  if (type == "pad") {
    if (!message.contains("t") || !message.contains("value") || !message["t"].is_number() ||
        !message["value"].is_number()) {
      warn("ignoring pad message without numeric t and value");
      return {};
    }
    const auto status = session_.ingest_pad_sample({message["t"].get<double>(), message["value"].get<double>()});
    if (status != IngestStatus::accepted) {
      ++rejected_;
      warn("pad sample rejected: " + std::string(to_string(status)));
    }
    return {};
  }
  if (type == "rating") {
    if (session_.phase() != Phase::awaiting_rating) {
      warn("ignoring rating in phase " + std::string(to_string(session_.phase())));
      return {};
    }
    try {
      session_.submit_ratings(ratings_from_json(message));
    } catch (const std::exception& e) {
      warn(std::string("ignoring invalid rating: ") + e.what());
    }
    return {};
  }
  warn("ignoring unknown message type '" + type + "'");
  return {};
}

std::vector<json> LiveSession::tick(double now) {
  std::vector<json> out;
  if (session_.phase() != Phase::running_iteration) return out;
  const auto& plan = *session_.current_plan();
  const auto& samples = plan.trajectory.samples;
  const double elapsed = now - iteration_start_;
  while (next_frame_ < samples.size() && samples[next_frame_].t <= elapsed) {
    const auto& s = samples[next_frame_++];
    out.push_back(json{{"type", "frame"}, {"seq", next_seq_++}, {"t", s.t}, {"x", s.position.x}, {"y", s.position.y}});
  }
  if (next_frame_ == samples.size() && elapsed >= plan.trajectory.duration + kGraceSeconds) {
    const auto& r = session_.finalize_iteration();
    const bool reveal = session_.config().reveal_true_target;
    out.push_back(json{{"type", "iteration_end"},
                       {"index", r.plan.index},
                       {"practice", r.plan.practice},
                       {"true_target", reveal ? json(trajectory::to_string(r.plan.true_target)) : json(nullptr)},
                       {"accuracy", r.accuracy ? json(*r.accuracy) : json(nullptr)},
                       {"confidence", r.confidence ? json(*r.confidence) : json(nullptr)}});
    if (session_.phase() == Phase::awaiting_rating) {
      out.push_back(json{{"type", "session_end"}, {"summary", summary_json(summarize_session(session_))}});
    }
  }
  return out;
}

std::string LiveSession::log_text() const {
  std::ostringstream out;
  write_session_log(out, session_);
  return out.str();
}

}  // namespace deception::session
