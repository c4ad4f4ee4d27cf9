// deception: command-line front end for the long-run deception engine.
//
//   simulate-entropy  Monte-Carlo entropy/repetition statistics of a selector
//   run-batch         headless session against a scripted observer
//   serve             live WebSocket protocol for the game client
//   analyze           recompute metrics from logs and run t-tests
//   export            metrics CSV from session logs

#include <cmath>
#include <csignal>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "deception/markov.hpp"
#include "deception/session_log.hpp"
#include "deception/ws_server.hpp"

namespace {

using namespace deception;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

int simulate_entropy(std::size_t states, const std::string& mode, double lambda, std::size_t iterations,
                     std::size_t runs, std::uint64_t seed, const std::string& out_path) {
  markov::TrialConfig cfg;
  cfg.selector.states = states;
  cfg.selector.mode = markov::parse_mode(mode);
  cfg.selector.lambda = lambda;
  if (cfg.selector.mode == markov::Mode::fixed_pool) cfg.selector.total_iterations = iterations;
  cfg.iterations = iterations;
  cfg.keep_distributions = false;

  auto out = open_out(out_path);
  out << "run,seed,mode,entropy_bits,immediate_repeat_rate";
  for (std::size_t i = 0; i < states; ++i) out << ",p_s" << i;
  out << '\n';

  std::vector<double> entropies;
  std::vector<double> repeats;
  for (std::size_t r = 0; r < runs; ++r) {
    cfg.seed = seed + r;
    cfg.selector.shuffle_seed = cfg.seed;
    const auto res = markov::run_trial(cfg);
    entropies.push_back(res.entropy_bits);
    repeats.push_back(res.immediate_repeat_rate);
    out << r << ',' << cfg.seed << ',' << markov::to_string(cfg.selector.mode) << ','
        << session::json(res.entropy_bits).dump() << ',' << session::json(res.immediate_repeat_rate).dump();
    for (double p : res.empirical_probs) out << ',' << session::json(p).dump();
    out << '\n';
  }
  const double n = static_cast<double>(runs);
  const double mean = std::accumulate(entropies.begin(), entropies.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : entropies) ss += (e - mean) * (e - mean);
  const session::json summary{
      {"mode", markov::to_string(cfg.selector.mode)},
      {"states", states},
      {"iterations", iterations},
      {"runs", runs},
      {"mean_entropy_bits", mean},
      {"sd_entropy_bits", runs > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0},
      {"min_entropy_bits", *std::min_element(entropies.begin(), entropies.end())},
      {"max_entropy_bits", *std::max_element(entropies.begin(), entropies.end())},
      {"mean_immediate_repeat_rate", std::accumulate(repeats.begin(), repeats.end(), 0.0) / n},
  };
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int run_batch(const std::string& config_path, const std::string& observer, double delay, double hold_value,
              const std::string& out_path) {
  const auto cfg = config_path.empty() ? session::SessionConfig{} : session::load_config(config_path);
  session::ObserverPolicy policy;
  if (observer == "nearest-target") {
    policy = session::NearestTargetPolicy{delay};
  } else {
    policy = session::HoldPolicy{hold_value};
  }
  const auto s = session::run_scripted_session(cfg, policy);
  auto out = open_out(out_path);
  session::write_session_log(out, s);
  std::cout << session::summary_json(session::summarize_session(s)).dump(2) << '\n';
  return 0;
}

std::vector<session::SessionLog> read_logs(const std::vector<std::string>& paths) {
  std::vector<session::SessionLog> logs;
  for (const auto& p : paths) logs.push_back(session::read_session_log_file(p));
  return logs;
}

deception::server::WebSocketServer* g_server = nullptr;

extern "C" void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-run robot deception engine"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate-entropy", "Entropy and repetition statistics over seeded runs");
  std::size_t states = 4;
  std::string mode = "adaptive";
  double lambda = markov::kDefaultLambda;
  std::size_t iterations = 100;
  std::size_t runs = 1000;
  std::uint64_t seed = 1;
  std::string out_path;
  sim->add_option("--states", states, "Number of states")->check(CLI::Range(2, 1000));
  sim->add_option("--mode", mode, "adaptive|random|fixed-block|fixed-pool")
      ->check(CLI::IsMember({"adaptive", "random", "uniform-random", "fixed-block", "fixed-pool"}));
  sim->add_option("--lambda", lambda, "Transition rate parameter (adaptive)");
  sim->add_option("--iterations", iterations, "Choices per run")->check(CLI::PositiveNumber);
  sim->add_option("--runs", runs, "Number of seeded runs")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Seed of run 0; run r uses seed + r");
  sim->add_option("--out", out_path, "Per-run CSV")->required();

  auto* batch = app.add_subcommand("run-batch", "Headless session against a scripted observer");
  std::string config_path;
  std::string observer = "nearest-target";
  double delay = 0.4;
  double hold_value = 0.5;
  batch->add_option("--config", config_path, "Session config JSON")->check(CLI::ExistingFile);
  batch->add_option("--observer", observer, "nearest-target|hold")
      ->check(CLI::IsMember({"nearest-target", "hold"}));
  batch->add_option("--delay", delay, "Reaction delay of the nearest-target observer (s)")
      ->check(CLI::NonNegativeNumber);
  batch->add_option("--hold-value", hold_value, "Pad value of the hold observer")->check(CLI::Range(0.0, 1.0));
  batch->add_option("--out", out_path, "Session log (JSONL)")->required();

  auto* serve = app.add_subcommand("serve", "Serve the live protocol over WebSocket");
  std::uint16_t port = 8080;
  std::string log_dir = "sessions";
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--config", config_path, "Session config JSON")->check(CLI::ExistingFile);
  serve->add_option("--log-dir", log_dir, "Directory for session logs");

  std::vector<std::string> inputs;
  double ttest_ref = 0.5;
  std::optional<double> confidence_ref;
  std::string report_path;
  auto* analyze = app.add_subcommand("analyze", "Recompute metrics and run t-tests");
  analyze->add_option("--in", inputs, "Session log(s)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--ttest-ref", ttest_ref, "Reference mean for accuracy tests");
  analyze->add_option("--confidence-ref", confidence_ref, "Reference mean for confidence tests");
  analyze->add_option("--out", out_path, "Metrics CSV")->required();
  analyze->add_option("--report", report_path, "Also write the t-test report as JSON");

  auto* exp = app.add_subcommand("export", "Export metrics CSV");
  exp->add_option("--in", inputs, "Session log(s)")->required()->check(CLI::ExistingFile);
  exp->add_option("--out", out_path, "Metrics CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate_entropy(states, mode, lambda, iterations, runs, seed, out_path);
    if (*batch) return run_batch(config_path, observer, delay, hold_value, out_path);
    if (*serve) {
      server::ServeOptions opts;
      opts.port = port;
      opts.log_dir = log_dir;
      if (!config_path.empty()) opts.config = session::load_config(config_path);
      opts.log = [](std::string_view msg) { std::cerr << msg << '\n'; };
      server::WebSocketServer srv(opts);
      g_server = &srv;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cerr << "listening on port " << srv.port() << '\n';
      srv.run();
      return 0;
    }
    if (*analyze) {
      const auto logs = read_logs(inputs);
      auto out = open_out(out_path);
      session::write_metrics_csv(out, logs);
      const auto report = session::to_json(session::analyze(logs, {ttest_ref, confidence_ref}));
      std::cout << report.dump(2) << '\n';
      if (!report_path.empty()) open_out(report_path) << report.dump(2) << '\n';
      return report.at("metric_mismatches").get<std::size_t>() == 0 ? 0 : 2;
    }
    if (*exp) {
      const auto logs = read_logs(inputs);
      auto out = open_out(out_path);
      session::write_metrics_csv(out, logs);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
