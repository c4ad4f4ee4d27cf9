// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// values underneath. Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "deception/markov.hpp"
#include "deception/metrics.hpp"
#include "deception/rng.hpp"
#include "deception/session_log.hpp"
#include "deception/stats.hpp"
#include "deception/trajectory.hpp"
#include "oracles/markov_oracle.hpp"
#include "oracles/t_oracle.hpp"
#include "support/traces.hpp"

namespace fs = std::filesystem;
using namespace deception;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome worked_example() {
  Outcome o;
  markov::SelectorConfig c;
  c.lambda = 0.5;
  markov::Selector s(c);
  for (std::size_t i : {0, 1, 2}) s.advance(markov::StateId{i});
  const std::vector<double> before{0.125, 0.125, 0.125, 0.625};
  double err = 0.0;
  auto q = s.distribution();
  for (std::size_t i = 0; i < 4; ++i) err = std::max(err, std::abs(q[i] - before[i]));
  o.check(err <= 1e-12, "after S0,S1,S2: max error " + fmt(err) + " vs [1/8,1/8,1/8,5/8]");
  s.advance(markov::StateId{3});
  q = s.distribution();
  err = 0.0;
  for (double v : q) err = std::max(err, std::abs(v - 0.25));
  o.check(err <= 1e-12, "after S3 (reset): max error " + fmt(err) + " vs uniform");
  return o;
}

Outcome conservation() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240601);
  for (std::size_t n : {2, 3, 4, 6}) {
    for (double lambda : {0.25, 0.5, 0.75}) {
      markov::SelectorConfig c;
      c.states = n;
      c.lambda = lambda;
      markov::Selector s(c);
      double worst_sum = 0.0;
      double lowest = 0.0;
      for (int step = 0; step < 100000; ++step) {
        s.advance(markov::StateId{static_cast<std::size_t>(rng.below(n))});
        const auto q = s.distribution();
        worst_sum = std::max(worst_sum, std::abs(std::accumulate(q.begin(), q.end(), 0.0) - 1.0));
        for (double v : s.trans_probs()) lowest = std::min(lowest, v);
        for (double v : s.base_probs()) lowest = std::min(lowest, v);
      }
      o.check(worst_sum <= 1e-9 && lowest >= -1e-12,
              "n=" + std::to_string(n) + " lambda=" + fmt(lambda) + ": max |sum-1| " + fmt(worst_sum, 3) +
                  ", min entry " + fmt(lowest, 3));
    }
  }
  const double secs = seconds_since(t0);
  o.check(secs < 30.0, "runtime " + fmt(secs, 3) + " s (< 30 s)");
  return o;
}

Outcome entropy_reproduction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const int runs = 1000;
  std::vector<double> adaptive;
  std::vector<double> random;
  for (int r = 0; r < runs; ++r) {
    markov::TrialConfig t;
    t.iterations = 100;
    t.keep_distributions = false;
    t.seed = static_cast<std::uint64_t>(1 + r);
    t.selector.lambda = 0.5;
    adaptive.push_back(markov::run_trial(t).entropy_bits);
    t.selector.mode = markov::Mode::uniform_random;
    t.selector.lambda.reset();
    random.push_back(markov::run_trial(t).entropy_bits);
  }
  const double mean_a = std::accumulate(adaptive.begin(), adaptive.end(), 0.0) / runs;
  const double mean_r = std::accumulate(random.begin(), random.end(), 0.0) / runs;
  int wins = 0;
  for (int r = 0; r < runs; ++r) wins += adaptive[r] > random[r];
  const double frac = static_cast<double>(wins) / runs;
  o.check(mean_a >= 1.97, "adaptive mean entropy " + fmt(mean_a) + " bits (>= 1.97)");
  o.check(mean_r >= 1.85 && mean_r <= 1.93, "uniform-random mean entropy " + fmt(mean_r) + " bits (in [1.85, 1.93])");
  o.check(frac >= 0.95, "adaptive > random on " + fmt(100 * frac, 4) + "% of paired seeds (>= 95%)");
  const double secs = seconds_since(t0);
  o.check(secs < 10.0, "runtime " + fmt(secs, 3) + " s (< 10 s)");
  return o;
}

Outcome repetition_contrast() {
  Outcome o;
  markov::TrialConfig t;
  t.iterations = 100000;
  t.keep_distributions = false;
  t.seed = 7;
  const double adaptive = markov::run_trial(t).immediate_repeat_rate;
  t.selector.mode = markov::Mode::uniform_random;
  t.selector.lambda.reset();
  const double random = markov::run_trial(t).immediate_repeat_rate;
  o.check(adaptive < 0.17, "adaptive immediate-repeat rate " + fmt(adaptive) + " (< 0.17)");
  o.check(std::abs(random - 0.25) <= 0.01, "uniform-random immediate-repeat rate " + fmt(random) + " (0.25 +/- 0.01)");
  return o;
}

Outcome permutation_consistency() {
  Outcome o;
  std::size_t sequences = 0;
  std::size_t mismatches = 0;
  double worst = 0.0;
  std::vector<std::size_t> seq;
  std::function<void()> visit = [&] {
    if (!seq.empty()) {
      markov::SelectorConfig c;
      c.lambda = 0.5;
      markov::Selector s(c);
      for (auto i : seq) s.advance(markov::StateId{i});
      const auto q = s.distribution();
      const auto counters = s.counters();
      const auto ref = oracle::canonical_replay(std::vector<int>(counters.begin(), counters.end()), oracle::Q(1, 2));
      // Compare within each class of equal counters, as multisets.
      std::map<std::uint64_t, std::pair<std::vector<double>, std::vector<double>>> classes;
      for (std::size_t i = 0; i < 4; ++i) {
        classes[counters[i]].first.push_back(q[i]);
        classes[counters[i]].second.push_back(ref[i]);
      }
      bool ok = true;
      for (auto& [level, pair] : classes) {
        std::sort(pair.first.begin(), pair.first.end());
        std::sort(pair.second.begin(), pair.second.end());
        for (std::size_t k = 0; k < pair.first.size(); ++k) {
          const double d = std::abs(pair.first[k] - pair.second[k]);
          worst = std::max(worst, d);
          ok = ok && d <= 1e-12;
        }
      }
      ++sequences;
      mismatches += !ok;
    }
    if (seq.size() == 6) return;
    for (std::size_t i = 0; i < 4; ++i) {
      seq.push_back(i);
      visit();
      seq.pop_back();
    }
  };
  visit();
  o.check(sequences == 5460 && mismatches == 0, std::to_string(sequences) + " sequences, " +
                                                    std::to_string(mismatches) + " mismatches, max deviation " +
                                                    fmt(worst, 3));
  return o;
}

Outcome trajectory_geometry() {
  using namespace trajectory;
  Outcome o;
  const Scene scene = make_scene();
  const TrajectoryParams params;
  const std::vector<StrategyKind> kinds{{Strategy::exaggerating, Version::main}, {Strategy::switching, Version::main},
                                        {Strategy::ambiguous, Version::main},    {Strategy::optimal, Version::main},
                                        {Strategy::exaggerating, Version::v2},   {Strategy::switching, Version::v2},
                                        {Strategy::ambiguous, Version::v2}};
  double end_err = 0.0;
  double mirror_err = 0.0;
  for (const auto& k : kinds) {
    const auto l = generate_trajectory(scene, k, Target::left, params);
    const auto r = generate_trajectory(scene, k, Target::right, params);
    end_err = std::max({end_err, distance(l.samples.back().position, scene.target_left),
                        distance(r.samples.back().position, scene.target_right)});
    if (l.samples.size() != r.samples.size()) {
      mirror_err = INFINITY;
      continue;
    }
    for (std::size_t i = 0; i < l.samples.size(); ++i) {
      mirror_err = std::max({mirror_err, std::abs(l.samples[i].position.x + r.samples[i].position.x - 1.0),
                             std::abs(l.samples[i].position.y - r.samples[i].position.y)});
    }
  }
  o.check(end_err < 1e-6, "all 14 combinations end on the true target, max error " + fmt(end_err, 3));
  o.check(mirror_err < 1e-9, "mirror symmetry, max deviation " + fmt(mirror_err, 3));

  double midline_err = 0.0;
  for (Target t : {Target::left, Target::right}) {
    const auto a = generate_trajectory(scene, {Strategy::ambiguous, Version::main}, t, params);
    for (const auto& s : a.samples) {
      if (s.position.y < params.commit_fraction) {
        midline_err = std::max(midline_err, std::abs(distance(s.position, scene.target_left) -
                                                     distance(s.position, scene.target_right)));
      }
    }
  }
  o.check(midline_err < 1e-9, "ambiguous equidistance before commit, max deviation " + fmt(midline_err, 3));

  bool crossings_ok = true;
  std::string crossings;
  for (int k : {1, 2, 3, 4, 5}) {
    TrajectoryParams p = params;
    p.switch_count = k;
    for (Target t : {Target::left, Target::right}) {
      const auto sw = generate_trajectory(scene, {Strategy::switching, Version::main}, t, p);
      int changes = 0;
      int last = 0;
      for (const auto& s : sw.samples) {
        const double off = s.position.x - scene.midline();
        const int sign = off > 1e-12 ? 1 : (off < -1e-12 ? -1 : 0);
        if (sign == 0) continue;
        changes += last != 0 && sign != last;
        last = sign;
      }
      crossings_ok = crossings_ok && changes == k;
      if (t == Target::right) crossings += (crossings.empty() ? "" : " ") + std::to_string(k) + "->" + std::to_string(changes);
    }
  }
  o.check(crossings_ok, "switching midline crossings (configured->observed): " + crossings);

  bool closer = true;
  std::string dists;
  for (Target t : {Target::left, Target::right}) {
    auto min_to = [&](const Trajectory& tr) {
      double m = INFINITY;
      for (const auto& s : tr.samples) m = std::min(m, distance(s.position, scene.target(other(t))));
      return m;
    };
    const double ex = min_to(generate_trajectory(scene, {Strategy::exaggerating, Version::main}, t, params));
    const double op = min_to(generate_trajectory(scene, {Strategy::optimal, Version::main}, t, params));
    closer = closer && ex < op;
    dists += std::string(to_string(t)) + ": " + fmt(ex, 4) + " < " + fmt(op, 4) + "  ";
  }
  o.check(closer, "exaggerating approaches the false target closer than optimal (" + dists + ")");
  return o;
}

Outcome metric_cases() {
  Outcome o;
  const double tau = 4.0;
  for (double rate : {30.0, 120.0}) {
    const double tol = rate == 30.0 ? 1e-2 : 1e-3;
    auto flat = [](double v) { return [v](double) { return v; }; };
    metrics::MetricOptions untrimmed;
    untrimmed.trim_fraction = 0.0;
    const std::vector<std::pair<std::string, std::pair<double, double>>> cases{
        {"accuracy, pad constant at T",
         {metrics::accuracy(support::record(support::sample_trace(flat(1.0), tau, rate, 0.3), tau, 1)), 0.0}},
        {"accuracy, pad constant at 1-T",
         {metrics::accuracy(support::record(support::sample_trace(flat(0.0), tau, rate, 0.3), tau, 1)), 1.0}},
        {"accuracy, pad constant at 0.8 with T=1",
         {metrics::accuracy(support::record(support::sample_trace(flat(0.8), tau, rate, 0.3), tau, 1)), 0.2}},
        {"confidence, no motion",
         {metrics::confidence(support::record(support::sample_trace(flat(0.5), tau, rate, 0.3), tau, 1)), 0.0}},
        {"confidence, motion over the whole window",
         {metrics::confidence(support::record(
              support::sample_trace(support::bouncing(0.5, 0.2, 0.53, 0.3), tau, rate, 0.3), tau, 1)),
          1.0}},
        {"confidence, motion over the second half (untrimmed)",
         {metrics::confidence(support::record(
                                  support::sample_trace(support::late_motion(0.1, tau / 2, 0.2), tau, rate, 0.2),
                                  tau, 0),
                              untrimmed),
          0.75}},
    };
    for (const auto& [name, vals] : cases) {
      const double err = std::abs(vals.first - vals.second);
      o.check(err <= tol, fmt(rate, 4) + " Hz " + name + ": " + fmt(vals.first, 8) + " (expected " +
                              fmt(vals.second) + ", tol " + fmt(tol) + ")");
    }
  }
  return o;
}

std::vector<double> normal_sample(Rng& rng, std::size_t n, double mu, double sd) {
  std::vector<double> out;
  while (out.size() < n) {
    const double r = std::sqrt(-2.0 * std::log(1.0 - rng.uniform()));
    out.push_back(mu + sd * r * std::cos(2 * M_PI * rng.uniform()));
  }
  return out;
}

Outcome ttest_oracle() {
  Outcome o;
  const std::vector<double> xs{0.6, 0.7, 0.8};
  const auto ex = stats::single_sample_ttest(xs, 0.5);
  o.check(std::abs(ex.statistic - 3.4641) < 5e-5 && ex.df == 2.0,
          "[0.6,0.7,0.8] vs 0.5: t = " + fmt(ex.statistic) + ", df = " + fmt(ex.df) + ", p = " + fmt(ex.p_two_tailed));
  Rng rng(99);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto a = normal_sample(rng, 3 + rng.below(40), 0.5 + 0.2 * (rng.uniform() - 0.5), 0.05 + 0.2 * rng.uniform());
    const auto b = normal_sample(rng, 3 + rng.below(40), 0.5, 0.05 + 0.2 * rng.uniform());
    const auto one = stats::single_sample_ttest(a, 0.5);
    const auto two = stats::two_sample_ttest(a, b);
    worst = std::max(worst, std::abs(one.p_two_tailed - oracle::two_tailed_p(one.statistic, one.df)));
    worst = std::max(worst, std::abs(two.p_two_tailed - oracle::two_tailed_p(two.statistic, two.df)));
  }
  o.check(worst <= 1e-6, "20 randomized datasets (single and Welch): max |p - oracle| " + fmt(worst, 3));
  return o;
}

int run(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome headless_end_to_end() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fs::temp_directory_path() / ("deception-e2e-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({"algorithm": "adaptive", "lambda": 0.5, "iterations": 20, "seed": 2024})" << '\n';
  }
  const std::string cli = DECEPTION_CLI;
  const std::string batch = cli + " run-batch --config " + (dir / "config.json").string() +
                            " --observer nearest-target --delay 0.4 --out ";
  const int rc1 = run(batch + (dir / "a.jsonl").string());
  const int rc2 = run(batch + (dir / "b.jsonl").string());
  o.check(rc1 == 0 && rc2 == 0, "run-batch exit codes " + std::to_string(rc1) + ", " + std::to_string(rc2));
  const auto a = slurp(dir / "a.jsonl");
  o.check(!a.empty() && a == slurp(dir / "b.jsonl"), "repeated runs are byte-identical (" + std::to_string(a.size()) + " bytes)");

  try {
    const auto log = session::read_session_log_file((dir / "a.jsonl").string());
    int scored = 0;
    bool complete = true;
    for (const auto& it : log.iterations) {
      scored += !it.practice;
      complete = complete && !it.trajectory.empty() && !it.pad.empty() && it.accuracy && it.confidence;
    }
    o.check(scored == 20 && complete && log.summary.at("aborted") == false,
            "strict reader accepts the log: " + std::to_string(scored) + " scored iterations, all records complete");

    const session::LoggedIteration* first = nullptr;
    const session::LoggedIteration* first_main = nullptr;
    for (const auto& it : log.iterations) {
      if (it.practice || it.strategy.kind != trajectory::Strategy::exaggerating) continue;
      if (!first) first = &it;
      if (!first_main && it.strategy.version == trajectory::Version::main) first_main = &it;
    }
    if (first) {
      o.note("first exaggerating iteration: #" + std::to_string(first->iteration) + " (" +
             std::string(trajectory::to_string(first->strategy.version)) + "), accuracy " + fmt(*first->accuracy));
    }
    o.check(first_main && *first_main->accuracy > 0.5,
            first_main ? "first main-version exaggerating iteration #" + std::to_string(first_main->iteration) +
                             ": accuracy " + fmt(*first_main->accuracy) + " (> 0.5)"
                       : std::string("no main-version exaggerating iteration in the session"));
  } catch (const std::exception& e) {
    o.check(false, std::string("log rejected: ") + e.what());
  }

  const int rc3 = run(cli + " analyze --in " + (dir / "a.jsonl").string() + " --ttest-ref 0.5 --out " +
                      (dir / "metrics.csv").string());
  const int rc4 = run(cli + " export --in " + (dir / "a.jsonl").string() + " --out " + (dir / "export.csv").string());
  const auto csv = slurp(dir / "export.csv");
  o.check(rc3 == 0 && rc4 == 0 && std::count(csv.begin(), csv.end(), '\n') == 21,
          "analyze and export succeed (exit " + std::to_string(rc3) + ", " + std::to_string(rc4) + "; " +
              std::to_string(std::count(csv.begin(), csv.end(), '\n')) + " CSV lines)");
  const double secs = seconds_since(t0);
  o.check(secs < 20.0, "runtime " + fmt(secs, 3) + " s (< 20 s)");
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"worked-example exactness", worked_example},
      {"conservation suite", conservation},
      {"entropy reproduction", entropy_reproduction},
      {"repetition contrast", repetition_contrast},
      {"permutation-consistency oracle", permutation_consistency},
      {"trajectory geometry suite", trajectory_geometry},
      {"metric analytic cases", metric_cases},
      {"t-test oracle", ttest_oracle},
      {"headless end-to-end", headless_end_to_end},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << '\n';
    for (const auto& d : o.details) std::cout << "        " << d << '\n';
    std::cout.flush();
  }
  std::cout << (criteria.size() - failed) << '/' << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
