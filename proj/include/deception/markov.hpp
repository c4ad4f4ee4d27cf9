#pragma once

// Strategy selection processes: the adaptive probability-transition Markov
// process plus the uniform-random and fixed baselines it is compared with.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace deception::markov {

enum class Mode { adaptive, uniform_random, fixed_block, fixed_pool };

std::string_view to_string(Mode mode);
// Accepts "adaptive", "random"/"uniform-random", "fixed-block", "fixed-pool".
Mode parse_mode(std::string_view text);

struct StateId {
  std::size_t index = 0;
  auto operator<=>(const StateId&) const = default;
};

inline constexpr double kDefaultLambda = 0.5;
inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kNegativeDust = 1e-12;

struct SelectorConfig {
  std::size_t states = 4;
  Mode mode = Mode::adaptive;
  // Adaptive mode only; kDefaultLambda when absent.
  std::optional<double> lambda;
  // Fixed-pool mode only; must be a multiple of `states`.
  std::optional<std::size_t> total_iterations;
  // Seeds the per-block permutations of fixed-block mode.
  std::uint64_t shuffle_seed = 0;
};

// Raised when an update leaves the probability vectors inconsistent. This is
// a logic fault in the update, never a user error.
class InvariantViolation : public std::logic_error {
 public:
  InvariantViolation(const std::string& what, std::vector<double> values)
      : std::logic_error(what), values_(std::move(values)) {}
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

class Selector {
 public:
  // Throws std::invalid_argument for n < 2, lambda outside (0, 1) in
  // adaptive mode, or a missing/indivisible total in fixed-pool mode.
  explicit Selector(const SelectorConfig& config);

  std::size_t size() const { return base_.size(); }
  Mode mode() const { return mode_; }
  double lambda() const { return lambda_; }

  // Probability that each state is chosen next. Never mutates.
  std::vector<double> distribution() const;

  // Applies the choice of `chosen` and re-checks all invariants.
  void advance(StateId chosen);

  // Inverse-CDF choice in ascending index order from a single draw u in
  // [0, 1), followed by advance().
  StateId sample_step(double u);

  const std::vector<double>& base_probs() const { return base_; }
  const std::vector<double>& trans_probs() const { return trans_; }
  const std::vector<std::uint64_t>& occurrences() const { return occurrences_; }
  std::uint64_t baseline() const { return baseline_; }
  // C_i = o_i - min(o).
  std::vector<std::uint64_t> counters() const;
  std::uint64_t iteration() const { return history_.size(); }
  const std::vector<StateId>& history() const { return history_; }
  // Fixed-pool mode: copies of each state still in the pool.
  const std::vector<std::uint64_t>& pool_remaining() const { return pool_; }
  // Fixed-block mode: current block order and position within it.
  const std::vector<StateId>& block() const { return block_; }
  std::size_t block_cursor() const { return cursor_; }

 private:
  void advance_adaptive(std::size_t chosen);
  void apply_transition(std::size_t chosen, const std::vector<std::uint64_t>& counters);
  void apply_reset(std::size_t chosen, const std::vector<std::uint64_t>& before,
                   const std::vector<std::uint64_t>& after);
  std::vector<double> shares_for(std::span<const std::uint64_t> counters) const;
  double initial_base() const { return 1.0 / static_cast<double>(size()); }
  void check_invariants();
  void draw_block();
  void refill_pool();

  Mode mode_;
  double lambda_ = 0.0;
  std::vector<double> base_;
  std::vector<double> trans_;
  std::vector<std::uint64_t> occurrences_;
  std::uint64_t baseline_ = 0;
  std::vector<StateId> history_;

  std::size_t pool_copies_ = 0;
  std::vector<std::uint64_t> pool_;

  std::vector<StateId> block_;
  std::size_t cursor_ = 0;
  std::mt19937_64 shuffle_rng_;
};

// Shannon entropy in bits of the empirical state frequencies.
// Throws std::invalid_argument on an empty history.
double empirical_entropy(std::span<const StateId> history, std::size_t states);

// Fraction of choices (after the first) equal to the preceding choice.
double immediate_repeat_rate(std::span<const StateId> history);

std::vector<double> empirical_probabilities(std::span<const StateId> history,
                                            std::size_t states);

struct TrialConfig {
  SelectorConfig selector;
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
  bool keep_distributions = true;
};

struct TrialResult {
  std::vector<StateId> history;
  // Distribution in force before each draw (empty unless kept).
  std::vector<std::vector<double>> per_step_distributions;
  std::vector<double> empirical_probs;
  double entropy_bits = 0.0;
  double immediate_repeat_rate = 0.0;
};

// One seeded run: `iterations` calls of sample_step, one uniform draw each.
TrialResult run_trial(const TrialConfig& config);

}  // namespace deception::markov
