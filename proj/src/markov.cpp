#include "deception/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "deception/rng.hpp"

namespace deception::markov {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::adaptive:
      return "adaptive";
    case Mode::uniform_random:
      return "random";
    case Mode::fixed_block:
      return "fixed-block";
    case Mode::fixed_pool:
      return "fixed-pool";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "adaptive") return Mode::adaptive;
  if (text == "random" || text == "uniform-random") return Mode::uniform_random;
  if (text == "fixed-block") return Mode::fixed_block;
  if (text == "fixed-pool") return Mode::fixed_pool;
  throw std::invalid_argument("unknown selection mode: " + std::string(text));
}

Selector::Selector(const SelectorConfig& config)
    : mode_(config.mode), shuffle_rng_(config.shuffle_seed) {
  const std::size_t n = config.states;
  if (n < 2) throw std::invalid_argument("selector needs at least 2 states");

  if (mode_ == Mode::adaptive) {
    lambda_ = config.lambda.value_or(kDefaultLambda);
    // lambda = 1 makes the reset restoration divide by zero.
    if (!(lambda_ > 0.0 && lambda_ < 1.0)) {
      throw std::invalid_argument("lambda out of range (0, 1)");
    }
  }

  base_.assign(n, 1.0 / static_cast<double>(n));
  trans_.assign(n, 0.0);
  occurrences_.assign(n, 0);

  if (mode_ == Mode::fixed_pool) {
    if (!config.total_iterations) {
      throw std::invalid_argument("fixed-pool mode needs total_iterations");
    }
    if (*config.total_iterations == 0 || *config.total_iterations % n != 0) {
      throw std::invalid_argument("total_iterations must be a positive multiple of the state count");
    }
    pool_copies_ = *config.total_iterations / n;
    refill_pool();
  }
  if (mode_ == Mode::fixed_block) draw_block();
}

std::vector<std::uint64_t> Selector::counters() const {
  std::vector<std::uint64_t> c(occurrences_.size());
  std::transform(occurrences_.begin(), occurrences_.end(), c.begin(),
                 [this](std::uint64_t o) { return o - baseline_; });
  return c;
}

std::vector<double> Selector::distribution() const {
  const std::size_t n = size();
  std::vector<double> q(n, 0.0);
  switch (mode_) {
    case Mode::adaptive:
      for (std::size_t i = 0; i < n; ++i) q[i] = base_[i] + trans_[i];
      break;
    case Mode::uniform_random:
      std::fill(q.begin(), q.end(), 1.0 / static_cast<double>(n));
      break;
    case Mode::fixed_block:
      q[block_[cursor_].index] = 1.0;
      break;
    case Mode::fixed_pool: {
      const double total = static_cast<double>(std::accumulate(pool_.begin(), pool_.end(), std::uint64_t{0}));
      for (std::size_t i = 0; i < n; ++i) q[i] = static_cast<double>(pool_[i]) / total;
      break;
    }
  }
  return q;
}

void Selector::advance(StateId chosen) {
  const std::size_t i = chosen.index;
  if (i >= size()) throw std::invalid_argument("state index out of range");

  switch (mode_) {
    case Mode::adaptive:
      advance_adaptive(i);
      break;
    case Mode::uniform_random:
      ++occurrences_[i];
      break;
    case Mode::fixed_block:
      if (block_[cursor_] != chosen) {
        throw std::invalid_argument("fixed-block mode: state is not next in the block");
      }
      ++occurrences_[i];
      if (++cursor_ == block_.size()) draw_block();
      break;
    case Mode::fixed_pool:
      if (pool_[i] == 0) throw std::invalid_argument("fixed-pool mode: state exhausted");
      ++occurrences_[i];
      --pool_[i];
      if (std::all_of(pool_.begin(), pool_.end(), [](std::uint64_t c) { return c == 0; })) {
        refill_pool();
      }
      break;
  }
  if (mode_ != Mode::adaptive) {
    baseline_ = *std::min_element(occurrences_.begin(), occurrences_.end());
  }
  history_.push_back(chosen);
}

StateId Selector::sample_step(double u) {
  const auto q = distribution();
  double cumulative = 0.0;
  std::size_t chosen = q.size();
  for (std::size_t i = 0; i < q.size(); ++i) {
    cumulative += q[i];
    if (u < cumulative) {
      chosen = i;
      break;
    }
  }
  if (chosen == q.size()) {
    // Rounding left u above the final cumulative sum: take the last state
    // that carries any mass.
    for (std::size_t i = q.size(); i-- > 0;) {
      if (q[i] > 0.0) {
        chosen = i;
        break;
      }
    }
  }
  advance(StateId{chosen});
  return StateId{chosen};
}

void Selector::advance_adaptive(std::size_t chosen) {
  const auto before = counters();
  ++occurrences_[chosen];
  const std::uint64_t min_occ = *std::min_element(occurrences_.begin(), occurrences_.end());
  if (min_occ > baseline_) {
    // Every state has now occurred once more than the old minimum: reset.
    baseline_ = min_occ;
    apply_reset(chosen, before, counters());
  } else {
    apply_transition(chosen, counters());
  }
  check_invariants();
}

// Non-reset update. Counters are taken after the chosen state's increment.
void Selector::apply_transition(std::size_t chosen, const std::vector<std::uint64_t>& c) {
  const std::size_t n = size();
  const std::uint64_t ci = c[chosen];
  std::size_t lower = 0;     // l: states strictly below the chosen counter
  std::size_t not_lower = 0;  // z: other states at or above it
  for (std::size_t r = 0; r < n; ++r) {
    if (r == chosen) continue;
    if (c[r] < ci) {
      ++lower;
    } else {
      ++not_lower;
    }
  }
  if (lower == 0) {
    throw InvariantViolation("no lower-counter state outside a reset", trans_);
  }
  const double l = static_cast<double>(lower);
  const double residue = static_cast<double>(not_lower) / (l + 1.0);
  const double released = lambda_ * base_[chosen];

  base_[chosen] = (1.0 - lambda_) * base_[chosen];
  trans_[chosen] -= residue * released;
  const double share = released * (1.0 + residue) / l;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != chosen && c[j] < ci) trans_[j] += share;
  }
}

// Reset: counters step back one occurrence. Base probabilities of the other
// states are restored, every transmitted share is withdrawn under the old
// counter configuration and then re-transmitted under the new one.
//
// Each choice scales a base probability by (1 - lambda) while raising its
// counter and each restoration undoes one such step, so p_r is always
// p0 * (1 - lambda)^C_r. Working from the counters keeps long runs finite:
// with counter gaps in the hundreds p_r underflows, and a value that has
// underflowed cannot be restored by repeated division.
void Selector::apply_reset(std::size_t chosen, const std::vector<std::uint64_t>& before,
                           const std::vector<std::uint64_t>& after) {
  const std::size_t n = size();
  const auto withdrawn = shares_for(before);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != chosen) base_[j] = initial_base() * std::pow(1.0 - lambda_, static_cast<double>(after[j]));
  }
  const auto redistributed = shares_for(after);
  for (std::size_t j = 0; j < n; ++j) {
    trans_[j] = trans_[j] - withdrawn[j] + redistributed[j];
  }
}

// Transition probabilities implied by a counter configuration. A state
// reaching level c released lambda * p_r * (1 - lambda)^(c - 1 - C_r), which
// is lambda * p0 * (1 - lambda)^(c - 1); that amount is split equally
// across the states whose counter is below c.
std::vector<double> Selector::shares_for(std::span<const std::uint64_t> c) const {
  const std::size_t n = c.size();
  std::vector<double> w(n, 0.0);
  const std::uint64_t top = *std::max_element(c.begin(), c.end());
  double release = lambda_ * initial_base();
  for (std::uint64_t level = 1; level <= top; ++level, release *= 1.0 - lambda_) {
    std::size_t below = 0;
    std::size_t at_or_above = 0;
    for (std::size_t j = 0; j < n; ++j) (c[j] < level ? below : at_or_above) += 1;
    const double share = release * static_cast<double>(at_or_above) / static_cast<double>(below);
    if (share == 0.0) break;
    for (std::size_t j = 0; j < n; ++j) {
      if (c[j] < level) w[j] += share;
    }
  }
  return w;
}

void Selector::check_invariants() {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (trans_[i] < 0.0) {
      if (trans_[i] < -kNegativeDust) {
        std::ostringstream msg;
        msg << "negative transition probability " << trans_[i] << " at state " << i;
        throw InvariantViolation(msg.str(), trans_);
      }
      trans_[i] = 0.0;
    }
    if (base_[i] < 0.0) throw InvariantViolation("negative base probability", base_);
    sum += base_[i] + trans_[i];
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::vector<double> q(size());
    for (std::size_t i = 0; i < size(); ++i) q[i] = base_[i] + trans_[i];
    std::ostringstream msg;
    msg << "selection probabilities sum to " << sum;
    throw InvariantViolation(msg.str(), std::move(q));
  }
}

void Selector::draw_block() {
  const std::size_t n = size();
  block_.resize(n);
  for (std::size_t i = 0; i < n; ++i) block_[i] = StateId{i};
  // Fisher-Yates on raw engine output; independent of <random> distributions.
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::uint64_t bound = i + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = shuffle_rng_();
    while (x >= limit) x = shuffle_rng_();
    std::swap(block_[i], block_[x % bound]);
  }
  cursor_ = 0;
}

void Selector::refill_pool() { pool_.assign(size(), pool_copies_); }

std::vector<double> empirical_probabilities(std::span<const StateId> history, std::size_t states) {
  if (history.empty()) throw std::invalid_argument("empty history");
  std::vector<double> p(states, 0.0);
  for (const auto& s : history) {
    if (s.index >= states) throw std::invalid_argument("state index out of range");
    p[s.index] += 1.0;
  }
  for (auto& v : p) v /= static_cast<double>(history.size());
  return p;
}

double empirical_entropy(std::span<const StateId> history, std::size_t states) {
  double h = 0.0;
  for (double p : empirical_probabilities(history, states)) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double immediate_repeat_rate(std::span<const StateId> history) {
  if (history.size() < 2) return 0.0;
  std::size_t repeats = 0;
  for (std::size_t k = 1; k < history.size(); ++k) {
    if (history[k] == history[k - 1]) ++repeats;
  }
  return static_cast<double>(repeats) / static_cast<double>(history.size() - 1);
}

TrialResult run_trial(const TrialConfig& config) {
  if (config.iterations == 0) throw std::invalid_argument("iterations must be >= 1");
  Selector selector(config.selector);
  Rng rng(config.seed);
  TrialResult result;
  result.history.reserve(config.iterations);
  if (config.keep_distributions) result.per_step_distributions.reserve(config.iterations);
  for (std::size_t k = 0; k < config.iterations; ++k) {
    if (config.keep_distributions) result.per_step_distributions.push_back(selector.distribution());
    result.history.push_back(selector.sample_step(rng.uniform()));
  }
  const auto n = config.selector.states;
  result.empirical_probs = empirical_probabilities(result.history, n);
  result.entropy_bits = empirical_entropy(result.history, n);
  result.immediate_repeat_rate = immediate_repeat_rate(result.history);
  return result;
}

}  // namespace deception::markov
