#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "succdec/rng.hpp"

namespace succdec {

/// Per-level fractions of a random interleaver. Non-negative, sums to one.
class WeightDistribution {
public:
  WeightDistribution() = default;
  explicit WeightDistribution(std::vector<double> weights);

  static WeightDistribution uniform(int levels);

  int levels() const { return static_cast<int>(w_.size()); }
  double operator[](std::size_t k) const { return w_[k]; }
  const std::vector<double> &values() const { return w_; }
  /// Sum of the weights of levels strictly below `level` (1-based).
  double partial_sum(int level) const;

  void save(std::ostream &os) const;
  static WeightDistribution load(std::istream &is);

private:
  std::vector<double> w_;
};

/// Level assignment pi_t in {1..K} for every time slot (times are 0-based).
class InterleaverPattern {
public:
  InterleaverPattern() = default;
  InterleaverPattern(std::vector<int> assignment, int levels, std::size_t period = 0,
                     std::size_t dropped = 0);

  int levels() const { return levels_; }
  std::size_t length() const { return pi_.size(); }
  const std::vector<int> &assignment() const { return pi_; }
  int operator[](std::size_t t) const { return pi_[t]; }
  /// Length of the repeated subpattern (equals length() for random patterns).
  std::size_t period() const { return period_; }
  /// Symbols dropped from the requested length to fit whole subpatterns.
  std::size_t dropped() const { return dropped_; }

  /// N_k for k = 1..K (index 0 holds level 1).
  std::vector<std::size_t> level_sizes() const;
  /// Times t(i, k), strictly increasing in i.
  const std::vector<std::size_t> &positions(int level) const;
  /// Empirical weights N_k / N.
  WeightDistribution empirical_weights() const;

  /// Repeats the first period() entries to fill `length` (rounded down to a
  /// whole number of periods).
  InterleaverPattern tiled(std::size_t length) const;

  void save(std::ostream &os) const;
  static InterleaverPattern load(std::istream &is);

private:
  std::vector<int> pi_;
  int levels_ = 0;
  std::size_t period_ = 0;
  std::size_t dropped_ = 0;
  std::vector<std::vector<std::size_t>> positions_;
};

/// Repetition of [1, ..., K].
InterleaverPattern rectangular(int levels, std::size_t length);

/// The recursively nested subpattern v_K (v_2 = [2]).
std::vector<int> binary_weighted_core(int levels);

/// Repetition of [1, v_K, ..., v_K] with `reps` copies of v_K.
InterleaverPattern binary_weighted(int levels, int reps, std::size_t length);

/// Subpattern length 1 + reps * (2^(K-1) - 1).
std::size_t binary_weighted_period(int levels, int reps);

/// Default v_K repetition count per level count (9, 5, 3, 2 for K = 2..5, else 1).
int default_binary_reps(int levels);

/// i.i.d. levels with Pr(pi_t = k) = w_k.
InterleaverPattern sample_random(const WeightDistribution &w, std::size_t length, std::uint64_t seed);
InterleaverPattern sample_random(const WeightDistribution &w, std::size_t length, StreamRng &rng);

/// Known symbols seen by the level-`level` decoder under perfect feedback:
/// entry t is x_t when pi_t < level and 0 (erased) otherwise.
std::vector<std::int8_t> training_mask(const InterleaverPattern &pattern, int level,
                                       std::span<const std::int8_t> inputs);

} // namespace succdec
