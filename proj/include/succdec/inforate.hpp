#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "succdec/fsmc.hpp"
#include "succdec/interleaver.hpp"
#include "succdec/pilot.hpp"
#include "succdec/trellis.hpp"

namespace succdec {

struct McConfig {
  std::size_t block_len = 10000;
  std::size_t blocks = 100;
  std::size_t burn_in_cap = 200;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Positions within this distance of either block edge are left out of
/// averages: ceil(log(1e-8) / log tau(P)), capped. Models with a zero
/// transition entry get the cap.
std::size_t burn_in(const StateModel &model, std::size_t cap);

/// Interleaver used for Monte-Carlo blocks: one fixed pattern tiled to the
/// block length, or a fresh random pattern per block.
class PatternSource {
public:
  static PatternSource fixed(InterleaverPattern period);
  static PatternSource random(WeightDistribution weights);

  int levels() const;
  bool is_random() const { return random_; }
  const WeightDistribution &weights() const { return weights_; }
  /// Pattern for block `block` of length `length`; fixed sources may drop a tail.
  InterleaverPattern for_block(std::size_t length, std::uint64_t seed, std::size_t block) const;

private:
  bool random_ = false;
  InterleaverPattern period_;
  WeightDistribution weights_;
};

/// One simulated Monte-Carlo block. Streams are keyed by (seed, block) so
/// equal seeds give equal channels and inputs across configurations.
struct McBlock {
  ChannelRealization channel;
  ObservationTable obs;
  std::size_t lo = 0, hi = 0;  // interior range [lo, hi)
};

McBlock draw_block(const StateModel &model, std::size_t length, std::uint64_t seed, std::size_t block,
                   std::size_t burn);

struct RateEstimate {
  double mean = 0;
  double std_error = 0;
  std::size_t samples = 0;  // bit positions averaged
  std::size_t blocks = 0;
  std::uint64_t seed = 0;
  std::string label;
};

/// Mean and standard error of per-block values.
RateEstimate summarize(std::span<const double> block_values, std::size_t samples, std::uint64_t seed,
                       std::string label);

RateEstimate estimate_level_rate(const StateModel &model, const PatternSource &source, int level,
                                 const McConfig &mc);
RateEstimate estimate_level_capacity(const StateModel &model, const PatternSource &source, int level,
                                     const McConfig &mc);

struct LevelRates {
  int level = 0;
  double weight = 0;
  RateEstimate rate;
  RateEstimate capacity;
  RateEstimate gap;  // C_k - R_k from per-block differences
};

struct OverallRates {
  std::vector<LevelRates> levels;
  RateEstimate rate;
  RateEstimate capacity;
  RateEstimate gap;  // C - R from per-block differences
  bool has_capacity = false;

  double ratio() const { return rate.mean / capacity.mean; }
  void write_csv(std::ostream &os) const;
};

/// Per-level and weight-combined R and C from shared blocks. Each block's
/// overall value is 1 - (total loss) / (interior positions), so standard
/// errors account for correlation between levels.
OverallRates overall_rates(const StateModel &model, const PatternSource &source, const McConfig &mc,
                           bool with_capacity = true);

/// Uniform grid of `points` on [0, 1] plus `refine` extra points spread
/// geometrically inside the first interval.
std::vector<double> default_mu_grid(std::size_t points = 21, std::size_t refine = 0);

/// Pilot-utility samples. Every position is known with probability x using
/// one shared uniform per position, so curves are coupled across x.
PilotUtilityCurve pilot_utility(const StateModel &model, std::span<const double> grid, const McConfig &mc);

/// sum_k w_k mu(sigma_k), sigma_k = sum_{j<k} w_j.
double rate_from_mu(const MuInterpolant &mu, const WeightDistribution &w);

struct MuCapacity {
  std::vector<double> per_level;
  std::vector<bool> limit_taken;  // w_k = 0: value is mu(sigma_k)
  double overall = 0;             // integral of mu over [0, 1]
};

MuCapacity capacity_from_mu(const MuInterpolant &mu, const WeightDistribution &w);

} // namespace succdec
