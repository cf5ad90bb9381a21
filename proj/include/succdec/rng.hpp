#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace succdec {

/// Stream identifiers for the counter-based generator. Every random draw in
/// the toolkit is taken from a stream keyed by (seed, id, indices...), so the
/// output of a Monte-Carlo run does not depend on how blocks are scheduled.
enum class Stream : std::uint64_t {
  inputs = 1,
  channel = 2,
  pattern = 3,
  mask = 4,
  prior = 5,
  search = 6,
};

/// Counter-based 64-bit generator. Output n of a stream is the SplitMix64
/// finalizer applied to key + n * golden-gamma, where the key is a hash of
/// the seed and the stream coordinates. Satisfies UniformRandomBitGenerator.
class StreamRng {
public:
  using result_type = std::uint64_t;

  explicit StreamRng(std::uint64_t seed);
  StreamRng(std::uint64_t seed, Stream id, std::initializer_list<std::uint64_t> coords = {});

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace succdec
