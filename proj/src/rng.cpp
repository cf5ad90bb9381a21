#include "succdec/rng.hpp"

namespace succdec {

std::uint64_t StreamRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

StreamRng::StreamRng(std::uint64_t seed) : key_(mix(seed + kGamma)) {}

StreamRng::StreamRng(std::uint64_t seed, Stream id, std::initializer_list<std::uint64_t> coords)
    : key_(mix(seed + kGamma)) {
  key_ = mix(key_ ^ mix(static_cast<std::uint64_t>(id) * kGamma));
  std::uint64_t salt = 1;
  for (std::uint64_t c : coords) {
    key_ = mix(key_ ^ mix((c + salt) * kGamma));
    ++salt;
  }
}

} // namespace succdec
