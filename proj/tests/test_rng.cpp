#include <doctest.h>

#include <cmath>
#include <set>

#include "succdec/rng.hpp"

using namespace succdec;

TEST_CASE("streams are reproducible and keyed") {
  StreamRng a(7, Stream::channel, {3});
  StreamRng b(7, Stream::channel, {3});
  for (int i = 0; i < 100; ++i) CHECK(a() == b());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t blk = 0; blk < 50; ++blk) firsts.insert(StreamRng(7, Stream::channel, {blk})());
  firsts.insert(StreamRng(7, Stream::inputs, {0})());
  firsts.insert(StreamRng(8, Stream::channel, {0})());
  CHECK(firsts.size() == 52);
}

TEST_CASE("uniform draws look uniform") {
  StreamRng r(1, Stream::inputs, {0});
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0);
    REQUIRE(u < 1);
    sum += u;
    sq += u * u;
  }
  // mean 1/2 with sd sqrt(1/12 / n)
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sq / n - 1.0 / 3) < 0.005);
}
