#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "succdec/interleaver.hpp"

using namespace succdec;

TEST_CASE("rectangular pattern") {
  const auto p = rectangular(3, 6);
  CHECK(p.assignment() == std::vector<int>{1, 2, 3, 1, 2, 3});
  CHECK(p.level_sizes() == std::vector<std::size_t>{2, 2, 2});
  CHECK(p.positions(2) == std::vector<std::size_t>{1, 4});
}

TEST_CASE("binary-weighted subpatterns") {
  CHECK(binary_weighted_core(2) == std::vector<int>{2});
  for (int k = 2; k <= 7; ++k) {
    const auto v = binary_weighted_core(k);
    CHECK(v.size() == (std::size_t{1} << (k - 1)) - 1);
    // level j appears 2^(j-2) times in v_K
    for (int j = 2; j <= k; ++j)
      CHECK(std::count(v.begin(), v.end(), j) == (1 << (j - 2)));
  }
  for (int reps = 1; reps <= 4; ++reps) {
    const std::size_t per = binary_weighted_period(4, reps);
    CHECK(per == 1 + static_cast<std::size_t>(reps) * 7);
    const auto p = binary_weighted(4, reps, per * 3 + 2);
    CHECK(p.length() == per * 3);
    CHECK(p.dropped() == 2);
    CHECK(p[0] == 1);
    const auto w = p.empirical_weights();
    CHECK(w[1] / w[0] == doctest::Approx(reps));
    CHECK(w[3] / w[2] == doctest::Approx(2.0));
  }
  CHECK(default_binary_reps(2) == 9);
  CHECK(default_binary_reps(3) == 5);
  CHECK(default_binary_reps(4) == 3);
  CHECK(default_binary_reps(5) == 2);
  CHECK(default_binary_reps(7) == 1);
}

TEST_CASE("training masks") {
  const auto p = rectangular(2, 4);
  const std::vector<std::int8_t> x{1, -1, -1, 1};
  CHECK(training_mask(p, 2, x) == std::vector<std::int8_t>{1, 0, -1, 0});
  CHECK(training_mask(p, 1, x) == std::vector<std::int8_t>{0, 0, 0, 0});

  const auto r = sample_random(WeightDistribution({0.2, 0.3, 0.5}), 1000, 4);
  std::vector<std::int8_t> ones(1000, 1);
  const auto sizes = r.level_sizes();
  for (int k = 1; k <= 3; ++k) {
    const auto m = training_mask(r, k, ones);
    std::size_t erased = static_cast<std::size_t>(std::count(m.begin(), m.end(), 0));
    std::size_t below = 0;
    for (int j = 1; j < k; ++j) below += sizes[static_cast<std::size_t>(j - 1)];
    CHECK(erased == 1000 - below);
  }
}

TEST_CASE("random patterns follow their weights") {
  const WeightDistribution w({0.1, 0.25, 0.65});
  const std::size_t n = 200000;
  const auto p = sample_random(w, n, 8);
  const auto e = p.empirical_weights();
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(e[k] - w[k]) < 4 * std::sqrt(w[k] * (1 - w[k]) / n));
  CHECK(sample_random(w, 100, 8).assignment() == sample_random(w, 100, 8).assignment());
  CHECK(w.partial_sum(1) == 0.0);
  CHECK(w.partial_sum(3) == doctest::Approx(0.35));
}

TEST_CASE("weights are validated") {
  CHECK_THROWS(WeightDistribution({0.5, 0.4}));
  CHECK_THROWS(WeightDistribution({1.5, -0.5}));
  CHECK_NOTHROW(WeightDistribution({0.5, 0.5}));
}

TEST_CASE("pattern file round trip") {
  const auto p = binary_weighted(3, 2, 50);
  std::stringstream ss;
  p.save(ss);
  const auto q = InterleaverPattern::load(ss);
  CHECK(q.assignment() == p.assignment());
  CHECK(q.levels() == 3);
}
