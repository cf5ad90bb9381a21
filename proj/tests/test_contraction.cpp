#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "succdec/contraction.hpp"
#include "succdec/rng.hpp"

using namespace succdec;

namespace {

std::vector<double> random_positive(std::size_t n, StreamRng &r) {
  std::vector<double> v(n);
  for (auto &x : v) x = 0.01 + r.uniform();
  return v;
}

SquareMatrix random_stochastic(std::size_t n, StreamRng &r) {
  SquareMatrix p(n);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += p(i, c) = 0.02 + r.uniform();
    for (std::size_t i = 0; i < n; ++i) p(i, c) /= s;
  }
  return p;
}

} // namespace

TEST_CASE("Birkhoff coefficient closed form") {
  SquareMatrix a(2, std::vector<double>{2, 1, 1, 2});
  CHECK(birkhoff_tau(a) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  SquareMatrix rank1(2, std::vector<double>{0.3, 0.3, 0.7, 0.7});
  CHECK(birkhoff_tau(rank1) == doctest::Approx(0.0).epsilon(1e-12));
  SquareMatrix zero(2, std::vector<double>{1, 0, 0, 1});
  CHECK_THROWS_WITH(birkhoff_tau(zero), doctest::Contains("(0, 1)"));
}

TEST_CASE("Hilbert metric is a projective pseudo-metric") {
  StreamRng r(1, Stream::search, {1});
  for (int i = 0; i < 1000; ++i) {
    const auto u = random_positive(4, r), v = random_positive(4, r), w = random_positive(4, r);
    const double duv = hilbert_metric(u, v);
    CHECK(duv == doctest::Approx(hilbert_metric(v, u)));
    CHECK(hilbert_metric(u, w) <= duv + hilbert_metric(v, w) + 1e-12);
    auto su = u;
    for (auto &x : su) x *= 3.7;
    CHECK(hilbert_metric(u, su) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("contraction by sampling agrees with the closed form") {
  StreamRng r(2, Stream::search, {2});
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const auto p = random_stochastic(n, r);
    const double tau = birkhoff_tau(p);
    double worst = 0;
    for (int i = 0; i < 4000; ++i) {
      // extreme directions approach the supremum, so mix in near-vertex vectors
      auto u = random_positive(n, r), v = random_positive(n, r);
      if (i % 2) {
        u[i % n] += 200 * r.uniform();
        v[(i + 1) % n] += 200 * r.uniform();
      }
      const double d0 = hilbert_metric(u, v);
      if (d0 < 1e-9) continue;
      const double d1 = hilbert_metric(p * std::span<const double>(u), p * std::span<const double>(v));
      CHECK(d1 <= tau * d0 + 1e-12);
      worst = std::max(worst, d1 / d0);
    }
    CHECK(worst > 0.5 * tau);
  }
}

TEST_CASE("theorem bound decreases with K") {
  StreamRng r(3, Stream::search, {3});
  const auto p = random_stochastic(4, r);
  double prev = INFINITY;
  for (int k = 2; k <= 12; ++k) {
    const double b = theorem1_bound(p, k);
    CHECK(b <= prev);
    prev = b;
  }
  const double a = max_column_metric(p) / std::numbers::ln2;
  const double tau = birkhoff_tau(p);
  CHECK(theorem1_bound(p, 2) == doctest::Approx(a));
  CHECK(lemma2_gap_bound(p, 0.25) == doctest::Approx(a * 0.25 / (1 - tau * 0.75)));
  CHECK(lemma2_gap_bound(p, 1.0) == doctest::Approx(a));
}

TEST_CASE("report CSV") {
  SquareMatrix a(2, std::vector<double>{0.8, 0.2, 0.2, 0.8});
  auto rep = contraction_report(a);
  rep.rows.push_back({2, rep.bound(2), 0.01, 0.001});
  std::ostringstream os;
  rep.write_csv(os);
  CHECK(os.str().rfind("K,bound,measured_gap,gap_stderr\n2,", 0) == 0);
}
