#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "succdec/fsmc.hpp"
#include "succdec/rng.hpp"

using namespace succdec;

namespace {

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Pr(Z' in [c, d) | Z in [a, b)) for a bivariate normal with variance v and
// correlation rho, by composite Simpson over z.
double cell_transition(double a, double b, double c, double d, double v, double rho) {
  const double sd = std::sqrt(v);
  const double s = std::sqrt(v * (1 - rho * rho));
  const int n = 20000;
  const double h = (b - a) / n;
  auto f = [&](double z) {
    const double dens = std::exp(-z * z / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
    return dens * (phi_cdf((d - rho * z) / s) - phi_cdf((c - rho * z) / s));
  };
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4 : 2);
  const double joint = acc * h / 3;
  return joint / (phi_cdf(b / sd) - phi_cdf(a / sd));
}

std::size_t nearest(const std::vector<double> &pts, double x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (std::abs(pts[i] - x) < std::abs(pts[best] - x)) best = i;
  return best;
}

} // namespace

TEST_CASE("two-level Lloyd-Max on a Gaussian") {
  const auto q = lloyd_max(2, 1.0);
  REQUIRE(q.levels() == 2);
  CHECK(q.points[1] == doctest::Approx(std::sqrt(2 / std::numbers::pi)).epsilon(1e-10));
  CHECK(q.points[0] == doctest::Approx(-std::sqrt(2 / std::numbers::pi)).epsilon(1e-10));
  CHECK(std::abs(q.boundaries[0]) < 1e-12);
  const auto h = lloyd_max(2, 0.5);
  CHECK(h.points[1] == doctest::Approx(std::sqrt(1 / std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("six-level quantizer for variance 1/2") {
  const auto q = lloyd_max(6, 0.5);
  const double pts[] = {-1.339, -0.707, -0.225, 0.225, 0.707, 1.339};
  const double bnd[] = {-1.023, -0.466, 0.0, 0.466, 1.023};
  for (int i = 0; i < 6; ++i) CHECK(std::abs(q.points[i] - pts[i]) < 1e-3);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(q.boundaries[i] - bnd[i]) < 1e-3);
  for (std::size_t i = 1; i < q.distortion_history.size(); ++i)
    CHECK(q.distortion_history[i] <= q.distortion_history[i - 1] + 1e-15);
  CHECK(quantizer_distortion(q.points, q.boundaries, 0.5) == doctest::Approx(q.distortion_history.back()));
}

TEST_CASE("quantized Gauss-Markov transitions against direct integration") {
  const double alpha = 0.95;
  const auto quant = lloyd_max(6, 0.5);
  const auto m = build_fsmc(alpha, quant, 3.0);
  REQUIRE(m.size() == 36);
  const auto res = m.residuals();
  CHECK(res.max_column_sum_error < 1e-12);
  CHECK(res.max_stationary_error < 1e-12);
  CHECK(res.strictly_positive());
  CHECK(m.noise_n0() == doctest::Approx(std::pow(10.0, -0.3)));

  std::vector<double> edges{-6};
  edges.insert(edges.end(), quant.boundaries.begin(), quant.boundaries.end());
  edges.push_back(6);
  double p1[6][6];  // p1[to][from]
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) p1[j][i] = cell_transition(edges[i], edges[i + 1], edges[j], edges[j + 1], 0.5, alpha);

  std::vector<int> re(36), im(36);
  for (std::size_t s = 0; s < 36; ++s) {
    re[s] = static_cast<int>(nearest(quant.points, m.states()[s].real()));
    im[s] = static_cast<int>(nearest(quant.points, m.states()[s].imag()));
    CHECK(m.states()[s].real() == doctest::Approx(quant.points[re[s]]));
    CHECK(m.states()[s].imag() == doctest::Approx(quant.points[im[s]]));
  }
  double worst = 0;
  for (std::size_t to = 0; to < 36; ++to)
    for (std::size_t from = 0; from < 36; ++from)
      worst = std::max(worst, std::abs(m.transition()(to, from) - p1[re[to]][re[from]] * p1[im[to]][im[from]]));
  CHECK(worst < 1e-8);

  for (std::size_t s = 0; s < 36; ++s) {
    const double sd = std::sqrt(0.5);
    const double pr = phi_cdf(edges[re[s] + 1] / sd) - phi_cdf(edges[re[s]] / sd);
    const double pi = phi_cdf(edges[im[s] + 1] / sd) - phi_cdf(edges[im[s]] / sd);
    CHECK(m.stationary()[s] == doctest::Approx(pr * pi).epsilon(1e-9));
  }
}

TEST_CASE("noiseless single state passes the input through") {
  const auto m = StateModel::single_state({0.6, -0.8}, 0.0);
  StreamRng rng(3, Stream::inputs, {0});
  const auto x = random_inputs(50, rng);
  const auto r = simulate(m, x, 11);
  for (std::size_t t = 0; t < x.size(); ++t) {
    CHECK(r.outputs[t].real() == 0.6 * x[t]);
    CHECK(r.outputs[t].imag() == -0.8 * x[t]);
  }
}

TEST_CASE("state and transition frequencies of a long draw") {
  const auto m = example_channel();
  const std::size_t n = 1000000;
  const std::vector<std::int8_t> x(n, 1);
  const auto r = simulate(m, x, 5);
  const std::size_t q = m.size();
  std::vector<double> visits(q, 0);
  std::vector<double> pairs(q * q, 0);
  for (std::size_t t = 0; t < n; ++t) {
    visits[static_cast<std::size_t>(r.states[t])] += 1;
    if (t) pairs[static_cast<std::size_t>(r.states[t]) * q + static_cast<std::size_t>(r.states[t - 1])] += 1;
  }
  // the chain is strongly correlated, so use a wide 4-sd band inflated by
  // the integrated autocorrelation of an indicator (about (1 + a) / (1 - a))
  const double inflate = std::sqrt((1 + 0.95) / (1 - 0.95));
  int bad_state = 0;
  for (std::size_t s = 0; s < q; ++s) {
    const double p = m.stationary()[s];
    const double sd = std::sqrt(p * (1 - p) / n) * inflate;
    bad_state += std::abs(visits[s] / n - p) > 4 * sd;
  }
  CHECK(bad_state == 0);

  // entries with at least 100 expected visits get a 4-sd binomial band; the
  // rest are pooled into one Poisson count
  int bad_pair = 0, tested = 0;
  double rare_seen = 0, rare_expected = 0;
  for (std::size_t from = 0; from < q; ++from) {
    double out = 0;
    for (std::size_t to = 0; to < q; ++to) out += pairs[to * q + from];
    for (std::size_t to = 0; to < q; ++to) {
      const double p = m.transition()(to, from);
      if (out * p < 100) {
        rare_seen += pairs[to * q + from];
        rare_expected += out * p;
        continue;
      }
      const double sd = std::sqrt(p * (1 - p) / out);
      ++tested;
      const bool bad = std::abs(pairs[to * q + from] / out - p) > 4 * sd;
      if (bad) MESSAGE(from << " -> " << to << " p=" << p << " freq=" << pairs[to * q + from] / out << " n=" << out);
      bad_pair += bad;
    }
  }
  CHECK(tested > 100);
  CHECK(bad_pair == 0);
  CHECK(std::abs(rare_seen - rare_expected) < 4 * std::sqrt(rare_expected) + 1);
}

TEST_CASE("simulate is deterministic in the seed") {
  const auto m = example_channel();
  StreamRng rng(1, Stream::inputs, {0});
  const auto x = random_inputs(1000, rng);
  const auto a = simulate(m, x, 9);
  const auto b = simulate(m, x, 9);
  const auto c = simulate(m, x, 10);
  CHECK(a.states == b.states);
  CHECK(a.outputs == b.outputs);
  CHECK(a.outputs != c.outputs);
}

TEST_CASE("model file round trip is lossless") {
  const auto m = example_channel();
  std::stringstream ss;
  m.save(ss);
  const auto back = StateModel::load(ss);
  REQUIRE(back.size() == m.size());
  CHECK(back.transition().data() == m.transition().data());
  CHECK(back.stationary() == m.stationary());
  CHECK(back.states() == m.states());
  CHECK(back.noise_n0() == m.noise_n0());
  CHECK(back.alpha() == m.alpha());
}

TEST_CASE("invalid models are rejected") {
  SquareMatrix p(2, std::vector<double>{0.5, 0.5, 0.6, 0.6});  // columns do not sum to one
  CHECK_THROWS(StateModel::from_transition({{1, 0}, {-1, 0}}, p, 1.0));
  CHECK_THROWS(lloyd_max(0, 1.0));
}
