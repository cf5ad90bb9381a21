#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "succdec/exitchart.hpp"
#include "succdec/inforate.hpp"
#include "succdec/interleaver.hpp"
#include "succdec/pilot.hpp"

using namespace succdec;

namespace {

// known-state Rayleigh fading with BPSK: average over |A|^2 ~ Exp(1) of the
// Gaussian-LLR information with s^2 = 8 |A|^2 / sigma^2
double rayleigh_info(double var) {
  boost::math::quadrature::exp_sinh<double> es;
  auto f = [&](double g) {
    const double s = std::sqrt(8 * g / var);
    if (s < 1e-12) return 0.0;
    return std::exp(-g) * (1 - oracle::gaussian_mean(s * s / 2, s, [](double l) { return oracle::softplus_log2(-l); }));
  };
  return es.integrate(f, 1e-13);
}

} // namespace

TEST_CASE("decoder input information") {
  CHECK(decoder_input_info(0.01) == doctest::Approx(0.992100859314979).epsilon(1e-11));
  CHECK(decoder_input_info(1.0) == doctest::Approx(0.565711851970083).epsilon(1e-11));
  CHECK(decoder_input_info(4.0) == doctest::Approx(0.25338035644681).epsilon(1e-11));
  CHECK(std::abs(decoder_input_info(1.0) - rayleigh_info(1.0)) < 1e-6);
  CHECK(std::abs(decoder_input_info(0.3) - rayleigh_info(0.3)) < 1e-6);
  CHECK(decoder_input_info(1e-8) > 0.9999);
  CHECK(decoder_input_info(1e6) < 1e-4);
  double prev = 1;
  for (double v = 0.05; v < 100; v *= 1.5) {
    const double i = decoder_input_info(v);
    CHECK(i < prev);
    prev = i;
  }
}

TEST_CASE("estimator curves from the pilot-utility function") {
  const auto mu = mu_from_function([](double x) { return std::sqrt(x); }, 21);
  const WeightDistribution w({0.2, 0.3, 0.5});
  const std::vector<double> grid{0, 0.25, 0.5, 0.75, 1};
  for (int k = 1; k <= 3; ++k) {
    const auto c = estimator_exit_from_mu(mu, w, k, grid);
    const double s = w.partial_sum(k);
    CHECK(c.i_out.front() == mu(s));
    CHECK(c.i_out.back() == mu(s + w[static_cast<std::size_t>(k - 1)]));
    CHECK(c(0.5) == doctest::Approx(mu(s + 0.5 * w[static_cast<std::size_t>(k - 1)])));
  }
}

TEST_CASE("tunnel test on the synthetic family") {
  const auto fam = DecoderFamily::synthetic();
  ExitCurve flat{{0, 0.5, 1}, {0.5, 0.5, 0.5}, {0, 0, 0}, "flat"};
  CHECK(max_supported_rate(flat, fam, 0.0).value() == doctest::Approx(0.44));
  CHECK(max_supported_rate(flat, fam, 0.1).value() == doctest::Approx(0.34));
  ExitCurve closed{{0, 1}, {0.0, 0.9}, {0, 0}, "closed"};
  CHECK_FALSE(max_supported_rate(closed, fam, 0.0).has_value());
  CHECK(fam.inverse(0.3, 1.0) == doctest::Approx(0.35));
  CHECK(std::isinf(fam.inverse(0.3, 1.5)));
}

TEST_CASE("decoder family files") {
  const auto fam = DecoderFamily::synthetic();
  std::stringstream ss;
  fam.write_csv(ss);
  const auto back = DecoderFamily::read_csv(ss);
  CHECK(back.rates() == fam.rates());
  const auto shipped = DecoderFamily::load(std::string(SUCCDEC_SOURCE_DIR) + "/data/synthetic_decoder_family.csv");
  CHECK(shipped.rates().size() == 61);
  for (double x : {0.0, 0.3, 0.77, 1.0}) CHECK(shipped.inverse(0.42, x) == doctest::Approx(fam.inverse(0.42, x)).epsilon(1e-9));
  std::istringstream bad("rate,x\n");
  CHECK_THROWS(DecoderFamily::read_csv(bad));
}

TEST_CASE("Monte-Carlo estimator curve under erasures follows the closed form") {
  const auto m = StateModel::load(std::string(SUCCDEC_SOURCE_DIR) + "/data/small_channel.txt");
  const WeightDistribution w({0.3, 0.7});
  const std::vector<double> grid{0, 0.25, 0.5, 0.75, 1};
  McConfig mc;
  mc.block_len = 5000;
  mc.blocks = 20;
  mc.seed = 2;
  const auto c = estimator_exit_mc(m, PatternSource::random(w), 2, grid, mc, PriorKind::erasure);
  std::vector<double> pts;
  for (double x : grid) pts.push_back(0.3 + 0.7 * x);
  mc.seed = 9;
  const auto mu = pilot_utility(m, pts, mc);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CAPTURE(i);
    CHECK(std::abs(c.i_out[i] - mu.values[i]) <= 3 * std::hypot(c.errors[i], mu.errors[i]));
  }
}

TEST_CASE("EXIT-matched weights beat the baselines") {
  const auto mu = mu_from_function([](double x) { return 0.1 + 0.5 * std::sqrt(x); }, 21);
  const auto fam = DecoderFamily::synthetic();
  const auto d = optimize_weights_exit(mu, fam, 3, 0.0, 30, 1);
  CHECK(d.overall >= d.uniform_baseline - 1e-12);
  CHECK(d.overall >= d.sed_baseline - 1e-12);
  double sum = 0;
  for (double v : d.weights) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  const auto again = optimize_weights_exit(mu, fam, 3, 0.0, 30, 1);
  CHECK(again.weights == d.weights);
}
