#include <doctest.h>

#include <cmath>
#include <sstream>

#include "succdec/contraction.hpp"
#include "succdec/inforate.hpp"
#include "succdec/interleaver.hpp"
#include "succdec/optimizer.hpp"
#include "succdec/pilot.hpp"

using namespace succdec;

namespace {

// objective sum_k w_k mu(sigma_k) straight from the definition
double objective(const MuInterpolant &mu, const std::vector<double> &w) {
  double s = 0, r = 0;
  for (double wk : w) {
    r += wk * mu(s);
    s += wk;
  }
  return r;
}

double grid_search(const MuInterpolant &mu, int k, double step) {
  const int n = static_cast<int>(std::lround(1 / step));
  double best = -1;
  if (k == 1) return objective(mu, {1.0});
  if (k == 2) {
    for (int i = 0; i <= n; ++i) best = std::max(best, objective(mu, {i * step, 1 - i * step}));
    return best;
  }
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) best = std::max(best, objective(mu, {i * step, j * step, 1 - (i + j) * step}));
  return best;
}

} // namespace

TEST_CASE("linear utility gives equal weights") {
  const auto mu = mu_from_function([](double x) { return x; }, 11);
  for (int k = 1; k <= 8; ++k) {
    CAPTURE(k);
    const auto cand = kkt_weights(mu, k, (k - 1.0) / k);
    for (double w : cand.weights) CHECK(std::abs(w - 1.0 / k) < 1e-10);
    const auto sol = solve_weights(mu, k);
    for (double w : sol.weights) CHECK(std::abs(w - 1.0 / k) < 1e-9);
    CHECK(std::abs(sol.objective - (k - 1.0) / (2.0 * k)) < 1e-9);
    CHECK(sol.max_residual <= 1e-8);
  }
  const auto one = kkt_weights(mu, 1, 0.0);
  CHECK(one.weights == std::vector<double>{1.0});
}

TEST_CASE("small K agrees with a simplex grid search") {
  const auto sq = mu_from_function([](double x) { return std::sqrt(x); }, 41);
  const auto sat = mu_from_function([](double x) { return 0.6 * (1 - std::exp(-8 * x)) + 0.05 * x; }, 41);
  for (const auto *mu : {&sq, &sat})
    for (int k = 1; k <= 3; ++k) {
      const auto sol = solve_weights(*mu, k);
      CHECK(std::abs(sol.objective - grid_search(*mu, k, 0.005)) <= 1e-3);
      CHECK(sol.objective >= grid_search(*mu, k, 0.005) - 1e-9);
      CHECK(sol.max_residual <= 1e-8);
    }
}

TEST_CASE("concave utility: positive, ordered weights and rising rate") {
  const auto mu = mu_from_function([](double x) { return std::sqrt(x); }, 21);
  double prev = -1;
  for (int k = 1; k <= 10; ++k) {
    CAPTURE(k);
    const auto sol = solve_weights(mu, k);
    REQUIRE_FALSE(sol.no_root);
    double sum = 0;
    for (std::size_t i = 0; i < sol.weights.size(); ++i) {
      sum += sol.weights[i];
      CHECK(sol.weights[i] > 0);
      if (i) CHECK(sol.weights[i] >= sol.weights[i - 1] - 1e-12);
    }
    CHECK(std::abs(sum - 1) < 1e-10);
    CHECK(sol.objective > prev + 1e-9);
    prev = sol.objective;
  }
}

TEST_CASE("solution CSV") {
  const auto mu = mu_from_function([](double x) { return x; }, 11);
  std::ostringstream os;
  solve_weights(mu, 2).write_csv(os);
  CHECK(os.str().rfind("# lambda=", 0) == 0);
  CHECK(os.str().find("\nk,w,sigma,residual\n1,") != std::string::npos);
}

TEST_CASE("equal-weight gap stays under the random-interleaver bound") {
  const auto m = StateModel::load(std::string(SUCCDEC_SOURCE_DIR) + "/data/small_channel.txt");
  McConfig mc;
  mc.block_len = 5000;
  mc.blocks = 10;
  mc.seed = 3;
  const auto mu = fit_mu(pilot_utility(m, default_mu_grid(11, 0), mc));
  for (int k : {2, 4, 8, 16}) {
    const auto w = WeightDistribution::uniform(k);
    const double gap = capacity_from_mu(mu, w).overall - rate_from_mu(mu, w);
    CHECK(gap >= 0);
    CHECK(gap <= lemma2_gap_bound(m.transition(), 1.0 / k));
  }
}
