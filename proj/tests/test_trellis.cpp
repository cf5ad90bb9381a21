#include <doctest.h>

#include <cmath>

#include "bruteforce.hpp"
#include "succdec/inforate.hpp"
#include "succdec/interleaver.hpp"
#include "succdec/trellis.hpp"

using namespace succdec;

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::vector<std::size_t> all_times(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t t = 0; t < n; ++t) v[t] = t;
  return v;
}

} // namespace

TEST_CASE("BCJR matches path enumeration") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const bool priors = seed % 2 == 0;
    const auto in = bruteforce::random_instance(seed, priors);
    const auto ref = bruteforce::solve(in);
    const auto obs = observe(in.model, in.y);
    const auto post = forward_backward(in.model, obs, in.training, in.priors);
    const std::size_t n = in.y.size(), q = in.model.size();
    CAPTURE(seed);
    for (std::size_t t = 0; t < n; ++t) {
      double z = 0;
      for (std::size_t s = 0; s < q; ++s) z += post.alpha(t)[s] * post.beta(t)[s];
      for (std::size_t s = 0; s < q; ++s) CHECK(close(post.alpha(t)[s] * post.beta(t)[s] / z, ref.state_post[t * q + s], 1e-10));
    }
    // the oracle includes Pr(x = u) = 1/2 for each training symbol; the
    // library conditions on them
    double known = 0;
    for (auto u : in.training) known += u != 0;
    CHECK(close(post.log_evidence, ref.log_evidence + known * std::log(2.0), 1e-10));
    const auto llr = bit_llr(post, obs, in.priors, all_times(n));
    for (std::size_t t = 0; t < n; ++t) {
      CHECK(close(extrinsic_llr(post, obs, t), ref.extrinsic[t], 1e-10));
      if (std::isfinite(ref.llr[t])) CHECK(close(llr[t], ref.llr[t], 1e-10));
    }
    if (!priors) {
      std::vector<std::int8_t> lx;
      for (auto t : in.level_positions) lx.push_back(in.inputs[t]);
      const auto c = causal_llr(in.model, obs, in.training, in.level_positions, lx);
      REQUIRE(c.size() == ref.causal.size());
      for (std::size_t j = 0; j < c.size(); ++j) CHECK(close(c[j], ref.causal[j], 1e-10));
    }
  }
}

TEST_CASE("first causal ratio equals the plain ratio") {
  const auto in = bruteforce::random_instance(5, false);
  if (in.level_positions.empty()) return;
  const auto obs = observe(in.model, in.y);
  const auto post = forward_backward(in.model, obs, in.training);
  std::vector<std::int8_t> lx;
  for (auto t : in.level_positions) lx.push_back(in.inputs[t]);
  const auto c = causal_llr(in.model, obs, in.training, in.level_positions, lx);
  const auto b = bit_llr(post, obs, {}, in.level_positions);
  CHECK(c[0] == doctest::Approx(b[0]).epsilon(1e-12));
}

TEST_CASE("estimator pass with no extrinsic input is the plain estimator") {
  const auto m = example_channel();
  StreamRng rng(2, Stream::inputs, {0});
  const auto x = random_inputs(400, rng);
  const auto ch = simulate(m, x, 3);
  const auto pat = rectangular(2, 400);
  const auto tr = training_mask(pat, 2, x);
  const auto obs = observe(m, ch.outputs);
  const auto &pos = pat.positions(2);
  const auto post = forward_backward(m, obs, tr);
  const auto plain = bit_llr(post, obs, {}, pos);
  const std::vector<double> zeros(pos.size(), 0.0);
  const auto out = ied_step(m, obs, tr, pos, zeros);
  for (std::size_t i = 0; i < pos.size(); ++i) CHECK(out[i] == doctest::Approx(plain[i]).epsilon(1e-12));

  // infinite extrinsic input on a subset acts as training
  std::vector<double> ext(pos.size(), 0.0);
  auto tr2 = tr;
  for (std::size_t i = 0; i < pos.size(); i += 3) {
    ext[i] = x[pos[i]] > 0 ? INFINITY : -INFINITY;
    tr2[pos[i]] = x[pos[i]];
  }
  const auto with_ext = ied_step(m, obs, tr, pos, ext);
  const auto post2 = forward_backward(m, obs, tr2);
  const auto ref = bit_llr(post2, obs, {}, pos);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i % 3 == 0) continue;
    CHECK(std::abs(with_ext[i] - ref[i]) < 1e-9 * std::max(1.0, std::abs(ref[i])));
  }
}

TEST_CASE("bit loss is stable") {
  CHECK(bit_loss(0, 1) == doctest::Approx(1.0));
  CHECK(bit_loss(800, 1) == 0.0);
  CHECK(bit_loss(-800, 1) == doctest::Approx(800 / std::log(2.0)));
  CHECK(bit_loss(2, -1) == doctest::Approx(std::log2(1 + std::exp(2.0))));
}

TEST_CASE("starved trellis reports the time index") {
  SquareMatrix p(2, std::vector<double>{1, 0, 0, 1});
  const auto m = StateModel(std::vector<cplx>{{1, 0}, {-1, 0}}, p, {0.5, 0.5}, 1e-6);
  // the state can never change, but the outputs require it to
  std::vector<cplx> y{{1, 0}, {1, 0}, {-1, 0}, {1, 0}};
  std::vector<std::int8_t> tr{1, 1, 1, 1};
  CHECK_THROWS_WITH_AS(forward_backward(m, y, tr), doctest::Contains("t = "), std::runtime_error);
}

TEST_CASE("adding training never lowers the information estimate") {
  const auto m = example_channel();
  McConfig mc;
  mc.block_len = 3000;
  mc.blocks = 20;
  mc.burn_in_cap = 200;
  mc.seed = 4;
  const auto src = PatternSource::fixed(rectangular(4, 4));
  // level 3 sees levels 1 and 2 as training, level 2 only level 1
  const auto r2 = estimate_level_rate(m, src, 2, mc);
  const auto r3 = estimate_level_rate(m, src, 3, mc);
  CHECK(r3.mean + 2 * std::hypot(r2.std_error, r3.std_error) >= r2.mean);
}
