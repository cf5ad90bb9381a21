#include "succdec/inforate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "succdec/contraction.hpp"
#include "succdec/parallel.hpp"

namespace succdec {

std::size_t burn_in(const StateModel &model, std::size_t cap) {
  if (model.size() <= 1) return 0;
  double tau;
  try {
    tau = birkhoff_tau(model.transition());
  } catch (const std::domain_error &) {
    return cap;
  }
  if (tau <= 0) return 0;
  if (tau >= 1) return cap;
  const double b = std::ceil(std::log(1e-8) / std::log(tau));
  return b >= static_cast<double>(cap) ? cap : static_cast<std::size_t>(b);
}

PatternSource PatternSource::fixed(InterleaverPattern period) {
  PatternSource s;
  s.period_ = std::move(period);
  s.weights_ = s.period_.empirical_weights();
  return s;
}

PatternSource PatternSource::random(WeightDistribution weights) {
  PatternSource s;
  s.random_ = true;
  s.weights_ = std::move(weights);
  return s;
}

int PatternSource::levels() const { return random_ ? weights_.levels() : period_.levels(); }

InterleaverPattern PatternSource::for_block(std::size_t length, std::uint64_t seed, std::size_t block) const {
  if (random_) {
    StreamRng rng(seed, Stream::pattern, {block});
    return sample_random(weights_, length, rng);
  }
  return period_.tiled(length);
}

McBlock draw_block(const StateModel &model, std::size_t length, std::uint64_t seed, std::size_t block,
                   std::size_t burn) {
  McBlock b;
  StreamRng in_rng(seed, Stream::inputs, {block});
  const auto inputs = random_inputs(length, in_rng);
  StreamRng ch_rng(seed, Stream::channel, {block});
  b.channel = simulate(model, inputs, ch_rng);
  b.channel.seed = seed;
  b.obs = observe(model, b.channel.outputs);
  if (2 * burn >= length) throw std::invalid_argument("Monte-Carlo block shorter than twice the burn-in");
  b.lo = burn;
  b.hi = length - burn;
  return b;
}

RateEstimate summarize(std::span<const double> v, std::size_t samples, std::uint64_t seed, std::string label) {
  RateEstimate r;
  r.blocks = v.size();
  r.samples = samples;
  r.seed = seed;
  r.label = std::move(label);
  if (v.empty()) return r;
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return r;
}

namespace {

struct LevelBlock {
  double rate_loss = 0, cap_loss = 0;
  std::size_t count = 0;
};

// Losses of one level in one block, over interior positions.
LevelBlock level_block(const StateModel &model, const McBlock &blk, const InterleaverPattern &pattern, int level,
                       bool rate, bool capacity) {
  LevelBlock out;
  const auto &inputs = blk.channel.inputs;
  const auto training = training_mask(pattern, level, inputs);
  const auto post = forward_backward(model, blk.obs, training);
  const auto &pos = pattern.positions(level);
  if (rate) {
    for (std::size_t t : pos) {
      if (t < blk.lo || t >= blk.hi) continue;
      out.rate_loss += bit_loss(extrinsic_llr(post, blk.obs, t), inputs[t]);
      ++out.count;
    }
  }
  if (capacity) {
    std::vector<std::int8_t> level_inputs;
    level_inputs.reserve(pos.size());
    for (std::size_t t : pos) level_inputs.push_back(inputs[t]);
    const auto llr = causal_llr(model, blk.obs, post, training, pos, level_inputs);
    std::size_t n = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      if (pos[i] < blk.lo || pos[i] >= blk.hi) continue;
      out.cap_loss += bit_loss(llr[i], level_inputs[i]);
      ++n;
    }
    out.count = n;
  }
  return out;
}

RateEstimate level_estimate(const StateModel &model, const PatternSource &source, int level, const McConfig &mc,
                            bool capacity) {
  if (level < 1 || level > source.levels()) throw std::out_of_range("level out of range");
  const std::size_t burn = burn_in(model, mc.burn_in_cap);
  std::vector<double> vals(mc.blocks, 0.0);
  std::vector<std::size_t> counts(mc.blocks, 0);
  parallel_for(mc.blocks, mc.threads, [&](std::size_t b) {
    const auto pattern = source.for_block(mc.block_len, mc.seed, b);
    const McBlock blk = draw_block(model, pattern.length(), mc.seed, b, burn);
    const LevelBlock lb = level_block(model, blk, pattern, level, !capacity, capacity);
    counts[b] = lb.count;
    if (lb.count) vals[b] = 1.0 - (capacity ? lb.cap_loss : lb.rate_loss) / static_cast<double>(lb.count);
  });
  std::vector<double> used;
  std::size_t samples = 0;
  for (std::size_t b = 0; b < mc.blocks; ++b)
    if (counts[b]) {
      used.push_back(vals[b]);
      samples += counts[b];
    }
  if (samples == 0) throw std::runtime_error("level " + std::to_string(level) + " has no interior positions");
  return summarize(used, samples, mc.seed, (capacity ? "C_" : "R_") + std::to_string(level));
}

} // namespace

RateEstimate estimate_level_rate(const StateModel &model, const PatternSource &source, int level,
                                 const McConfig &mc) {
  return level_estimate(model, source, level, mc, false);
}

RateEstimate estimate_level_capacity(const StateModel &model, const PatternSource &source, int level,
                                     const McConfig &mc) {
  return level_estimate(model, source, level, mc, true);
}

OverallRates overall_rates(const StateModel &model, const PatternSource &source, const McConfig &mc,
                           bool with_capacity) {
  const int k_n = source.levels();
  const auto kk = static_cast<std::size_t>(k_n);
  const std::size_t burn = burn_in(model, mc.burn_in_cap);
  std::vector<std::vector<LevelBlock>> per(mc.blocks, std::vector<LevelBlock>(kk));
  parallel_for(mc.blocks, mc.threads, [&](std::size_t b) {
    const auto pattern = source.for_block(mc.block_len, mc.seed, b);
    const McBlock blk = draw_block(model, pattern.length(), mc.seed, b, burn);
    for (int k = 1; k <= k_n; ++k) {
      per[b][static_cast<std::size_t>(k - 1)] = level_block(model, blk, pattern, k, true, with_capacity);
    }
  });
  OverallRates out;
  out.has_capacity = with_capacity;
  std::vector<double> r_tot, c_tot, g_tot;
  std::size_t all = 0;
  std::vector<std::size_t> level_count(kk, 0);
  for (std::size_t b = 0; b < mc.blocks; ++b) {
    double rl = 0, cl = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < kk; ++k) {
      rl += per[b][k].rate_loss;
      cl += per[b][k].cap_loss;
      n += per[b][k].count;
      level_count[k] += per[b][k].count;
    }
    if (!n) continue;
    all += n;
    r_tot.push_back(1.0 - rl / static_cast<double>(n));
    c_tot.push_back(1.0 - cl / static_cast<double>(n));
    g_tot.push_back((rl - cl) / static_cast<double>(n));
  }
  out.rate = summarize(r_tot, all, mc.seed, "R");
  if (with_capacity) {
    out.capacity = summarize(c_tot, all, mc.seed, "C");
    out.gap = summarize(g_tot, all, mc.seed, "C-R");
  }
  for (std::size_t k = 0; k < kk; ++k) {
    LevelRates lr;
    lr.level = static_cast<int>(k + 1);
    lr.weight = all ? static_cast<double>(level_count[k]) / static_cast<double>(all) : 0.0;
    std::vector<double> rv, cv, gv;
    for (std::size_t b = 0; b < mc.blocks; ++b) {
      const auto &x = per[b][k];
      if (!x.count) continue;
      rv.push_back(1.0 - x.rate_loss / static_cast<double>(x.count));
      cv.push_back(1.0 - x.cap_loss / static_cast<double>(x.count));
      gv.push_back((x.rate_loss - x.cap_loss) / static_cast<double>(x.count));
    }
    lr.rate = summarize(rv, level_count[k], mc.seed, "R_" + std::to_string(k + 1));
    if (with_capacity) {
      lr.capacity = summarize(cv, level_count[k], mc.seed, "C_" + std::to_string(k + 1));
      lr.gap = summarize(gv, level_count[k], mc.seed, "C-R_" + std::to_string(k + 1));
    }
    out.levels.push_back(std::move(lr));
  }
  return out;
}

void OverallRates::write_csv(std::ostream &os) const {
  os << "level,weight,R,R_se,C,C_se\n" << std::setprecision(10);
  auto row = [&](const std::string &name, double w, const RateEstimate &r, const RateEstimate &c) {
    os << name << ',' << w << ',' << r.mean << ',' << r.std_error << ',';
    if (has_capacity) os << c.mean << ',' << c.std_error;
    else os << "nan,nan";
    os << '\n';
  };
  for (const auto &l : levels) row(std::to_string(l.level), l.weight, l.rate, l.capacity);
  row("all", 1.0, rate, capacity);
}

std::vector<double> default_mu_grid(std::size_t points, std::size_t refine) {
  if (points < 2) throw std::invalid_argument("default_mu_grid: need at least two points");
  std::vector<double> g;
  const double h = 1.0 / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g.push_back(static_cast<double>(i) * h);
  g.back() = 1.0;
  for (std::size_t j = 1; j <= refine; ++j) g.push_back(h * std::pow(0.5, static_cast<double>(j)));
  std::sort(g.begin(), g.end());
  return g;
}

PilotUtilityCurve pilot_utility(const StateModel &model, std::span<const double> grid, const McConfig &mc) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] < 0 || grid[i] > 1 || (i && !(grid[i] > grid[i - 1])))
      throw std::invalid_argument("pilot_utility: grid must be increasing inside [0, 1]");
  const std::size_t burn = burn_in(model, mc.burn_in_cap);
  const std::size_t g_n = grid.size();
  std::vector<std::vector<double>> vals(mc.blocks, std::vector<double>(g_n));
  parallel_for(mc.blocks, mc.threads, [&](std::size_t b) {
    const McBlock blk = draw_block(model, mc.block_len, mc.seed, b, burn);
    const auto &inputs = blk.channel.inputs;
    StreamRng mask_rng(mc.seed, Stream::mask, {b});
    std::vector<double> u(mc.block_len);
    for (auto &v : u) v = mask_rng.uniform();
    TrainingSequence training(mc.block_len);
    for (std::size_t i = 0; i < g_n; ++i) {
      for (std::size_t t = 0; t < mc.block_len; ++t) training[t] = u[t] < grid[i] ? inputs[t] : 0;
      const auto post = forward_backward(model, blk.obs, training);
      double loss = 0;
      for (std::size_t t = blk.lo; t < blk.hi; ++t) loss += bit_loss(extrinsic_llr(post, blk.obs, t), inputs[t]);
      vals[b][i] = 1.0 - loss / static_cast<double>(blk.hi - blk.lo);
    }
  });
  PilotUtilityCurve c;
  c.grid.assign(grid.begin(), grid.end());
  c.es_n0_db = model.es_n0_db();
  c.seed = mc.seed;
  c.block_len = mc.block_len;
  c.blocks = mc.blocks;
  std::vector<double> col(mc.blocks);
  for (std::size_t i = 0; i < g_n; ++i) {
    for (std::size_t b = 0; b < mc.blocks; ++b) col[b] = vals[b][i];
    const auto r = summarize(col, 0, mc.seed, "");
    c.values.push_back(r.mean);
    c.errors.push_back(r.std_error);
  }
  c.block_values = std::move(vals);
  return c;
}

double rate_from_mu(const MuInterpolant &mu, const WeightDistribution &w) {
  double r = 0, sigma = 0;
  for (int k = 0; k < w.levels(); ++k) {
    r += w[static_cast<std::size_t>(k)] * mu(sigma);
    sigma += w[static_cast<std::size_t>(k)];
  }
  return r;
}

MuCapacity capacity_from_mu(const MuInterpolant &mu, const WeightDistribution &w) {
  MuCapacity out;
  double sigma = 0;
  for (int k = 0; k < w.levels(); ++k) {
    const double wk = w[static_cast<std::size_t>(k)];
    if (wk > 0) {
      out.per_level.push_back(mu.integral(sigma, sigma + wk) / wk);
      out.limit_taken.push_back(false);
    } else {
      out.per_level.push_back(mu(sigma));
      out.limit_taken.push_back(true);
    }
    sigma += wk;
  }
  out.overall = mu.integral(0.0, 1.0);
  return out;
}

} // namespace succdec
