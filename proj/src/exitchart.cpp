#include "succdec/exitchart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "succdec/parallel.hpp"
#include "succdec/special.hpp"

namespace succdec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Tunnel openings smaller than this are treated as closed (rounding noise).
constexpr double kTunnelTol = 1e-12;

double lerp_at(const std::vector<double> &xs, const std::vector<double> &ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

} // namespace

double ExitCurve::operator()(double x) const {
  if (i_in.empty()) throw std::logic_error("ExitCurve: empty");
  return lerp_at(i_in, i_out, x);
}

void ExitCurve::write_csv(std::ostream &os) const {
  os << "i_in,i_out,stderr\n" << std::setprecision(12);
  for (std::size_t i = 0; i < i_in.size(); ++i)
    os << i_in[i] << ',' << i_out[i] << ',' << (errors.empty() ? 0.0 : errors[i]) << '\n';
}

void DecoderFamily::add(double rate, std::vector<double> i_in, std::vector<double> i_out) {
  if (!(rate > 0 && rate < 1)) throw std::invalid_argument("DecoderFamily: rate must lie in (0, 1)");
  if (i_in.size() != i_out.size() || i_in.size() < 2)
    throw std::invalid_argument("DecoderFamily: each curve needs at least two samples");
  std::vector<std::size_t> idx(i_in.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return i_out[a] < i_out[b]; });
  Curve c;
  for (std::size_t i : idx) {
    if (!c.out.empty() && i_out[i] <= c.out.back()) {
      // Equal outputs: keep the smallest input that reaches them.
      c.in.back() = std::min(c.in.back(), i_in[i]);
      continue;
    }
    c.out.push_back(i_out[i]);
    c.in.push_back(i_in[i]);
  }
  curves_[rate] = std::move(c);
}

std::vector<double> DecoderFamily::rates() const {
  std::vector<double> r;
  for (const auto &[k, v] : curves_) r.push_back(k);
  return r;
}

double DecoderFamily::inverse(double rate, double x) const {
  const auto it = curves_.find(rate);
  if (it == curves_.end()) throw std::out_of_range("DecoderFamily: unknown rate");
  const Curve &c = it->second;
  if (x > c.out.back() + 1e-15) return kInf;
  return lerp_at(c.out, c.in, x);
}

DecoderFamily DecoderFamily::read_csv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("rate,i_in,i_out", 0) != 0)
    throw std::runtime_error("decoder family CSV: expected header rate,i_in,i_out");
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double r, a, b;
    if (!(row >> r >> a >> b)) throw std::runtime_error("decoder family CSV: bad row '" + line + "'");
    rows[r].first.push_back(a);
    rows[r].second.push_back(b);
  }
  DecoderFamily f;
  for (auto &[r, v] : rows) f.add(r, std::move(v.first), std::move(v.second));
  if (f.empty()) throw std::runtime_error("decoder family CSV: no curves");
  return f;
}

DecoderFamily DecoderFamily::load(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open decoder family file " + path);
  return read_csv(is);
}

void DecoderFamily::write_csv(std::ostream &os) const {
  os << "rate,i_in,i_out\n" << std::setprecision(12);
  for (const auto &[r, c] : curves_)
    for (std::size_t i = 0; i < c.out.size(); ++i) os << r << ',' << c.in[i] << ',' << c.out[i] << '\n';
}

DecoderFamily DecoderFamily::synthetic(std::size_t samples) {
  DecoderFamily f;
  const auto xs = uniform_grid(samples);
  for (int i = 10; i <= 70; ++i) {
    const double r = i / 100.0;
    std::vector<double> in, out;
    for (double x : xs) {
      out.push_back(x);
      in.push_back(std::min(1.0, (r + 0.05) * (1 - std::pow(1 - x, 4))));
    }
    f.add(r, std::move(in), std::move(out));
  }
  return f;
}

ExitCurve estimator_exit_from_mu(const MuInterpolant &mu, const WeightDistribution &w, int level,
                                 std::span<const double> grid) {
  if (level < 1 || level > w.levels()) throw std::out_of_range("estimator_exit_from_mu: level out of range");
  const double wk = w[static_cast<std::size_t>(level - 1)];
  const double sk = w.partial_sum(level);
  ExitCurve c;
  c.label = "level " + std::to_string(level);
  for (double x : grid) {
    c.i_in.push_back(x);
    c.i_out.push_back(mu(x * wk + sk));
    c.errors.push_back(0.0);
  }
  return c;
}

ExitCurve estimator_exit_mc(const StateModel &model, const PatternSource &source, int level,
                            std::span<const double> grid, const McConfig &mc, PriorKind kind) {
  if (level < 1 || level > source.levels()) throw std::out_of_range("estimator_exit_mc: level out of range");
  const std::size_t burn = burn_in(model, mc.burn_in_cap);
  const std::size_t g_n = grid.size();
  std::vector<double> spread(g_n);
  for (std::size_t i = 0; i < g_n; ++i) {
    if (grid[i] < 0 || grid[i] > 1) throw std::invalid_argument("estimator_exit_mc: grid outside [0, 1]");
    spread[i] = kind == PriorKind::gaussian ? j_inverse(grid[i]) : 0.0;
  }
  std::vector<std::vector<double>> vals(mc.blocks, std::vector<double>(g_n, 0.0));
  std::vector<std::size_t> counts(mc.blocks, 0);
  parallel_for(mc.blocks, mc.threads, [&](std::size_t b) {
    const auto pattern = source.for_block(mc.block_len, mc.seed, b);
    const McBlock blk = draw_block(model, pattern.length(), mc.seed, b, burn);
    const auto &inputs = blk.channel.inputs;
    const auto training = training_mask(pattern, level, inputs);
    const auto &pos = pattern.positions(level);
    StreamRng prior_rng(mc.seed, Stream::prior, {b, static_cast<std::uint64_t>(level)});
    std::vector<double> u(pos.size());
    std::normal_distribution<double> gauss;
    for (auto &v : u) v = kind == PriorKind::gaussian ? gauss(prior_rng) : prior_rng.uniform();
    std::vector<double> ext_in(pos.size());
    for (std::size_t g = 0; g < g_n; ++g) {
      for (std::size_t i = 0; i < pos.size(); ++i) {
        const double x = inputs[pos[i]];
        if (kind == PriorKind::gaussian) {
          const double s = spread[g];
          ext_in[i] = s == kInf ? x * kInf : x * (s * s / 2) + s * u[i];
        } else {
          ext_in[i] = u[i] < grid[g] ? x * kInf : 0.0;
        }
      }
      const auto out = ied_step(model, blk.obs, training, pos, ext_in);
      double loss = 0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < pos.size(); ++i) {
        if (pos[i] < blk.lo || pos[i] >= blk.hi) continue;
        loss += bit_loss(out[i], inputs[pos[i]]);
        ++n;
      }
      counts[b] = n;
      if (n) vals[b][g] = 1.0 - loss / static_cast<double>(n);
    }
  });
  ExitCurve c;
  c.label = "level " + std::to_string(level) + (kind == PriorKind::gaussian ? " gaussian" : " erasure");
  std::vector<double> col;
  for (std::size_t g = 0; g < g_n; ++g) {
    col.clear();
    for (std::size_t b = 0; b < mc.blocks; ++b)
      if (counts[b]) col.push_back(vals[b][g]);
    if (col.empty()) throw std::runtime_error("estimator_exit_mc: level has no interior positions");
    const auto r = summarize(col, 0, mc.seed, "");
    c.i_in.push_back(grid[g]);
    c.i_out.push_back(r.mean);
    c.errors.push_back(r.std_error);
  }
  return c;
}

double decoder_input_info(double sigma_w_sq) {
  if (!(sigma_w_sq > 0)) throw std::domain_error("decoder_input_info: variance must be positive");
  if (sigma_w_sq < 1e-12) return 1.0;
  const double root = std::sqrt(1 + sigma_w_sq);
  const double l1 = 0.5 * (root - 1);
  const double l2 = 0.5 * (root + 1);
  const double ln2 = std::numbers::ln2;
  const double t1 = l2 * hyp2f1(l1 + 1, 1, l1 + 2, -1) / ((l1 + l2) * (l1 + 1) * ln2);
  const double t2 = l1 * hyp2f1(l2, 1, l2 + 1, -1) / (l2 * (l1 + l2) * ln2);
  return std::clamp(t1 - t2, 0.0, 1.0);
}

std::optional<double> max_supported_rate(const ExitCurve &estimator, const DecoderFamily &family, double d_t) {
  if (family.empty()) throw std::invalid_argument("max_supported_rate: empty decoder family");
  const auto rates = family.rates();
  for (auto it = rates.rbegin(); it != rates.rend(); ++it) {
    bool open = true;
    for (std::size_t i = 0; i < estimator.i_in.size() && open; ++i) {
      const double x = estimator.i_in[i];
      open = estimator.i_out[i] - family.inverse(*it, x) > d_t + kTunnelTol;
    }
    if (open) return *it;
  }
  return std::nullopt;
}

double exit_objective(const MuInterpolant &mu, const DecoderFamily &family, const std::vector<double> &w, double d_t,
                      std::span<const double> grid, std::vector<double> *level_rates) {
  const WeightDistribution wd(w);
  double total = 0;
  if (level_rates) level_rates->assign(w.size(), 0.0);
  for (int k = 1; k <= wd.levels(); ++k) {
    const double wk = w[static_cast<std::size_t>(k - 1)];
    if (wk <= 0) continue;
    const auto r = max_supported_rate(estimator_exit_from_mu(mu, wd, k, grid), family, d_t);
    const double rk = r.value_or(0.0);
    if (level_rates) (*level_rates)[static_cast<std::size_t>(k - 1)] = rk;
    total += wk * rk;
  }
  return total;
}

namespace {

std::vector<double> normalized(std::vector<double> w) {
  double s = 0;
  for (double &v : w) s += (v = std::max(v, 0.0));
  for (double &v : w) v /= s;
  // Push rounding residue onto the largest entry so the sum is exactly one.
  double t = 0;
  for (double v : w) t += v;
  *std::max_element(w.begin(), w.end()) += 1.0 - t;
  return w;
}

struct SearchResult {
  std::vector<double> w;
  double value;
};

SearchResult local_search(const MuInterpolant &mu, const DecoderFamily &family, std::vector<double> w, double d_t,
                          std::span<const double> grid) {
  const std::size_t k_n = w.size();
  double best = exit_objective(mu, family, w, d_t, grid);
  for (double step = 0.1; step >= 1e-4; step /= 2) {
    for (bool improved = true; improved;) {
      improved = false;
      std::vector<double> best_w;
      double best_v = best;
      for (std::size_t i = 0; i < k_n; ++i) {
        if (w[i] <= 0) continue;
        for (std::size_t j = 0; j < k_n; ++j) {
          if (i == j) continue;
          std::vector<double> c = w;
          const double d = std::min(step, c[i]);
          c[i] -= d;
          c[j] += d;
          c = normalized(std::move(c));
          const double v = exit_objective(mu, family, c, d_t, grid);
          if (v > best_v + 1e-12) {
            best_v = v;
            best_w = std::move(c);
          }
        }
      }
      if (!best_w.empty()) {
        w = std::move(best_w);
        best = best_v;
        improved = true;
      }
    }
  }
  return {w, best};
}

} // namespace

ExitDesign optimize_weights_exit(const MuInterpolant &mu, const DecoderFamily &family, int levels, double d_t,
                                 std::size_t starts, std::uint64_t seed, std::size_t grid_points) {
  if (levels < 1) throw std::invalid_argument("optimize_weights_exit: levels must be >= 1");
  if (family.empty()) throw std::invalid_argument("optimize_weights_exit: empty decoder family");
  const auto grid = uniform_grid(std::max<std::size_t>(grid_points, 2));
  const auto k_n = static_cast<std::size_t>(levels);
  ExitDesign out;
  if (levels == 1) {
    out.weights = {1.0};
    out.overall = exit_objective(mu, family, out.weights, d_t, grid, &out.level_rates);
    out.uniform_baseline = out.sed_baseline = out.overall;
    out.degenerate = out.level_rates[0] == 0;
    return out;
  }
  std::vector<std::vector<double>> init;
  init.push_back(std::vector<double>(k_n, 1.0 / static_cast<double>(k_n)));
  init.push_back(solve_weights(mu, levels).weights);
  out.uniform_baseline = exit_objective(mu, family, init[0], d_t, grid);
  out.sed_baseline = exit_objective(mu, family, init[1], d_t, grid);
  for (std::size_t s = 0; s < starts; ++s) {
    StreamRng rng(seed, Stream::search, {s});
    std::exponential_distribution<double> e;
    std::vector<double> w(k_n);
    for (auto &v : w) v = e(rng);
    init.push_back(normalized(std::move(w)));
  }
  std::vector<SearchResult> results(init.size());
  parallel_for(init.size(), 0, [&](std::size_t i) { results[i] = local_search(mu, family, init[i], d_t, grid); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].value > results[best].value + 1e-12) best = i;
  out.weights = results[best].w;
  out.overall = exit_objective(mu, family, out.weights, d_t, grid, &out.level_rates);
  for (std::size_t k = 0; k < k_n; ++k)
    if (out.weights[k] > 0 && out.level_rates[k] == 0) out.degenerate = true;
  return out;
}

void ExitDesign::write_csv(std::ostream &os) const {
  os << std::setprecision(12) << "# overall=" << overall << " uniform=" << uniform_baseline
     << " sed=" << sed_baseline << (degenerate ? " degenerate" : "") << '\n';
  os << "k,w,r\n";
  for (std::size_t k = 0; k < weights.size(); ++k) os << k + 1 << ',' << weights[k] << ',' << level_rates[k] << '\n';
}

} // namespace succdec
