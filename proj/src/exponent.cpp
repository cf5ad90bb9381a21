#include "succdec/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

// pchip.hpp in Boost 1.74 calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "succdec/parallel.hpp"

namespace succdec {

struct ExponentCurve::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

ExponentCurve::ExponentCurve(std::vector<double> rho, std::vector<double> e0, std::vector<double> errors, int level)
    : rho_(std::move(rho)), e0_(std::move(e0)), err_(std::move(errors)), level_(level) {
  if (rho_.size() != e0_.size() || rho_.size() != err_.size())
    throw std::invalid_argument("ExponentCurve: lengths differ");
  if (rho_.size() < 4) throw std::invalid_argument("ExponentCurve: at least four rho samples are required");
  if (rho_.front() != 0.0) throw std::invalid_argument("ExponentCurve: rho grid must start at 0");
  for (std::size_t i = 1; i < rho_.size(); ++i)
    if (!(rho_[i] > rho_[i - 1]) || rho_[i] > 1) throw std::invalid_argument("ExponentCurve: bad rho grid");
  auto x = rho_;
  auto y = e0_;
  impl_ = std::make_shared<Impl>(Impl{boost::math::interpolators::pchip<std::vector<double>>(std::move(x), std::move(y))});
}

double ExponentCurve::operator()(double rho) const {
  if (!impl_) throw std::logic_error("ExponentCurve: empty");
  return impl_->spline(std::clamp(rho, rho_.front(), rho_.back()));
}

ExponentCurve ExponentCurve::shifted(double n_sigma) const {
  auto e = e0_;
  for (std::size_t i = 1; i < e.size(); ++i) e[i] += n_sigma * err_[i];
  return ExponentCurve(rho_, std::move(e), err_, level_);
}

double ExponentCurve::monotonicity_violation() const {
  double worst = 0;
  for (std::size_t i = 1; i < e0_.size(); ++i) {
    const double drop = e0_[i - 1] - e0_[i];
    const double s = std::hypot(err_[i - 1], err_[i]);
    if (drop > 0) worst = std::max(worst, s > 0 ? drop / s : std::numeric_limits<double>::infinity());
  }
  return worst;
}

double ExponentCurve::concavity_violation() const {
  double worst = 0;
  for (std::size_t i = 1; i + 1 < e0_.size(); ++i) {
    const double h0 = rho_[i] - rho_[i - 1], h1 = rho_[i + 1] - rho_[i];
    const double chord = (e0_[i - 1] * h1 + e0_[i + 1] * h0) / (h0 + h1);
    const double excess = chord - e0_[i];
    const double s = std::sqrt(err_[i - 1] * err_[i - 1] + err_[i] * err_[i] + err_[i + 1] * err_[i + 1]);
    if (excess > 0) worst = std::max(worst, s > 0 ? excess / s : std::numeric_limits<double>::infinity());
  }
  return worst;
}

void ExponentCurve::write_csv(std::ostream &os) const {
  os << "rho,E0,stderr\n" << std::setprecision(12);
  for (std::size_t i = 0; i < rho_.size(); ++i) os << rho_[i] << ',' << e0_[i] << ',' << err_[i] << '\n';
}

std::vector<double> default_rho_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
  return g;
}

namespace {

// Per-block E0 samples for each rho from posteriors at the given positions.
void e0_block(std::span<const double> llr, std::span<const double> rho_grid, std::vector<double> &out) {
  out.assign(rho_grid.size(), 0.0);
  for (std::size_t g = 0; g < rho_grid.size(); ++g) {
    const double rho = rho_grid[g];
    const double a = 1.0 / (1.0 + rho);
    double s = 0;
    for (double l : llr) {
      const double pp = l >= 0 ? 1.0 / (1.0 + std::exp(-l)) : std::exp(l) / (1.0 + std::exp(l));
      const double pm = 1.0 - pp;
      s += std::pow(std::pow(pp, a) + std::pow(pm, a), 1.0 + rho);
    }
    out[g] = rho - std::log2(s / static_cast<double>(llr.size()));
  }
}

std::vector<double> level_llr(const StateModel &model, const McBlock &blk, const InterleaverPattern &pattern,
                              int level) {
  const auto training = training_mask(pattern, level, blk.channel.inputs);
  const auto post = forward_backward(model, blk.obs, training);
  std::vector<double> llr;
  for (std::size_t t : pattern.positions(level))
    if (t >= blk.lo && t < blk.hi) llr.push_back(extrinsic_llr(post, blk.obs, t));
  return llr;
}

ExponentCurve assemble(const std::vector<std::vector<double>> &vals, std::span<const double> rho_grid,
                       std::uint64_t seed, int level) {
  std::vector<double> e, err;
  std::vector<double> col;
  for (std::size_t g = 0; g < rho_grid.size(); ++g) {
    col.clear();
    for (const auto &v : vals)
      if (!v.empty()) col.push_back(v[g]);
    if (col.empty()) throw std::runtime_error("e0_subchannel: level has no interior positions");
    const auto r = summarize(col, 0, seed, "");
    e.push_back(r.mean);
    err.push_back(r.std_error);
  }
  return ExponentCurve(std::vector<double>(rho_grid.begin(), rho_grid.end()), std::move(e), std::move(err), level);
}

} // namespace

ExponentCurve e0_subchannel(const StateModel &model, const PatternSource &source, int level,
                            std::span<const double> rho_grid, const McConfig &mc) {
  if (level < 1 || level > source.levels()) throw std::out_of_range("e0_subchannel: level out of range");
  const std::size_t burn = burn_in(model, mc.burn_in_cap);
  std::vector<std::vector<double>> vals(mc.blocks);
  parallel_for(mc.blocks, mc.threads, [&](std::size_t b) {
    const auto pattern = source.for_block(mc.block_len, mc.seed, b);
    const McBlock blk = draw_block(model, pattern.length(), mc.seed, b, burn);
    const auto llr = level_llr(model, blk, pattern, level);
    if (!llr.empty()) e0_block(llr, rho_grid, vals[b]);
  });
  return assemble(vals, rho_grid, mc.seed, level);
}

std::vector<ExponentCurve> e0_all_levels(const StateModel &model, const PatternSource &source,
                                         std::span<const double> rho_grid, const McConfig &mc) {
  const int k_n = source.levels();
  const std::size_t burn = burn_in(model, mc.burn_in_cap);
  std::vector<std::vector<std::vector<double>>> vals(static_cast<std::size_t>(k_n),
                                                     std::vector<std::vector<double>>(mc.blocks));
  parallel_for(mc.blocks, mc.threads, [&](std::size_t b) {
    const auto pattern = source.for_block(mc.block_len, mc.seed, b);
    const McBlock blk = draw_block(model, pattern.length(), mc.seed, b, burn);
    for (int k = 1; k <= k_n; ++k) {
      const auto llr = level_llr(model, blk, pattern, k);
      if (!llr.empty()) e0_block(llr, rho_grid, vals[static_cast<std::size_t>(k - 1)][b]);
    }
  });
  std::vector<ExponentCurve> out;
  for (int k = 1; k <= k_n; ++k) out.push_back(assemble(vals[static_cast<std::size_t>(k - 1)], rho_grid, mc.seed, k));
  return out;
}

double error_exponent(const ExponentCurve &curve, double r) {
  if (r < 0) throw std::invalid_argument("error_exponent: rate must be non-negative");
  const auto &rho = curve.rho();
  const auto &e0 = curve.e0();
  std::size_t best = 0;
  double best_v = e0[0] - rho[0] * r;
  for (std::size_t i = 1; i < rho.size(); ++i) {
    const double v = e0[i] - rho[i] * r;
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  // Golden-section refinement on the interpolant around the best sample.
  double a = rho[best > 0 ? best - 1 : 0];
  double b = rho[std::min(best + 1, rho.size() - 1)];
  auto f = [&](double x) { return curve(x) - x * r; };
  const double phi = 0.5 * (std::sqrt(5.0) - 1);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  best_v = std::max({best_v, fc, fd});
  return std::max(best_v, 0.0);
}

double finite_length_rate(const ExponentCurve &curve, double n_k, int levels, double p_bar_e) {
  if (!(n_k >= 1)) throw std::invalid_argument("finite_length_rate: N_k must be >= 1");
  if (!(p_bar_e > 0 && p_bar_e < 1)) throw std::invalid_argument("finite_length_rate: P_e must lie in (0, 1)");
  if (levels < 1) throw std::invalid_argument("finite_length_rate: K must be >= 1");
  const double target = -std::log2(p_bar_e / levels) / n_k;
  if (error_exponent(curve, 0.0) <= target && target > 0) return 0.0;
  // E^r is non-increasing: bisect for the last rate whose exponent exceeds the target.
  double lo = 0, hi = 1;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double m = 0.5 * (lo + hi);
    (error_exponent(curve, m) > target ? lo : hi) = m;
  }
  return lo;
}

std::vector<std::size_t> apportion(std::size_t n, std::span<const double> w) {
  std::vector<std::size_t> out(w.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double exact = w[k] * static_cast<double>(n);
    out[k] = static_cast<std::size_t>(std::floor(exact));
    used += out[k];
    rem.emplace_back(exact - std::floor(exact), k);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto &a, auto &b) { return a.first > b.first; });
  for (std::size_t i = 0; used < n && i < rem.size(); ++i, ++used) ++out[rem[i].second];
  return out;
}

LevelDesign design_levels(const StateModel &model, PlanFamily family, int levels, const MuInterpolant *mu,
                          std::span<const double> rho_grid, const McConfig &mc) {
  LevelDesign d;
  d.levels = levels;
  if (family == PlanFamily::rectangular) {
    d.weights.assign(static_cast<std::size_t>(levels), 1.0 / levels);
    d.curves = e0_all_levels(model, PatternSource::fixed(rectangular(levels, static_cast<std::size_t>(levels))),
                             rho_grid, mc);
  } else {
    if (!mu) throw std::invalid_argument("design_levels: random family needs a pilot-utility interpolant");
    d.weights = solve_weights(*mu, levels).weights;
    d.curves = e0_all_levels(model, PatternSource::random(WeightDistribution(d.weights)), rho_grid, mc);
  }
  return d;
}

PlanCandidate plan_candidate(const LevelDesign &design, std::size_t total_length, double p_bar_e) {
  PlanCandidate c;
  c.levels = design.levels;
  const auto n_k = apportion(total_length, design.weights);
  for (int k = 1; k <= design.levels; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    PlanLevel row;
    row.level = k;
    row.n_k = n_k[i];
    row.w_k = design.weights[i];
    if (n_k[i] > 0) {
      row.rbar_k = finite_length_rate(design.curves[i], static_cast<double>(n_k[i]), design.levels, p_bar_e);
      c.rbar_lo += row.w_k * finite_length_rate(design.curves[i].shifted(-1), static_cast<double>(n_k[i]),
                                                design.levels, p_bar_e);
      c.rbar_hi += row.w_k * finite_length_rate(design.curves[i].shifted(1), static_cast<double>(n_k[i]),
                                                design.levels, p_bar_e);
    }
    c.rbar += row.w_k * row.rbar_k;
    c.rows.push_back(row);
  }
  return c;
}

FiniteLengthPlan optimal_levels(std::span<const LevelDesign> designs, std::size_t total_length, double p_bar_e,
                                std::string family_name) {
  if (designs.empty()) throw std::invalid_argument("optimal_levels: no candidate level counts");
  FiniteLengthPlan plan;
  plan.total_length = total_length;
  plan.p_bar_e = p_bar_e;
  plan.family = std::move(family_name);
  double best = -1;
  for (const auto &d : designs) {
    plan.candidates.push_back(plan_candidate(d, total_length, p_bar_e));
    if (plan.candidates.back().rbar > best) {
      best = plan.candidates.back().rbar;
      plan.best_levels = d.levels;
    }
  }
  return plan;
}

const PlanCandidate &FiniteLengthPlan::best() const {
  for (const auto &c : candidates)
    if (c.levels == best_levels) return c;
  throw std::logic_error("FiniteLengthPlan: no candidates");
}

void FiniteLengthPlan::write_csv(std::ostream &os) const {
  os << "K,level,N_k,w_k,rbar_k\n" << std::setprecision(12);
  for (const auto &c : candidates) {
    for (const auto &r : c.rows) os << c.levels << ',' << r.level << ',' << r.n_k << ',' << r.w_k << ',' << r.rbar_k << '\n';
    os << c.levels << ",all," << total_length << ",1," << c.rbar << '\n';
  }
}

} // namespace succdec
