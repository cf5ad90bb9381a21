#include "succdec/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "succdec/inforate.hpp"

namespace succdec {

namespace {

// mu with a linear continuation below 0, its slope, and the matching inverse.
struct Extended {
  const MuInterpolant &mu;
  double slope0;

  explicit Extended(const MuInterpolant &m) : mu(m) {
    const auto &x = m.knots();
    const auto &y = m.fitted_values();
    const double secant = (y[1] - y[0]) / (x[1] - x[0]);
    slope0 = std::max(m.derivative(0.0), secant);
    if (!(slope0 > 0)) slope0 = std::max(m.hi() - m.lo(), 1e-12);
  }
  double value(double s) const { return s < 0 ? mu.lo() + slope0 * s : mu(s); }
  double slope(double s) const { return s < 0 ? slope0 : mu.derivative(s); }
  double inverse(double y, bool &clamped) const {
    if (y < mu.lo()) return (y - mu.lo()) / slope0;
    if (y > mu.hi()) {
      clamped = true;
      return 1.0;
    }
    return mu.inverse(y);
  }
};

} // namespace

KktCandidate kkt_weights(const MuInterpolant &mu, int levels, double lambda) {
  if (levels < 1) throw std::invalid_argument("kkt_weights: levels must be >= 1");
  const Extended ext(mu);
  const auto k_n = static_cast<std::size_t>(levels);
  KktCandidate c;
  c.lambda = lambda;
  c.weights.assign(k_n, 0.0);
  c.sigma.assign(k_n, 0.0);
  if (lambda < mu.lo() || lambda > mu.hi()) c.clamped = true;
  double s = std::min(ext.inverse(lambda, c.clamped), 1.0);
  c.sigma[k_n - 1] = s;
  c.weights[k_n - 1] = std::max(1.0 - s, 0.0);
  for (std::size_t i = k_n - 1; i >= 1; --i) {
    const double si = c.sigma[i];
    const double target = ext.value(si) - c.weights[i] * ext.slope(si);
    const double prev = std::min(ext.inverse(target, c.clamped), si);
    c.sigma[i - 1] = prev;
    c.weights[i - 1] = std::max(si - prev, 0.0);
  }
  c.theta = 1.0 - std::accumulate(c.weights.begin(), c.weights.end(), 0.0);
  return c;
}

std::vector<double> kkt_residuals(const MuInterpolant &mu, const std::vector<double> &w, double lambda) {
  const std::size_t k_n = w.size();
  std::vector<double> sigma(k_n, 0.0);
  for (std::size_t k = 1; k < k_n; ++k) sigma[k] = sigma[k - 1] + w[k - 1];
  std::vector<double> r(k_n);
  double tail = 0;
  for (std::size_t k = k_n; k-- > 0;) {
    r[k] = mu(sigma[k]) + tail - lambda;
    tail += w[k] * mu.derivative(sigma[k]);
  }
  return r;
}

KktSolution solve_weights(const MuInterpolant &mu, int levels, std::size_t grid_points) {
  if (levels < 1) throw std::invalid_argument("solve_weights: levels must be >= 1");
  if (grid_points < 2) throw std::invalid_argument("solve_weights: grid needs at least two points");
  const double lo = mu.lo(), hi = mu.hi();
  auto theta = [&](double l) { return kkt_weights(mu, levels, l).theta; };

  std::vector<double> roots;
  double prev_l = lo, prev_t = theta(lo);
  if (prev_t == 0) roots.push_back(lo);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double l = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double t = theta(l);
    if (t == 0) {
      roots.push_back(l);
    } else if ((prev_t < 0 && t > 0) || (prev_t > 0 && t < 0)) {
      double a = prev_l, b = l, ta = prev_t;
      while (b - a > 1e-12) {
        const double m = 0.5 * (a + b);
        const double tm = theta(m);
        if (tm == 0) {
          a = b = m;
          break;
        }
        if ((tm < 0) == (ta < 0)) {
          a = m;
          ta = tm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_l = l;
    prev_t = t;
  }

  KktSolution best;
  best.objective = -1;
  auto consider = [&](const KktCandidate &c) {
    std::vector<double> w = c.weights;
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(s > 0)) return;
    for (double &v : w) v /= s;
    const double obj = rate_from_mu(mu, WeightDistribution(w));
    if (obj > best.objective) {
      best.weights = w;
      best.lambda = c.lambda;
      best.objective = obj;
      best.clamped = c.clamped;
    }
  };
  for (double r : roots) consider(kkt_weights(mu, levels, r));
  best.roots = roots.size();
  if (roots.empty()) {
    // Fall back to the grid point with theta closest to zero.
    double bl = lo, bt = std::abs(theta(lo));
    for (std::size_t i = 1; i < grid_points; ++i) {
      const double l = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
      const double t = std::abs(theta(l));
      if (t < bt) {
        bt = t;
        bl = l;
      }
    }
    consider(kkt_weights(mu, levels, bl));
    best.no_root = true;
  }
  const std::size_t k_n = best.weights.size();
  best.sigma.assign(k_n, 0.0);
  for (std::size_t k = 1; k < k_n; ++k) best.sigma[k] = best.sigma[k - 1] + best.weights[k - 1];
  best.residuals = kkt_residuals(mu, best.weights, best.lambda);
  best.nu.assign(k_n, 0.0);
  best.max_residual = 0;
  for (double r : best.residuals) best.max_residual = std::max(best.max_residual, std::abs(r));
  return best;
}

void KktSolution::write_csv(std::ostream &os) const {
  os << std::setprecision(15);
  os << "# lambda=" << lambda << " R=" << objective << (no_root ? " no-root" : "") << (clamped ? " clamped" : "")
     << '\n';
  os << "k,w,sigma,residual\n";
  for (std::size_t k = 0; k < weights.size(); ++k)
    os << k + 1 << ',' << weights[k] << ',' << sigma[k] << ',' << residuals[k] << '\n';
}

} // namespace succdec
