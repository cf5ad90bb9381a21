#include "succdec/pilot.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace succdec {

// Cubic Hermite pieces with Akima slopes passed through the Hyman filter
// (|d| <= 3 min adjacent secant, zero at extrema), which keeps monotone data
// monotone.
struct MuInterpolant::Impl {
  std::vector<double> x, y, d;

  Impl(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)), d(x.size()) {
    const std::size_t n = x.size();
    std::vector<double> m(n + 3);  // secants with two ghosts on each side, m[i + 2] = secant i
    for (std::size_t i = 0; i + 1 < n; ++i) m[i + 2] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m[1] = 2 * m[2] - m[3];
    m[0] = 2 * m[1] - m[2];
    m[n + 1] = 2 * m[n] - m[n - 1];
    m[n + 2] = 2 * m[n + 1] - m[n];
    for (std::size_t i = 0; i < n; ++i) {
      const double w1 = std::abs(m[i + 3] - m[i + 2]);
      const double w2 = std::abs(m[i + 1] - m[i]);
      d[i] = w1 + w2 > 0 ? (w1 * m[i + 1] + w2 * m[i + 2]) / (w1 + w2) : 0.5 * (m[i + 1] + m[i + 2]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const bool has_left = i > 0, has_right = i + 1 < n;
      const double left = has_left ? m[i + 1] : m[i + 2];
      const double right = has_right ? m[i + 2] : m[i + 1];
      if (left * right <= 0 || d[i] * left <= 0) {
        d[i] = 0;
        continue;
      }
      const double cap = 3 * std::min(std::abs(left), std::abs(right));
      d[i] = std::copysign(std::min(std::abs(d[i]), cap), d[i]);
    }
  }

  std::size_t piece(double t) const {
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.begin()) return 0;
    return std::min<std::size_t>(static_cast<std::size_t>(it - x.begin()) - 1, x.size() - 2);
  }

  double value(double t) const {
    const std::size_t i = piece(t);
    const double h = x[i + 1] - x[i];
    const double s = (t - x[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y[i] + (s3 - 2 * s2 + s) * h * d[i] + (-2 * s3 + 3 * s2) * y[i + 1] +
           (s3 - s2) * h * d[i + 1];
  }

  double prime(double t) const {
    const std::size_t i = piece(t);
    const double h = x[i + 1] - x[i];
    const double s = (t - x[i]) / h;
    const double s2 = s * s;
    return (6 * s2 - 6 * s) / h * y[i] + (3 * s2 - 4 * s + 1) * d[i] + (-6 * s2 + 6 * s) / h * y[i + 1] +
           (3 * s2 - 2 * s) * d[i + 1];
  }
};

void PilotUtilityCurve::validate() const {
  if (grid.size() != values.size() || grid.size() != errors.size())
    throw std::invalid_argument("pilot-utility curve: grid, values and errors differ in length");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0 || grid[i] > 1) throw std::invalid_argument("pilot-utility curve: grid outside [0, 1]");
    if (i && !(grid[i] > grid[i - 1])) throw std::invalid_argument("pilot-utility curve: grid not increasing");
    if (!(errors[i] >= 0)) throw std::invalid_argument("pilot-utility curve: negative standard error");
  }
}

void PilotUtilityCurve::write_csv(std::ostream &os) const {
  os << "x,mu,stderr\n" << std::setprecision(12);
  for (std::size_t i = 0; i < grid.size(); ++i) os << grid[i] << ',' << values[i] << ',' << errors[i] << '\n';
}

PilotUtilityCurve PilotUtilityCurve::read_csv(std::istream &is) {
  PilotUtilityCurve c;
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,mu,stderr", 0) != 0)
    throw std::runtime_error("pilot-utility CSV: expected header x,mu,stderr");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, m, s;
    if (!(row >> x >> m >> s)) throw std::runtime_error("pilot-utility CSV: bad row '" + line + "'");
    c.grid.push_back(x);
    c.values.push_back(m);
    c.errors.push_back(s);
  }
  c.validate();
  return c;
}

std::vector<double> isotonic_fit(std::span<const double> y, std::span<const double> weights) {
  if (y.size() != weights.size()) throw std::invalid_argument("isotonic_fit: length mismatch");
  struct Block {
    double mean, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], weights[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      Block b = blocks.back();
      blocks.pop_back();
      Block &a = blocks.back();
      const double w = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / w;
      a.weight = w;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto &b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

namespace {

MuInterpolant::Impl *make_impl(std::vector<double> x, std::vector<double> y) {
  return new MuInterpolant::Impl(std::move(x), std::move(y));
}

} // namespace

MuInterpolant fit_mu(const PilotUtilityCurve &curve) {
  curve.validate();
  if (curve.size() < 4) throw std::invalid_argument("fit_mu: at least four grid points are required");
  if (curve.grid.front() != 0.0 || curve.grid.back() != 1.0)
    throw std::invalid_argument("fit_mu: grid must start at 0 and end at 1");
  double min_var = 0;
  for (double e : curve.errors)
    if (e > 0) min_var = min_var > 0 ? std::min(min_var, e * e) : e * e;
  std::vector<double> w(curve.size(), 1.0);
  if (min_var > 0)
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / std::max(curve.errors[i] * curve.errors[i], min_var);
  MuInterpolant m;
  m.x_ = curve.grid;
  m.y_ = isotonic_fit(curve.values, w);
  m.impl_.reset(make_impl(m.x_, m.y_));
  m.lo_ = m.y_.front();
  m.hi_ = m.y_.back();
  const double sd = std::hypot(curve.errors.front(), curve.errors.back());
  m.flat_ = !(m.hi_ - m.lo_ > 5 * sd) || !(m.hi_ > m.lo_);
  return m;
}

MuInterpolant mu_from_function(const std::function<double(double)> &f, std::size_t points) {
  if (points < 4) throw std::invalid_argument("mu_from_function: at least four points are required");
  MuInterpolant m;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(points - 1);
    m.x_.push_back(x);
    m.y_.push_back(f(x));
  }
  m.y_ = isotonic_fit(m.y_, std::vector<double>(points, 1.0));
  m.impl_.reset(make_impl(m.x_, m.y_));
  m.lo_ = m.y_.front();
  m.hi_ = m.y_.back();
  m.flat_ = !(m.hi_ > m.lo_);
  return m;
}

double MuInterpolant::operator()(double x) const {
  if (!impl_) throw std::logic_error("MuInterpolant: not fitted");
  return impl_->value(std::clamp(x, 0.0, 1.0));
}

double MuInterpolant::derivative(double x) const {
  if (!impl_) throw std::logic_error("MuInterpolant: not fitted");
  return std::max(0.0, impl_->prime(std::clamp(x, 0.0, 1.0)));
}

double MuInterpolant::inverse(double y) const {
  if (flat_) throw std::domain_error("MuInterpolant: flat curve, inverse undefined");
  if (y <= lo_) return 0.0;
  if (y >= hi_) {
    // Smallest x reaching the top value.
    double a = 0, b = 1;
    while (b - a > 1e-15) {
      const double m = 0.5 * (a + b);
      ((*this)(m) >= hi_ ? b : a) = m;
    }
    return b;
  }
  double a = 0, b = 1;
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    const double m = 0.5 * (a + b);
    ((*this)(m) >= y ? b : a) = m;
  }
  return b;
}

double MuInterpolant::integral(double a, double b) const {
  if (!impl_) throw std::logic_error("MuInterpolant: not fitted");
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (b <= a) return 0.0;
  using gauss = boost::math::quadrature::gauss<double, 4>;
  auto f = [this](double x) { return impl_->value(x); };
  double s = 0, lo = a;
  for (double k : x_) {
    if (k <= lo) continue;
    const double hi = std::min(k, b);
    s += gauss::integrate(f, lo, hi);
    lo = hi;
    if (lo >= b) break;
  }
  if (lo < b) s += gauss::integrate(f, lo, b);
  return s;
}

} // namespace succdec
